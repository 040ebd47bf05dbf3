// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lasp/analysis.hpp"
#include "lasp/bandit.hpp"
#include "lasp/space.hpp"
#include "lasp/surfaces.hpp"

namespace lasp {

/// Significant digits for rendered reals: 9, or LASP_OUTPUT_PRECISION when set.
int output_precision();
std::string format_real(double value);

enum class Format { csv, json };
Format parse_format(const std::string& name);

/// A flat table that renders either as CSV or as a JSON array of records.
struct Table {
  using Cell = std::variant<std::string, double, std::int64_t>;

  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string to_csv() const;
  std::string to_json() const;
  std::string render(Format format) const { return format == Format::csv ? to_csv() : to_json(); }
};

Table trace_table(const ConfigSpace& space, std::span<const TraceRecord> trace);
/// Columns t,cumulative_regret,bound.
Table regret_table(const RegretCurve& curve, const BoundTerms& bound);
/// Selection counts marginalized onto two parameters: p1_value,p2_value,selection_count.
Table heatmap_table(const ConfigSpace& space, const TuneReport& report, std::size_t p1 = 0, std::size_t p2 = 1);
/// Exhaustive surface export: config_index,assignment,q,time_s,power_w.
Table dump_table(const SyntheticSurface& surface, double q);

/// Plain key=value text.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
std::string render_key_values(const KeyValues& kv);
std::string render_key_values(const KeyValues& kv, Format format);

KeyValues report_summary(const ConfigSpace& space, const TuneReport& report);
KeyValues gain_summary(const GainReport& gain, const std::string& metric);

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputFile {
  std::string name;
  std::string content;
};

/// Writes every file into `dir` (created if needed). All content is staged to
/// temporary files first and renamed into place only after every write
/// succeeded. Throws ReportError with path context.
void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

struct ReportArtifacts {
  const ConfigSpace* space = nullptr;
  const TuneReport* report = nullptr;
  std::optional<RegretCurve> regret;
  std::optional<BoundTerms> bound;
  std::optional<GainReport> gain;
  std::string gain_metric = "time";
};

/// Renders the report files without writing them; report.txt comes last and
/// carries status=complete.
std::vector<OutputFile> render_report(const ReportArtifacts& artifacts, Format format = Format::csv);

/// Trace, regret (when available), gain summary (when available), heatmap
/// data and a key=value report; returns the file names written.
std::vector<std::string> emit_report(const ReportArtifacts& artifacts, const std::filesystem::path& dir,
                                     Format format = Format::csv);

/// Reads a trace CSV written by trace_table().
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

struct DumpRow {
  std::size_t config_index = 0;
  std::string assignment;
  double q = 0.0;
  double time = 0.0;
  double power = 0.0;
};

/// Reads an exhaustive dump written by dump_table().
std::vector<DumpRow> read_dump_csv(const std::filesystem::path& path);

}  // namespace lasp
