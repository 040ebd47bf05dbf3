// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include "lasp/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace lasp {

namespace fs = std::filesystem;

int output_precision() {
  if (const char* env = std::getenv("LASP_OUTPUT_PRECISION")) {
    char* end = nullptr;
    const long digits = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && digits >= 1 && digits <= 17) return static_cast<int>(digits);
  }
  return 9;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", output_precision(), value);
  return buffer;
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("format must be csv or json, got '" + name + "'");
}

// ---------------------------------------------------------------------------

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) out += v;
            else if constexpr (std::is_same_v<T, double>) out += format_real(v);
            else out += std::to_string(v);
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json record = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) record[columns[i]] = std::stod(format_real(v));
              else record[columns[i]] = format_real(v);
            } else {
              record[columns[i]] = v;
            }
          },
          row[i]);
    }
    doc.push_back(std::move(record));
  }
  return doc.dump(2) + "\n";
}

Table trace_table(const ConfigSpace& space, std::span<const TraceRecord> trace) {
  Table table;
  table.columns = {"t", "arm_index", "config", "raw_time_s", "raw_power_w", "reward", "ucb_chosen"};
  table.rows.reserve(trace.size());
  for (const auto& rec : trace) {
    table.rows.push_back({static_cast<std::int64_t>(rec.t), static_cast<std::int64_t>(rec.arm),
                          space.describe(space.config_at(rec.arm)), rec.raw_time, rec.raw_power, rec.reward, rec.ucb});
  }
  return table;
}

Table regret_table(const RegretCurve& curve, const BoundTerms& bound) {
  Table table;
  table.columns = {"t", "cumulative_regret", "bound"};
  for (std::size_t i = 0; i < curve.cumulative.size(); ++i) {
    table.rows.push_back({static_cast<std::int64_t>(i + 1), curve.cumulative[i], bound.at(i + 1)});
  }
  return table;
}

Table heatmap_table(const ConfigSpace& space, const TuneReport& report, std::size_t p1, std::size_t p2) {
  const auto& params = space.parameters();
  if (p1 >= params.size()) throw std::out_of_range("heatmap parameter index out of range");
  const bool two_d = p2 < params.size() && p2 != p1;
  const std::size_t rows = params[p1].arity();
  const std::size_t cols = two_d ? params[p2].arity() : 1;

  std::vector<std::size_t> counts(rows * cols, 0);
  for (const auto& [arm, n] : report.final_counts) {
    const auto c = space.config_at(arm);
    counts[c.assignment[p1] * cols + (two_d ? c.assignment[p2] : 0)] += n;
  }

  Table table;
  table.columns = {"p1_value", "p2_value", "selection_count"};
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      table.rows.push_back({params[p1].values[a], two_d ? params[p2].values[b] : std::string("*"),
                            static_cast<std::int64_t>(counts[a * cols + b])});
    }
  }
  return table;
}

Table dump_table(const SyntheticSurface& surface, double q) {
  const auto& space = surface.space();
  if (space.size() > kExhaustiveGuard) throw std::length_error("space too large for an exhaustive dump");
  Table table;
  table.columns = {"config_index", "assignment", "q", "time_s", "power_w"};
  table.rows.reserve(space.size());
  for (const auto& c : space.enumerate()) {
    table.rows.push_back({static_cast<std::int64_t>(c.index), space.describe(c), q, surface.time(c, q),
                          surface.power(c, q)});
  }
  return table;
}

// ---------------------------------------------------------------------------

std::string render_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string render_key_values(const KeyValues& kv, Format format) {
  if (format == Format::csv) return render_key_values(kv);
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [k, v] : kv) doc[k] = v;
  return doc.dump(2) + "\n";
}

KeyValues report_summary(const ConfigSpace& space, const TuneReport& report) {
  KeyValues kv;
  kv.emplace_back("x_opt_index", std::to_string(report.x_opt.index));
  kv.emplace_back("x_opt", space.describe(report.x_opt));
  for (std::size_t p = 0; p < space.dimensions(); ++p) {
    kv.emplace_back("x_opt." + space.parameters()[p].name,
                    space.parameters()[p].values[report.x_opt.assignment[p]]);
  }
  kv.emplace_back("x_opt_count", std::to_string(report.count(report.x_opt.index)));
  kv.emplace_back("alpha", format_real(report.settings.weights.alpha));
  kv.emplace_back("beta", format_real(report.settings.weights.beta));
  kv.emplace_back("iterations", std::to_string(report.settings.iterations));
  kv.emplace_back("seed", std::to_string(report.settings.seed));
  kv.emplace_back("noise_level", format_real(report.settings.noise_level));
  kv.emplace_back("fidelity", format_real(report.settings.fidelity));
  kv.emplace_back("arms_pulled", std::to_string(report.final_counts.size()));
  std::string counts;
  for (const auto& [arm, n] : report.final_counts) {
    if (!counts.empty()) counts += ' ';
    counts += std::to_string(arm) + ':' + std::to_string(n);
  }
  kv.emplace_back("counts", counts);
  return kv;
}

KeyValues gain_summary(const GainReport& gain, const std::string& metric) {
  return {{"metric", metric},
          {"f_default", format_real(gain.f_default)},
          {"f_best", format_real(gain.f_best)},
          {"pg_best", format_real(gain.pg_best)}};
}

// ---------------------------------------------------------------------------

void write_outputs(const fs::path& dir, const std::vector<OutputFile>& files) {
  if (dir.empty()) throw ReportError("output directory path is empty");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ReportError("cannot create output directory '" + dir.string() + "'");

  std::vector<fs::path> staged;
  auto discard = [&staged] {
    std::error_code ignore;
    for (const auto& p : staged) fs::remove(p, ignore);
  };
  for (const auto& file : files) {
    const fs::path tmp = dir / (file.name + ".partial");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) staged.push_back(tmp);
    out << file.content;
    out.close();
    if (!out) {
      discard();
      throw ReportError("cannot write '" + (dir / file.name).string() + "'");
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(staged[i], dir / files[i].name, ec);
    if (ec) {
      discard();
      throw ReportError("cannot move '" + (dir / files[i].name).string() + "' into place: " + ec.message());
    }
  }
}

std::vector<OutputFile> render_report(const ReportArtifacts& artifacts, Format format) {
  if (!artifacts.space || !artifacts.report) throw std::invalid_argument("render_report needs a space and a report");
  const auto& space = *artifacts.space;
  const auto& report = *artifacts.report;
  const std::string ext = format == Format::csv ? ".csv" : ".json";
  const std::string txt = format == Format::csv ? ".txt" : ".json";

  std::vector<OutputFile> files;
  files.push_back({"trace" + ext, trace_table(space, report.trace).render(format)});
  if (artifacts.regret) {
    files.push_back({"regret" + ext, regret_table(*artifacts.regret, artifacts.bound.value_or(BoundTerms{})).render(format)});
  }
  if (artifacts.gain) {
    files.push_back({"gain" + txt, render_key_values(gain_summary(*artifacts.gain, artifacts.gain_metric), format)});
  }
  files.push_back({"heatmap" + ext, heatmap_table(space, report).render(format)});
  auto summary = report_summary(space, report);
  summary.emplace_back("status", "complete");
  files.push_back({"report" + txt, render_key_values(summary, format)});
  return files;
}

std::vector<std::string> emit_report(const ReportArtifacts& artifacts, const fs::path& dir, Format format) {
  const auto files = render_report(artifacts, format);
  write_outputs(dir, files);
  std::vector<std::string> names;
  for (const auto& f : files) names.push_back(f.name);
  return names;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::vector<std::string>& expected) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ReportError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_csv_line(line) != expected) throw ReportError("'" + path.string() + "' has an unexpected header");
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != expected.size())
      throw ReportError("'" + path.string() + "' line " + std::to_string(line_no) + ": wrong number of fields");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ReportError("malformed number '" + s + "'");
  return v;
}

std::size_t to_index(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw ReportError("malformed integer '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<TraceRecord> read_trace_csv(const fs::path& path) {
  const auto rows =
      read_csv(path, {"t", "arm_index", "config", "raw_time_s", "raw_power_w", "reward", "ucb_chosen"});
  std::vector<TraceRecord> trace;
  trace.reserve(rows.size());
  for (const auto& r : rows) {
    trace.push_back({to_index(r[0]), to_index(r[1]), to_real(r[5]), to_real(r[3]), to_real(r[4]), to_real(r[6])});
  }
  return trace;
}

std::vector<DumpRow> read_dump_csv(const fs::path& path) {
  const auto rows = read_csv(path, {"config_index", "assignment", "q", "time_s", "power_w"});
  std::vector<DumpRow> dump;
  dump.reserve(rows.size());
  for (const auto& r : rows) dump.push_back({to_index(r[0]), r[1], to_real(r[2]), to_real(r[3]), to_real(r[4])});
  return dump;
}

}  // namespace lasp
