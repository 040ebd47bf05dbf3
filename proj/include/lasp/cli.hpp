// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lasp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitExecution = 3;

enum class Mode { surface, command };

struct RunSettings {
  std::string preset;      // preset name, or empty when space_file is set
  std::string space_file;  // path, or empty when preset is set
  Mode mode = Mode::surface;
  std::size_t iterations = 500;
  double alpha = 0.8;
  double beta = 0.2;
  std::uint64_t seed = 42;
  double noise_level = 0.0;
  bool noise_on_time = true;
  bool noise_on_power = true;
  std::optional<double> fidelity;  // defaults to the surface's q_max
  std::uint64_t structure_seed = 1;
  double fidelity_correlation = 0.8;
  std::string output_dir = "lasp_out";
  std::optional<std::size_t> replications;  // 100 for surfaces, 1 for commands
  std::string probe;                         // overrides the space file's probe entry
  std::string format = "csv";
  unsigned threads = 0;                      // 0 = hardware concurrency

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  std::size_t replication_count() const;
};

/// Runs the command line; returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace lasp::cli
