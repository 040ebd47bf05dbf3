// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lasp/sample.hpp"
#include "lasp/space.hpp"
#include "lasp/surfaces.hpp"

namespace lasp {

/// Multiplicative measurement noise: value * (1 + u), u ~ U[-level, +level].
struct NoiseSpec {
  double level = 0.0;
  std::uint64_t seed = 0;
  bool on_time = true;
  bool on_power = true;

  void validate() const;
};

enum class NoiseStream : std::uint32_t { time = 1, power = 2 };

/// Deterministic in (value, level, seed, draw index, stream); level 0 is the identity.
double apply_noise(double value, const NoiseSpec& noise, std::uint64_t draw_index, NoiseStream stream);

/// The command exited with a nonzero status (or could not be started).
class ExecutionFault : public std::runtime_error {
 public:
  ExecutionFault(const std::string& what, int exit_code, std::string output);
  int exit_code() const noexcept { return exit_code_; }
  const std::string& output() const noexcept { return output_; }

 private:
  int exit_code_;
  std::string output_;
};

/// The command template does not fit the space.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source of power readings in watts. Every read is positive and finite or throws MeasurementError.
class PowerProbe {
 public:
  virtual ~PowerProbe() = default;
  virtual double read() = 0;
};

class ConstantProbe final : public PowerProbe {
 public:
  explicit ConstantProbe(double watts);
  double read() override { return watts_; }

 private:
  double watts_;
};

/// Reads a decimal number from a file on each poll, e.g. hwmon power*_input.
/// Accepted forms: "4.2", "4.2 W", "4200 mW", "4200000 uW".
class FileProbe final : public PowerProbe {
 public:
  explicit FileProbe(std::string path);
  double read() override;
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Parses a reading in the file probe's text format.
double parse_power_reading(std::string_view text);

/// "constant:<watts>" or "file:<path>".
std::unique_ptr<PowerProbe> make_probe(std::string_view spec);

/// Splits on whitespace outside single or double quotes; no other shell semantics.
std::vector<std::string> split_command(std::string_view command);

/// Argument vector with every parameter's substitution token replaced.
/// Throws ContractError unless each token occurs exactly once in the template.
std::vector<std::string> substitute(std::string_view command_template, const ConfigSpace& space,
                                    const Configuration& config);

struct CommandSpec {
  std::string command_template;
  std::chrono::milliseconds poll_interval{100};
};

/// Builds a CommandSpec from a space file's [command] section (`run`, optional `poll_ms`).
CommandSpec command_from_section(const std::map<std::string, std::string>& section);

/// Launches the substituted command, times it on a monotonic clock, and
/// averages probe polls taken while it runs.
Sample evaluate_command(const CommandSpec& command, const ConfigSpace& space, const Configuration& config,
                        PowerProbe& probe, const NoiseSpec& noise, std::uint64_t draw_index);

/// Queries the surface at (config, q) and applies noise. Pure.
Sample evaluate_surface(const SyntheticSurface& surface, const Configuration& config, double q,
                        const NoiseSpec& noise, std::uint64_t draw_index);

}  // namespace lasp
