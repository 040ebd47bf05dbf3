// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lasp/bandit.hpp"
#include "lasp/space.hpp"

namespace lasp {

/// Maps a fidelity q onto an effective grid-cell count m^3 by linear
/// interpolation between (q_min, m_min^3) and (q_max, m_max^3).
struct FidelityMap {
  double q_min = 0.0;
  double q_max = 1.0;
  int m_min = 10;
  int m_max = 100;

  void validate() const;
  bool contains(double q) const noexcept { return q >= q_min && q <= q_max; }
  /// Position of q in [0, 1] between q_min and q_max.
  double position(double q) const;
};

double fidelity_to_cells(const FidelityMap& map, double q);

enum class Preset { kripke, lulesh, clomp, hypre, custom };

Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset preset);
/// Space-file text shipped for a preset (not available for custom).
std::string_view preset_space_text(Preset preset);
ConfigSpace preset_space(Preset preset);
/// Commonly quoted size of the preset; differs from the parsed size for lulesh and hypre.
std::size_t preset_listed_size(Preset preset);

enum class Metric { time, power, weighted };

/// Deterministic synthetic response surface with a fidelity axis.
///
/// Time is base(x) * scale(q) * (1 + drift(x, q)). base(x) is a seeded
/// landscape of per-parameter effect curves plus non-negative interactions
/// between neighbouring parameters, zero at a planted optimum, so the
/// minimizer at q_max is unique and at least kMinGap better than any other
/// configuration. drift vanishes at q_max and grows towards q_min with
/// magnitude (1 - fidelity_correlation). Power follows the same construction
/// with a much flatter landscape and a different optimum.
class SyntheticSurface {
 public:
  /// Relative margin by which the planted optimum beats every other configuration.
  static constexpr double kMinGap = 0.06;

  SyntheticSurface(ConfigSpace space, std::uint64_t structure_seed, double fidelity_correlation,
                   FidelityMap fidelity = {});

  const ConfigSpace& space() const noexcept { return space_; }
  const FidelityMap& fidelity() const noexcept { return fidelity_; }
  std::uint64_t structure_seed() const noexcept { return structure_seed_; }
  double fidelity_correlation() const noexcept { return correlation_; }

  double time(std::span<const std::size_t> assignment, double q) const;
  double power(std::span<const std::size_t> assignment, double q) const;
  double time(const Configuration& config, double q) const { return time(config.assignment, q); }
  double power(const Configuration& config, double q) const { return power(config.assignment, q); }

  /// The planted optimum of the time landscape (the time oracle at q_max).
  std::size_t planted_time_optimum() const noexcept { return time_optimum_; }
  std::size_t planted_power_optimum() const noexcept { return power_optimum_; }

 private:
  struct Landscape {
    std::vector<std::vector<double>> effect;       // per parameter, per value (log scale)
    std::vector<std::vector<double>> interaction;  // (p, p+1) tables, row-major over (v_p, v_{p+1})
    std::vector<std::size_t> optimum;
    double log_scale = 0.0;

    double log_value(std::span<const std::size_t> assignment) const;
  };

  void check_q(double q) const;

  ConfigSpace space_;
  std::uint64_t structure_seed_;
  double correlation_;
  FidelityMap fidelity_;
  double drift_limit_;
  double cells_at_max_;
  Landscape time_;
  Landscape power_;
  std::vector<std::vector<double>> drift_;  // per parameter, per value in [-1, 1]
  std::size_t time_optimum_ = 0;
  std::size_t power_optimum_ = 0;
};

SyntheticSurface make_surface(Preset preset, std::uint64_t structure_seed, double fidelity_correlation);

/// Largest space the exhaustive scans accept.
inline constexpr std::size_t kExhaustiveGuard = 10'000'000;

struct OracleResult {
  Configuration config;
  double value = 0.0;
};

/// Exhaustive minimizer of a metric at fidelity q. The weighted metric is
/// alpha * t_hat + beta * p_hat with MinMax normalization over the full sweep.
OracleResult oracle(const SyntheticSurface& surface, double q, Metric metric, const Weights& w = {});

/// Indices of the k fastest configurations at q, fastest first (ties by index).
std::vector<std::size_t> rank_by_time(const SyntheticSurface& surface, double q, std::size_t k);

/// True per-arm mean rewards for regret analysis.
class ArmMeans {
 public:
  explicit ArmMeans(std::vector<double> means);
  ArmMeans(std::size_t arm_count, double mu_star, std::function<double(std::size_t)> mean);

  std::size_t arm_count() const noexcept { return arm_count_; }
  double mu_star() const noexcept { return mu_star_; }
  /// Throws std::out_of_range for an arm without a known mean.
  double mean(std::size_t arm) const;

 private:
  std::size_t arm_count_ = 0;
  double mu_star_ = 0.0;
  std::vector<double> dense_;
  std::function<double(std::size_t)> fn_;
};

/// Reward means normalized over the exhaustive sweep at fidelity q.
ArmMeans reward_means(const SyntheticSurface& surface, double q, const Weights& w);

}  // namespace lasp
