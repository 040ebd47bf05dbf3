// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lasp/sample.hpp"
#include "lasp/space.hpp"

namespace lasp {

/// Floor applied to normalized means before they are inverted in the reward.
inline constexpr double kRewardFloor = 1e-6;

/// User priorities for execution time (alpha) and power (beta), each in [0, 1].
struct Weights {
  double alpha = 0.8;
  double beta = 0.2;

  Weights() = default;
  Weights(double alpha_, double beta_);
};

/// Running (min, max) over every raw sample seen so far.
struct MinMax {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  bool empty() const noexcept { return min > max; }
  void widen(double v) noexcept {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  /// (v - min) / (max - min); 0 when the range is degenerate.
  double normalize(double v) const noexcept {
    const double span = max - min;
    return span > 0.0 ? (v - min) / span : 0.0;
  }
};

std::vector<double> normalize(std::span<const double> samples, const MinMax& range);

/// Per-arm bookkeeping: raw measurements and received rewards.
struct ArmStats {
  std::size_t pulls = 0;
  double reward_sum = 0.0;
  double reward_sq_sum = 0.0;
  std::vector<double> time_samples;
  std::vector<double> power_samples;
  double time_sum = 0.0;
  double power_sum = 0.0;

  double mean_time() const noexcept { return pulls ? time_sum / static_cast<double>(pulls) : 0.0; }
  double mean_power() const noexcept { return pulls ? power_sum / static_cast<double>(pulls) : 0.0; }
  /// Empirical variance of received rewards; reporting only.
  double reward_variance() const noexcept;
};

/// Weighted reward from already-normalized means, with the floor applied.
double reward_from_means(double mean_norm_time, double mean_norm_power, const Weights& w) noexcept;

/// Weighted reward of an arm under the current global normalization. Requires pulls >= 1.
double reward(const ArmStats& arm, const Weights& w, const MinMax& time_range, const MinMax& power_range);

/// Empirical reward plus the exploration bonus sqrt(2 ln t / N).
double ucb_value(double reward, std::size_t t, std::size_t pulls);
double ucb_value(const ArmStats& arm, std::size_t t, const Weights& w, const MinMax& time_range,
                 const MinMax& power_range);

/// Uniform integer in [0, n) from a 64-bit engine; portable across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

struct Selection {
  std::size_t arm = 0;
  double ucb = 0.0;
};

/// Mutable state of one tuning run.
///
/// Arms are stored sparsely so spaces far larger than the iteration budget stay
/// cheap. While any arm is unpulled its UCB is +inf, so selection reduces to a
/// uniform draw among the unpulled arms; once every arm has been pulled the UCB
/// of every arm is evaluated each round.
class BanditState {
 public:
  BanditState(std::size_t arm_count, std::uint64_t seed);

  std::size_t arm_count() const noexcept { return arm_count_; }
  /// Current iteration, 1-based: total pulls + 1.
  std::size_t t() const noexcept { return total_pulls_ + 1; }
  std::size_t total_pulls() const noexcept { return total_pulls_; }
  std::size_t cold_count() const noexcept { return cold_count_; }
  std::uint64_t seed() const noexcept { return seed_; }

  const ArmStats& arm(std::size_t index) const;
  std::size_t pulls(std::size_t index) const;
  const MinMax& time_range() const noexcept { return time_range_; }
  const MinMax& power_range() const noexcept { return power_range_; }
  /// Indices of every arm pulled at least once, in first-pull order.
  const std::vector<std::size_t>& pulled_arms() const noexcept { return pulled_order_; }

  double reward(std::size_t index, const Weights& w) const;
  double ucb(std::size_t index, const Weights& w) const;

  Selection select(const Weights& w);
  /// Records a sample for an arm. Throws MeasurementError (state unchanged) on
  /// non-finite or negative measurements.
  void update(std::size_t index, const Sample& sample);
  /// Accumulates a received reward into the arm's reward statistics.
  void record_reward(std::size_t index, double value);

 private:
  std::size_t cold_arm_at(std::size_t position) const;
  void remove_cold(std::size_t arm);

  std::size_t arm_count_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::size_t total_pulls_ = 0;
  MinMax time_range_;
  MinMax power_range_;
  std::unordered_map<std::size_t, ArmStats> arms_;
  std::vector<std::size_t> pulled_order_;

  // Sparse Fisher-Yates layout of the unpulled arms in positions [0, cold_count_).
  std::size_t cold_count_;
  std::unordered_map<std::size_t, std::size_t> slot_to_arm_;
  std::unordered_map<std::size_t, std::size_t> arm_to_slot_;
  std::vector<std::size_t> tie_buffer_;
};

struct TraceRecord {
  std::size_t t = 0;
  std::size_t arm = 0;
  double reward = 0.0;
  double raw_time = 0.0;
  double raw_power = 0.0;
  double ucb = 0.0;
};

struct RunSettingsEcho {
  Weights weights;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  double noise_level = 0.0;
  double fidelity = 1.0;
};

struct TuneReport {
  Configuration x_opt;
  std::vector<TraceRecord> trace;
  /// (arm index, pulls) for every pulled arm, ascending by index.
  std::vector<std::pair<std::size_t, std::size_t>> final_counts;
  RunSettingsEcho settings;

  std::size_t count(std::size_t arm) const;
};

/// Evaluates one configuration at iteration t (1-based).
using Evaluator = std::function<Sample(const Configuration&, std::size_t t)>;

/// An evaluator failure aborted a run; carries every completed round.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, std::vector<TraceRecord> completed, std::exception_ptr cause);
  const std::vector<TraceRecord>& completed() const noexcept { return completed_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  std::vector<TraceRecord> completed_;
  std::exception_ptr cause_;
};

/// The full select -> evaluate -> update loop over T rounds.
///
/// x_opt is the most-pulled arm; ties go to the lowest index.
TuneReport run(const ConfigSpace& space, const Evaluator& evaluator, const Weights& w,
               std::size_t iterations, std::uint64_t seed);

/// Mean over replications of the summed per-round reward.
double expected_total_reward(std::span<const std::vector<TraceRecord>> traces);

}  // namespace lasp
