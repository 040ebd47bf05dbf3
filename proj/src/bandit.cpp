// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include "lasp/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lasp {

Weights::Weights(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("weights alpha and beta must lie in [0, 1]");
}

std::vector<double> normalize(std::span<const double> samples, const MinMax& range) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (double v : samples) out.push_back(range.normalize(v));
  return out;
}

double ArmStats::reward_variance() const noexcept {
  if (pulls < 2) return 0.0;
  const double n = static_cast<double>(pulls);
  const double mean = reward_sum / n;
  return std::max(0.0, (reward_sq_sum - n * mean * mean) / (n - 1.0));
}

double reward_from_means(double mean_norm_time, double mean_norm_power, const Weights& w) noexcept {
  const double t = std::max(mean_norm_time, kRewardFloor);
  const double p = std::max(mean_norm_power, kRewardFloor);
  return w.alpha * (1.0 / t) + w.beta * (1.0 / p);
}

double reward(const ArmStats& arm, const Weights& w, const MinMax& time_range, const MinMax& power_range) {
  if (arm.pulls == 0) throw std::logic_error("reward of an unpulled arm is undefined");
  // MinMax is affine, so the mean of normalized samples is the normalized raw mean.
  return reward_from_means(time_range.normalize(arm.mean_time()), power_range.normalize(arm.mean_power()), w);
}

double ucb_value(double reward, std::size_t t, std::size_t pulls) {
  if (t < 1) throw std::invalid_argument("ucb_value requires t >= 1");
  if (pulls == 0) return std::numeric_limits<double>::infinity();
  return reward + std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(pulls));
}

double ucb_value(const ArmStats& arm, std::size_t t, const Weights& w, const MinMax& time_range,
                 const MinMax& power_range) {
  if (arm.pulls == 0) return ucb_value(0.0, t, 0);
  return ucb_value(reward(arm, w, time_range, power_range), t, arm.pulls);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below requires n > 0");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// ---------------------------------------------------------------------------

BanditState::BanditState(std::size_t arm_count, std::uint64_t seed)
    : arm_count_(arm_count), seed_(seed), rng_(seed), cold_count_(arm_count) {
  if (arm_count == 0) throw std::invalid_argument("bandit needs at least one arm");
}

const ArmStats& BanditState::arm(std::size_t index) const {
  static const ArmStats kEmpty{};
  if (index >= arm_count_) throw std::out_of_range("arm index out of range");
  auto it = arms_.find(index);
  return it == arms_.end() ? kEmpty : it->second;
}

std::size_t BanditState::pulls(std::size_t index) const { return arm(index).pulls; }

double BanditState::reward(std::size_t index, const Weights& w) const {
  return lasp::reward(arm(index), w, time_range_, power_range_);
}

double BanditState::ucb(std::size_t index, const Weights& w) const {
  return ucb_value(arm(index), t(), w, time_range_, power_range_);
}

std::size_t BanditState::cold_arm_at(std::size_t position) const {
  auto it = slot_to_arm_.find(position);
  return it == slot_to_arm_.end() ? position : it->second;
}

void BanditState::remove_cold(std::size_t arm) {
  auto it = arm_to_slot_.find(arm);
  const std::size_t slot = it == arm_to_slot_.end() ? arm : it->second;
  const std::size_t last = cold_count_ - 1;
  const std::size_t moved = cold_arm_at(last);
  slot_to_arm_[slot] = moved;
  arm_to_slot_[moved] = slot;
  slot_to_arm_.erase(last);
  arm_to_slot_.erase(arm);
  --cold_count_;
}

Selection BanditState::select(const Weights& w) {
  if (cold_count_ > 0) {
    const auto pick = static_cast<std::size_t>(uniform_below(rng_, cold_count_));
    return {cold_arm_at(pick), std::numeric_limits<double>::infinity()};
  }

  const std::size_t now = t();
  double best = -std::numeric_limits<double>::infinity();
  tie_buffer_.clear();
  for (std::size_t index : pulled_order_) {
    const double value = ucb_value(arms_.at(index), now, w, time_range_, power_range_);
    if (value > best) {
      best = value;
      tie_buffer_.clear();
      tie_buffer_.push_back(index);
    } else if (value == best) {
      tie_buffer_.push_back(index);
    }
  }
  if (tie_buffer_.size() > 1) {
    // Iteration order depends on pull history; sort so the draw depends only on the tied set.
    std::sort(tie_buffer_.begin(), tie_buffer_.end());
    return {tie_buffer_[uniform_below(rng_, tie_buffer_.size())], best};
  }
  return {tie_buffer_.front(), best};
}

void BanditState::update(std::size_t index, const Sample& sample) {
  if (index >= arm_count_) throw std::out_of_range("arm index out of range");
  if (!std::isfinite(sample.exec_time) || sample.exec_time < 0.0)
    throw MeasurementError("invalid execution time " + std::to_string(sample.exec_time));
  if (!std::isfinite(sample.power) || sample.power < 0.0)
    throw MeasurementError("invalid power " + std::to_string(sample.power));

  auto [it, inserted] = arms_.try_emplace(index);
  if (inserted) {
    remove_cold(index);
    pulled_order_.push_back(index);
  }
  ArmStats& a = it->second;
  ++a.pulls;
  a.time_samples.push_back(sample.exec_time);
  a.power_samples.push_back(sample.power);
  a.time_sum += sample.exec_time;
  a.power_sum += sample.power;
  time_range_.widen(sample.exec_time);
  power_range_.widen(sample.power);
  ++total_pulls_;
}

void BanditState::record_reward(std::size_t index, double value) {
  auto& a = arms_.at(index);
  a.reward_sum += value;
  a.reward_sq_sum += value * value;
}

// ---------------------------------------------------------------------------

std::size_t TuneReport::count(std::size_t arm) const {
  auto it = std::lower_bound(final_counts.begin(), final_counts.end(), std::make_pair(arm, std::size_t{0}));
  return (it != final_counts.end() && it->first == arm) ? it->second : 0;
}

RunAborted::RunAborted(const std::string& what, std::vector<TraceRecord> completed, std::exception_ptr cause)
    : std::runtime_error(what), completed_(std::move(completed)), cause_(std::move(cause)) {}

TuneReport run(const ConfigSpace& space, const Evaluator& evaluator, const Weights& w,
               std::size_t iterations, std::uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("run requires T >= 1");

  BanditState state(space.size(), seed);
  TuneReport report;
  report.trace.reserve(iterations);
  report.settings.weights = w;
  report.settings.iterations = iterations;
  report.settings.seed = seed;

  for (std::size_t round = 1; round <= iterations; ++round) {
    const Selection chosen = state.select(w);
    const Configuration config = space.config_at(chosen.arm);
    Sample sample;
    try {
      sample = evaluator(config, round);
      sample.config_index = chosen.arm;
      state.update(chosen.arm, sample);
    } catch (const std::exception& e) {
      throw RunAborted("round " + std::to_string(round) + " failed: " + e.what(), std::move(report.trace),
                       std::current_exception());
    }

    const double received = state.reward(chosen.arm, w);
    state.record_reward(chosen.arm, received);
    report.trace.push_back({round, chosen.arm, received, sample.exec_time, sample.power, chosen.ucb});
    report.settings.fidelity = sample.fidelity;
  }

  std::size_t best_arm = 0;
  std::size_t best_count = 0;
  for (std::size_t index : state.pulled_arms()) {
    const std::size_t n = state.pulls(index);
    report.final_counts.emplace_back(index, n);
    if (n > best_count || (n == best_count && index < best_arm)) {
      best_count = n;
      best_arm = index;
    }
  }
  std::sort(report.final_counts.begin(), report.final_counts.end());
  report.x_opt = space.config_at(best_arm);
  return report;
}

double expected_total_reward(std::span<const std::vector<TraceRecord>> traces) {
  if (traces.empty()) throw std::invalid_argument("expected_total_reward needs at least one trace");
  double total = 0.0;
  for (const auto& trace : traces) {
    double sum = 0.0;
    for (const auto& rec : trace) sum += rec.reward;
    total += sum;
  }
  return total / static_cast<double>(traces.size());
}

}  // namespace lasp
