// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include "lasp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace lasp {

double distance_from_oracle(double value, double oracle_value) {
  if (!(oracle_value > 0.0)) throw std::invalid_argument("oracle value must be positive");
  return (value - oracle_value) * 100.0 / oracle_value;
}

GainReport performance_gain(double f_default, double f_best) {
  if (!(f_default > 0.0)) throw std::invalid_argument("f_default must be positive");
  return {f_default, f_best, (f_default - f_best) * 100.0 / f_default};
}

RegretCurve regret_curve(std::span<const TraceRecord> trace, const ArmMeans& means) {
  RegretCurve curve;
  curve.mu_star = means.mu_star();
  curve.cumulative.reserve(trace.size());

  std::unordered_map<std::size_t, std::size_t> counts;
  double total = 0.0;
  for (const auto& rec : trace) {
    total += curve.mu_star - means.mean(rec.arm);
    curve.cumulative.push_back(total);
    ++counts[rec.arm];
  }

  // Sum in ascending arm order so the result does not depend on hash layout.
  std::vector<std::pair<std::size_t, std::size_t>> ordered(counts.begin(), counts.end());
  std::sort(ordered.begin(), ordered.end());
  double collected = 0.0;
  for (const auto& [arm, n] : ordered) collected += means.mean(arm) * static_cast<double>(n);
  curve.play_count_total = static_cast<double>(trace.size()) * curve.mu_star - collected;
  return curve;
}

double play_count_regret(std::size_t rounds, const ArmMeans& means,
                         std::span<const std::pair<std::size_t, double>> mean_counts) {
  double collected = 0.0;
  for (const auto& [arm, n] : mean_counts) collected += means.mean(arm) * n;
  return static_cast<double>(rounds) * means.mu_star() - collected;
}

std::vector<double> mean_curve(std::span<const RegretCurve> curves) {
  if (curves.empty()) return {};
  const std::size_t length = curves.front().cumulative.size();
  std::vector<double> out(length, 0.0);
  for (const auto& c : curves) {
    if (c.cumulative.size() != length) throw std::invalid_argument("regret curves differ in length");
    for (std::size_t i = 0; i < length; ++i) out[i] += c.cumulative[i];
  }
  for (auto& v : out) v /= static_cast<double>(curves.size());
  return out;
}

namespace {

constexpr double kBoundConstant = 1.0 + std::numbers::pi * std::numbers::pi / 3.0;

void accumulate(BoundTerms& terms, double mu_star, double mu) {
  const double delta = mu_star - mu;
  if (delta > 0.0) {
    terms.inverse_gaps += 1.0 / delta;
    terms.gaps += delta;
  }
}

}  // namespace

double BoundTerms::at(std::size_t n) const {
  if (n < 1) throw std::invalid_argument("regret bound needs n >= 1");
  if (gaps == 0.0) return 0.0;
  return 8.0 * std::log(static_cast<double>(n)) * inverse_gaps + kBoundConstant * gaps;
}

BoundTerms bound_terms(std::span<const double> true_means) {
  BoundTerms terms;
  if (true_means.empty()) return terms;
  const double mu_star = *std::max_element(true_means.begin(), true_means.end());
  for (double mu : true_means) accumulate(terms, mu_star, mu);
  return terms;
}

BoundTerms bound_terms(const ArmMeans& means) {
  BoundTerms terms;
  for (std::size_t i = 0; i < means.arm_count(); ++i) accumulate(terms, means.mu_star(), means.mean(i));
  return terms;
}

double ucb_regret_bound(std::size_t n, std::span<const double> true_means) {
  return bound_terms(true_means).at(n);
}

std::size_t topk_overlap(std::span<const std::size_t> ranking_a, std::span<const std::size_t> ranking_b,
                         std::size_t k) {
  if (k > ranking_a.size() || k > ranking_b.size())
    throw std::invalid_argument("k exceeds the length of a ranking");
  const std::unordered_set<std::size_t> top_a(ranking_a.begin(), ranking_a.begin() + static_cast<std::ptrdiff_t>(k));
  std::unordered_set<std::size_t> seen;
  std::size_t common = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (top_a.count(ranking_b[i]) && seen.insert(ranking_b[i]).second) ++common;
  }
  return common;
}

}  // namespace lasp
