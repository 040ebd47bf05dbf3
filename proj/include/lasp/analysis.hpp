// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lasp/bandit.hpp"
#include "lasp/surfaces.hpp"

namespace lasp {

/// (value / oracle_value - 1) * 100. Throws std::invalid_argument if oracle_value <= 0.
double distance_from_oracle(double value, double oracle_value);

struct GainReport {
  double f_default = 0.0;
  double f_best = 0.0;
  double pg_best = 0.0;  // percent; negative for a regression
};

/// (f_default - f_best) / f_default * 100. Throws std::invalid_argument if f_default <= 0.
GainReport performance_gain(double f_default, double f_best);

struct RegretCurve {
  double mu_star = 0.0;
  /// Cumulative regret after rounds 1..T.
  std::vector<double> cumulative;
  /// T mu* - sum_k mu_k T_k(T), from the realized pull counts.
  double play_count_total = 0.0;

  double final_regret() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// Accumulates mu* - mu_{arm(t)} over the trace.
RegretCurve regret_curve(std::span<const TraceRecord> trace, const ArmMeans& means);

/// Play-count form with expected pull counts (e.g. averaged over replications).
double play_count_regret(std::size_t rounds, const ArmMeans& means,
                         std::span<const std::pair<std::size_t, double>> mean_counts);

/// Pointwise mean of several equal-length curves.
std::vector<double> mean_curve(std::span<const RegretCurve> curves);

/// Logarithmic UCB regret bound:
///   8 ln(n) sum_{i: mu_i < mu*} 1/Delta_i + (1 + pi^2/3) sum_i Delta_i.
/// Zero when no arm is suboptimal.
double ucb_regret_bound(std::size_t n, std::span<const double> true_means);

/// The two sums of the bound, so bound(n) can be evaluated for many n in O(1).
struct BoundTerms {
  double inverse_gaps = 0.0;  // sum over suboptimal arms of 1 / Delta_i
  double gaps = 0.0;          // sum over arms of Delta_i

  double at(std::size_t n) const;
};

BoundTerms bound_terms(std::span<const double> true_means);
BoundTerms bound_terms(const ArmMeans& means);

/// Size of the intersection of the two top-k sets. Throws std::invalid_argument
/// if k exceeds either ranking.
std::size_t topk_overlap(std::span<const std::size_t> ranking_a, std::span<const std::size_t> ranking_b,
                         std::size_t k);

}  // namespace lasp
