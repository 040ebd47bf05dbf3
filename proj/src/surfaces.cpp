// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include "lasp/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace lasp {

namespace {

constexpr std::string_view kKripkeSpace = R"(# Kripke: data layout and decomposition
[space]
layout = {layout} | DGZ, DZG, GDZ, GZD, ZDG, ZGD
gset   = {gset}   | 1, 2, 3, 8, 16, 32
dset   = {dset}   | 8, 16, 32, 48, 64, 96

[default]
layout = DGZ
gset   = 1
dset   = 8
)";

// Lulesh is usually quoted at 128 configurations, but these ranges give 15 x 8 = 120.
constexpr std::string_view kLuleshSpace = R"(# Lulesh: regions per domain and cube mesh elements
[space]
r = {r} | 1-15
s = {s} | 1-8

[default]
r = 11
s = 8
)";

constexpr std::string_view kClompSpace = R"(# Clomp: OpenMP work decomposition
[space]
partsPerThread = {partsPerThread} | 10, 20, 50, 70, 90
zonesPerPart   = {zonesPerPart}   | 100, 300, 500, 700, 900
zoneSize       = {zoneSize}       | 32, 128, 512, 1024, 2048

[default]
partsPerThread = 10
zonesPerPart   = 100
zoneSize       = 512
)";

// strong_threshold is discretized to 10 evenly spaced values in (0, 1); the
// resulting size is a modelling choice.
constexpr std::string_view kHypreSpace = R"(# Hypre: BoomerAMG solver settings
[space]
Px                = {Px}                | 1-4
Py                = {Py}                | 1-4
strong_threshold  = {strong_threshold}  | 0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95
trunc_factor      = {trunc_factor}      | 1-10
P_max_elmts       = {P_max_elmts}       | 1-4
coarsen_type      = {coarsen_type}      | 1-3
relax_type        = {relax_type}        | 1-2
smooth_type       = {smooth_type}       | 0-1
smooth_num_levels = {smooth_num_levels} | 1-4
interp_type       = {interp_type}       | 1-3
agg_num_levels    = {agg_num_levels}    | 1-10

[default]
Px                = 2
Py                = 2
strong_threshold  = 0.25
trunc_factor      = 2
P_max_elmts       = 1
coarsen_type      = 1
relax_type        = 1
smooth_type       = 0
smooth_num_levels = 3
interp_type       = 1
agg_num_levels    = 2
)";

// splitmix64; used to derive independent streams from the structure seed.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(mix(seed)) {}
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t next() { return state_ = mix(state_); }
  std::uint64_t state_;
};

struct LandscapeShape {
  double amplitude_lo;
  double amplitude_hi;
  double jitter;
  double interaction;
};

constexpr LandscapeShape kTimeShape{0.25, 0.9, 0.15, 0.2};
constexpr LandscapeShape kPowerShape{0.03, 0.12, 0.03, 0.03};

}  // namespace

// ---------------------------------------------------------------------------

void FidelityMap::validate() const {
  if (!(q_max > q_min)) throw std::invalid_argument("fidelity map needs q_max > q_min");
  if (m_min < 1 || m_max <= m_min) throw std::invalid_argument("fidelity map needs 1 <= m_min < m_max");
}

double FidelityMap::position(double q) const {
  if (!contains(q)) {
    throw std::out_of_range("fidelity " + std::to_string(q) + " outside [" + std::to_string(q_min) + ", " +
                            std::to_string(q_max) + "]");
  }
  return (q - q_min) / (q_max - q_min);
}

double fidelity_to_cells(const FidelityMap& map, double q) {
  const double lo = std::pow(static_cast<double>(map.m_min), 3);
  const double hi = std::pow(static_cast<double>(map.m_max), 3);
  return lo + map.position(q) * (hi - lo);
}

Preset parse_preset(std::string_view name) {
  if (name == "kripke") return Preset::kripke;
  if (name == "lulesh") return Preset::lulesh;
  if (name == "clomp") return Preset::clomp;
  if (name == "hypre") return Preset::hypre;
  if (name == "custom") return Preset::custom;
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::string_view preset_name(Preset preset) {
  switch (preset) {
    case Preset::kripke: return "kripke";
    case Preset::lulesh: return "lulesh";
    case Preset::clomp: return "clomp";
    case Preset::hypre: return "hypre";
    case Preset::custom: return "custom";
  }
  return "custom";
}

std::string_view preset_space_text(Preset preset) {
  switch (preset) {
    case Preset::kripke: return kKripkeSpace;
    case Preset::lulesh: return kLuleshSpace;
    case Preset::clomp: return kClompSpace;
    case Preset::hypre: return kHypreSpace;
    case Preset::custom: break;
  }
  throw std::invalid_argument("the custom preset has no built-in space; supply a space file");
}

ConfigSpace preset_space(Preset preset) { return parse_space(preset_space_text(preset)); }

std::size_t preset_listed_size(Preset preset) {
  switch (preset) {
    case Preset::kripke: return 216;
    case Preset::lulesh: return 128;
    case Preset::clomp: return 125;
    case Preset::hypre: return 92160;
    case Preset::custom: return 0;
  }
  return 0;
}

// ---------------------------------------------------------------------------

double SyntheticSurface::Landscape::log_value(std::span<const std::size_t> assignment) const {
  double v = log_scale;
  for (std::size_t p = 0; p < effect.size(); ++p) v += effect[p][assignment[p]];
  for (std::size_t p = 0; p + 1 < effect.size(); ++p) {
    v += interaction[p][assignment[p] * effect[p + 1].size() + assignment[p + 1]];
  }
  return v;
}

namespace {

// Per-parameter effect curves with a planted minimum of 0 at optimum[p]; every
// other value costs at least `gap` (log scale). Interactions are non-negative
// and zero at the optimum pair, so the planted configuration is the unique
// minimizer with a margin of at least `gap`.
void build_landscape(const ConfigSpace& space, const LandscapeShape& shape, double gap,
                     std::vector<std::size_t> optimum, Stream& rng,
                     std::vector<std::vector<double>>& effect, std::vector<std::vector<double>>& interaction) {
  const auto& params = space.parameters();
  const double damping = std::min(1.0, std::sqrt(3.0 / static_cast<double>(params.size())));
  effect.assign(params.size(), {});
  interaction.assign(params.size() > 0 ? params.size() - 1 : 0, {});

  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& def = params[p];
    const std::size_t n = def.arity();
    const double amplitude = damping * rng.uniform(shape.amplitude_lo, shape.amplitude_hi);
    bool ordered = true;
    for (std::size_t v = 0; v < n; ++v) ordered = ordered && def.numeric(v).has_value();
    auto& curve = effect[p];
    curve.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      if (v == optimum[p]) continue;
      double shape_term;
      if (ordered && n > 1) {
        const double distance = std::abs(static_cast<double>(v) - static_cast<double>(optimum[p])) /
                                static_cast<double>(n - 1);
        shape_term = std::pow(distance, 1.5);
      } else {
        shape_term = rng.uniform();
      }
      curve[v] = gap + amplitude * shape_term + shape.jitter * rng.uniform();
    }
  }

  for (std::size_t p = 0; p + 1 < params.size(); ++p) {
    const std::size_t rows = params[p].arity();
    const std::size_t cols = params[p + 1].arity();
    auto& table = interaction[p];
    table.assign(rows * cols, 0.0);
    const double strength = damping * shape.interaction;
    for (std::size_t a = 0; a < rows; ++a) {
      for (std::size_t b = 0; b < cols; ++b) {
        if (a == optimum[p] && b == optimum[p + 1]) continue;
        table[a * cols + b] = strength * rng.uniform();
      }
    }
  }
}

std::vector<std::size_t> pick_optimum(const ConfigSpace& space, Stream& rng,
                                      const std::vector<std::size_t>* avoid_first) {
  const auto& params = space.parameters();
  const auto& dflt = space.default_config().assignment;
  std::vector<std::size_t> optimum(params.size(), 0);
  for (std::size_t p = 0; p < params.size(); ++p) {
    const std::size_t n = params[p].arity();
    if (n == 1) continue;
    std::size_t pick;
    do {
      pick = rng.below(n);
    } while (pick == dflt[p] ||
             (p == 0 && avoid_first && n > 2 && pick == (*avoid_first)[0]));
    optimum[p] = pick;
  }
  return optimum;
}

}  // namespace

SyntheticSurface::SyntheticSurface(ConfigSpace space, std::uint64_t structure_seed, double fidelity_correlation,
                                   FidelityMap fidelity)
    : space_(std::move(space)),
      structure_seed_(structure_seed),
      correlation_(fidelity_correlation),
      fidelity_(fidelity) {
  if (!(correlation_ >= 0.0 && correlation_ <= 1.0))
    throw std::invalid_argument("fidelity_correlation must lie in [0, 1]");
  fidelity_.validate();

  // Keep d tau / d q > 0 everywhere: the drift term must stay below the
  // relative growth of the cell count between q_min and q_max.
  const double ratio = std::pow(static_cast<double>(fidelity_.m_min) / fidelity_.m_max, 3);
  drift_limit_ = (1.0 - correlation_) * std::min(0.3, 0.5 * (1.0 - ratio));
  cells_at_max_ = std::pow(static_cast<double>(fidelity_.m_max), 3);

  Stream rng(structure_seed);
  const double gap = std::log1p(kMinGap);

  time_.optimum = pick_optimum(space_, rng, nullptr);
  build_landscape(space_, kTimeShape, gap, time_.optimum, rng, time_.effect, time_.interaction);
  time_.log_scale = std::log(rng.uniform(1.0, 3.0));

  power_.optimum = pick_optimum(space_, rng, &time_.optimum);
  build_landscape(space_, kPowerShape, std::log1p(0.01), power_.optimum, rng, power_.effect,
                  power_.interaction);
  power_.log_scale = std::log(rng.uniform(4.0, 6.0));

  drift_.assign(space_.dimensions(), {});
  for (std::size_t p = 0; p < space_.dimensions(); ++p) {
    drift_[p].resize(space_.parameters()[p].arity());
    for (auto& d : drift_[p]) d = rng.uniform(-1.0, 1.0);
  }

  time_optimum_ = space_.index_of(time_.optimum);
  power_optimum_ = space_.index_of(power_.optimum);
}

void SyntheticSurface::check_q(double q) const {
  if (!fidelity_.contains(q)) {
    throw std::out_of_range("fidelity " + std::to_string(q) + " outside [" + std::to_string(fidelity_.q_min) +
                            ", " + std::to_string(fidelity_.q_max) + "]");
  }
}

double SyntheticSurface::time(std::span<const std::size_t> assignment, double q) const {
  check_q(q);
  const double scale = fidelity_to_cells(fidelity_, q) / cells_at_max_;
  double h = 0.0;
  for (std::size_t p = 0; p < drift_.size(); ++p) h += drift_[p][assignment[p]];
  h /= static_cast<double>(drift_.size());
  const double drift = drift_limit_ * h * (1.0 - fidelity_.position(q));
  return std::exp(time_.log_value(assignment)) * scale * (1.0 + drift);
}

double SyntheticSurface::power(std::span<const std::size_t> assignment, double q) const {
  check_q(q);
  return std::exp(power_.log_value(assignment)) * (0.85 + 0.15 * fidelity_.position(q));
}

SyntheticSurface make_surface(Preset preset, std::uint64_t structure_seed, double fidelity_correlation) {
  return SyntheticSurface(preset_space(preset), structure_seed, fidelity_correlation);
}

// ---------------------------------------------------------------------------

namespace {

void guard(const SyntheticSurface& surface) {
  if (surface.space().size() > kExhaustiveGuard) {
    throw std::length_error("space of " + std::to_string(surface.space().size()) +
                            " configurations exceeds the exhaustive-scan guard");
  }
}

}  // namespace

OracleResult oracle(const SyntheticSurface& surface, double q, Metric metric, const Weights& w) {
  guard(surface);
  const auto& space = surface.space();

  MinMax time_range, power_range;
  if (metric == Metric::weighted) {
    for (const auto& c : space.enumerate()) {
      time_range.widen(surface.time(c, q));
      power_range.widen(surface.power(c, q));
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (const auto& c : space.enumerate()) {
    double value;
    switch (metric) {
      case Metric::time: value = surface.time(c, q); break;
      case Metric::power: value = surface.power(c, q); break;
      default:
        value = w.alpha * time_range.normalize(surface.time(c, q)) +
                w.beta * power_range.normalize(surface.power(c, q));
        break;
    }
    if (value < best) {
      best = value;
      best_index = c.index;
    }
  }
  return {space.config_at(best_index), best};
}

std::vector<std::size_t> rank_by_time(const SyntheticSurface& surface, double q, std::size_t k) {
  guard(surface);
  const auto& space = surface.space();
  k = std::min(k, space.size());
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;  // max-heap of the k best so far
  for (const auto& c : space.enumerate()) {
    const Entry e{surface.time(c, q), c.index};
    if (heap.size() < k) {
      heap.push(e);
    } else if (k > 0 && e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
  }
  std::vector<std::size_t> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

// ---------------------------------------------------------------------------

ArmMeans::ArmMeans(std::vector<double> means) : arm_count_(means.size()), dense_(std::move(means)) {
  if (dense_.empty()) throw std::invalid_argument("ArmMeans needs at least one arm");
  mu_star_ = *std::max_element(dense_.begin(), dense_.end());
}

ArmMeans::ArmMeans(std::size_t arm_count, double mu_star, std::function<double(std::size_t)> mean)
    : arm_count_(arm_count), mu_star_(mu_star), fn_(std::move(mean)) {}

double ArmMeans::mean(std::size_t arm) const {
  if (arm >= arm_count_) throw std::out_of_range("no true mean for arm " + std::to_string(arm));
  return fn_ ? fn_(arm) : dense_[arm];
}

ArmMeans reward_means(const SyntheticSurface& surface, double q, const Weights& w) {
  guard(surface);
  const auto& space = surface.space();
  MinMax time_range, power_range;
  for (const auto& c : space.enumerate()) {
    time_range.widen(surface.time(c, q));
    power_range.widen(surface.power(c, q));
  }
  auto mean_of = [surface, q, w, time_range, power_range](std::size_t index) {
    const auto c = surface.space().config_at(index);
    return reward_from_means(time_range.normalize(surface.time(c, q)),
                             power_range.normalize(surface.power(c, q)), w);
  };
  if (space.size() <= 1'000'000) {
    std::vector<double> dense(space.size());
    for (const auto& c : space.enumerate()) {
      dense[c.index] = reward_from_means(time_range.normalize(surface.time(c, q)),
                                         power_range.normalize(surface.power(c, q)), w);
    }
    return ArmMeans(std::move(dense));
  }
  double mu_star = -std::numeric_limits<double>::infinity();
  for (const auto& c : space.enumerate()) {
    mu_star = std::max(mu_star, reward_from_means(time_range.normalize(surface.time(c, q)),
                                                  power_range.normalize(surface.power(c, q)), w));
  }
  return ArmMeans(space.size(), mu_star, mean_of);
}

}  // namespace lasp
