// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "helpers.hpp"
#include "lasp/bandit.hpp"
#include "lasp/executor.hpp"
#include "lasp/surfaces.hpp"

using namespace lasp;

namespace {

Sample measured(double time, double power) {
  Sample s;
  s.exec_time = time;
  s.power = power;
  return s;
}

// Deterministic evaluator over explicit per-arm times and powers.
Evaluator table_evaluator(std::vector<double> times, std::vector<double> powers) {
  return [times = std::move(times), powers = std::move(powers)](const Configuration& c, std::size_t) {
    return measured(times[c.index], powers[c.index]);
  };
}

std::vector<std::size_t> arm_sequence(const TuneReport& r) {
  std::vector<std::size_t> arms;
  for (const auto& rec : r.trace) arms.push_back(rec.arm);
  return arms;
}

}  // namespace

TEST_CASE("weights must lie in the unit interval") {
  CHECK_NOTHROW(Weights(0.0, 1.0));
  CHECK_THROWS_AS(Weights(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Weights(0.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(Weights(std::nan(""), 0.5), std::invalid_argument);
  const Weights w;
  CHECK(w.alpha == 0.8);
  CHECK(w.beta == 0.2);
}

TEST_CASE("normalize examples") {
  MinMax r;
  r.widen(2);
  r.widen(6);
  const std::vector<double> in{2, 4, 6};
  CHECK(normalize(in, r) == std::vector<double>{0.0, 0.5, 1.0});
  const std::vector<double> one{3};
  CHECK(normalize(one, r) == std::vector<double>{0.25});

  MinMax flat;
  flat.widen(5);
  const std::vector<double> fives{5, 5, 5};
  CHECK(normalize(fives, flat) == std::vector<double>{0, 0, 0});
  CHECK(normalize(std::vector<double>{}, r).empty());
}

TEST_CASE("normalized values stay within [0, 1]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(1 + rng() % 30);
    MinMax r;
    for (auto& x : xs) r.widen(x = dist(rng));
    for (double v : normalize(xs, r)) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
  }
}

TEST_CASE("reward examples") {
  CHECK(reward_from_means(0.5, 0.25, Weights(0.8, 0.2)) == doctest::Approx(2.4).epsilon(1e-15));
  CHECK(reward_from_means(1.0, 0.0, Weights(1.0, 0.0)) == 1.0);
  CHECK(reward_from_means(0.0, 1.0, Weights(0.8, 0.2)) == doctest::Approx(0.8e6 + 0.2).epsilon(1e-15));
}

TEST_CASE("reward from stored samples under the global range") {
  ArmStats arm;
  arm.pulls = 2;
  arm.time_samples = {3.0, 5.0};
  arm.power_samples = {4.0, 4.0};
  arm.time_sum = 8.0;
  arm.power_sum = 8.0;
  MinMax tr, pr;
  tr.widen(2.0);
  tr.widen(6.0);
  pr.widen(3.0);
  pr.widen(5.0);
  // Normalized time mean (0.25 + 0.75) / 2 = 0.5, normalized power mean 0.5.
  CHECK(reward(arm, Weights(0.8, 0.2), tr, pr) == doctest::Approx(2.0));
  CHECK_THROWS_AS(reward(ArmStats{}, Weights{}, tr, pr), std::logic_error);
}

TEST_CASE("reward is strictly decreasing in each normalized mean") {
  const Weights w(0.6, 0.4);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double t1 = u(rng), p1 = u(rng);
    const double t2 = t1 * u(rng), p2 = p1 * u(rng);
    if (t2 >= t1 || p2 >= p1) continue;
    REQUIRE(reward_from_means(t2, p2, w) > reward_from_means(t1, p1, w));
  }
}

TEST_CASE("ucb examples") {
  CHECK(ucb_value(0.7, 1, 1) == 0.7);
  CHECK(std::abs(ucb_value(0.5, 8, 4) - (0.5 + std::sqrt(2.0 * std::log(8.0) / 4.0))) < 1e-9);
  CHECK(ucb_value(0.5, 8, 4) == doctest::Approx(1.51967).epsilon(1e-5));
  CHECK(std::isinf(ucb_value(0.5, 3, 0)));
  CHECK(std::isinf(ucb_value(ArmStats{}, 5, Weights{}, MinMax{}, MinMax{})));
}

TEST_CASE("uniform_below is unbiased and in range") {
  std::mt19937_64 rng(1);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) {
    const auto v = uniform_below(rng, 3);
    REQUIRE(v < 3);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 3 * 82);  // 3 sigma
  CHECK_THROWS(uniform_below(rng, 0));
}

TEST_CASE("cold start picks reproducibly among unpulled arms") {
  BanditState a(3, 42);
  BanditState b(3, 42);
  const auto sa = a.select(Weights{});
  const auto sb = b.select(Weights{});
  CHECK(sa.arm == sb.arm);
  CHECK(sa.arm < 3);
  CHECK(std::isinf(sa.ucb));
}

TEST_CASE("strict argmax among warm arms") {
  BanditState state(2, 1);
  state.update(0, measured(1.0, 1.0));
  state.update(1, measured(2.0, 1.0));
  // Arm 0 has normalized time 0 and the reward ceiling; arm 1 is at the worst end.
  const auto s = state.select(Weights(1.0, 0.0));
  CHECK(s.arm == 0);
  CHECK(s.ucb > state.ucb(1, Weights(1.0, 0.0)));
}

TEST_CASE("ties split evenly") {
  BanditState state(2, 2024);
  state.update(0, measured(1.0, 1.0));
  state.update(1, measured(1.0, 1.0));
  const int draws = 10000;
  int zeros = 0;
  for (int i = 0; i < draws; ++i) zeros += state.select(Weights{}).arm == 0;
  CHECK(std::abs(zeros - draws / 2) <= 150);  // 3 sigma of Binomial(1e4, 0.5)
}

TEST_CASE("update bookkeeping") {
  BanditState state(4, 0);
  CHECK(state.t() == 1);
  state.update(2, measured(3.2, 4.1));
  CHECK(state.pulls(2) == 1);
  CHECK(state.time_range().min == 3.2);
  CHECK(state.time_range().max == 3.2);
  CHECK(state.power_range().min == 4.1);
  CHECK(state.power_range().max == 4.1);
  CHECK(state.t() == 2);

  state.update(1, measured(5.0, 4.1));
  CHECK(state.time_range().min == 3.2);
  CHECK(state.time_range().max == 5.0);

  CHECK_THROWS_AS(state.update(1, measured(-1.0, 4.0)), MeasurementError);
  CHECK_THROWS_AS(state.update(1, measured(1.0, std::numeric_limits<double>::infinity())), MeasurementError);
  CHECK_THROWS_AS(state.update(1, measured(std::nan(""), 1.0)), MeasurementError);
  CHECK(state.pulls(1) == 1);
  CHECK(state.t() == 3);
  CHECK(state.time_range().max == 5.0);
  CHECK(state.arm(1).time_samples.size() == 1);
}

TEST_CASE("pull counts match sample histories") {
  const auto space = test::grid_space({7});
  const auto report = run(space, table_evaluator({1, 2, 3, 4, 5, 6, 7}, {2, 2, 2, 2, 2, 2, 2}), Weights(1, 0), 60, 3);
  BanditState replay(7, 3);
  for (const auto& rec : report.trace) replay.update(rec.arm, measured(rec.raw_time, rec.raw_power));
  for (std::size_t a = 0; a < 7; ++a) {
    CHECK(replay.arm(a).pulls == replay.arm(a).time_samples.size());
    CHECK(replay.arm(a).pulls == replay.arm(a).power_samples.size());
  }
}

TEST_CASE("a single arm is pulled every round") {
  const auto space = test::grid_space({1});
  const auto report = run(space, table_evaluator({1.0}, {1.0}), Weights{}, 10, 0);
  CHECK(report.x_opt.index == 0);
  CHECK(report.count(0) == 10);
  CHECK(report.trace.size() == 10);
}

TEST_CASE("the faster of two arms wins") {
  const auto space = test::grid_space({2});
  const auto report = run(space, table_evaluator({1.0, 2.0}, {3.0, 3.0}), Weights(1, 0), 100, 7);
  CHECK(report.x_opt.index == 0);
  CHECK(report.count(0) > report.count(1));
}

TEST_CASE("run rejects zero rounds") {
  const auto space = test::grid_space({2});
  CHECK_THROWS_AS(run(space, table_evaluator({1, 2}, {1, 1}), Weights{}, 0, 0), std::invalid_argument);
}

TEST_CASE("evaluator failure aborts with the completed rounds") {
  const auto space = test::grid_space({5});
  const Evaluator flaky = [](const Configuration&, std::size_t t) {
    if (t == 4) throw std::runtime_error("boom");
    return measured(1.0, 1.0);
  };
  try {
    run(space, flaky, Weights{}, 10, 0);
    FAIL("expected RunAborted");
  } catch (const RunAborted& e) {
    CHECK(e.completed().size() == 3);
    CHECK(e.completed().back().t == 3);
    CHECK_THROWS_AS(std::rethrow_exception(e.cause()), std::runtime_error);
  }
}

TEST_CASE("x_opt ties go to the lowest index") {
  // Two identical arms and two rounds: each is pulled once.
  const auto space = test::grid_space({2});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto report = run(space, table_evaluator({1, 1}, {1, 1}), Weights{}, 2, seed);
    CHECK(report.x_opt.index == 0);
  }
}

TEST_CASE("expected total reward") {
  std::vector<std::vector<TraceRecord>> one{{TraceRecord{1, 0, 0.5}, TraceRecord{2, 0, 0.5}}};
  CHECK(expected_total_reward(one) == 1.0);
  std::vector<std::vector<TraceRecord>> two{{TraceRecord{1, 0, 1.0}}, {TraceRecord{1, 0, 1.0}, TraceRecord{2, 0, 2.0}}};
  CHECK(expected_total_reward(two) == 2.0);
  CHECK_THROWS(expected_total_reward(std::span<const std::vector<TraceRecord>>{}));
}

TEST_CASE("expected total reward is stable under re-runs") {
  const auto surface = make_surface(Preset::clomp, 1, 0.8);
  auto replicate = [&] {
    std::vector<std::vector<TraceRecord>> traces;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const NoiseSpec noise{0.1, s};
      const Evaluator e = [&](const Configuration& c, std::size_t t) { return evaluate_surface(surface, c, 1.0, noise, t); };
      traces.push_back(run(surface.space(), e, Weights{}, 200, s).trace);
    }
    return expected_total_reward(traces);
  };
  const double a = replicate();
  const double b = replicate();
  CHECK(std::abs(a - b) <= 0.01 * std::abs(a));
}

// --- properties ------------------------------------------------------------

TEST_CASE("selection is invariant to increasing affine maps of the measurements") {
  const auto space = test::grid_space({12});
  std::vector<double> times, powers;
  for (int i = 0; i < 12; ++i) {
    times.push_back(10 + (i * 7) % 12);
    powers.push_back(3 + (i * 5) % 12);
  }
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto base = run(space, table_evaluator(times, powers), Weights(0.6, 0.4), 300, seed);
    std::vector<double> t2, p2;
    for (double v : times) t2.push_back(3 * v + 5);
    for (double v : powers) p2.push_back(0.5 * v + 100);
    const auto mapped = run(space, table_evaluator(t2, p2), Weights(0.6, 0.4), 300, seed);
    CHECK(arm_sequence(base) == arm_sequence(mapped));
    CHECK(base.x_opt == mapped.x_opt);
  }

  const auto surface = make_surface(Preset::kripke, 1, 0.8);
  const Evaluator plain = [&](const Configuration& c, std::size_t) {
    return measured(surface.time(c, 1.0), surface.power(c, 1.0));
  };
  const Evaluator scaled = [&](const Configuration& c, std::size_t) {
    return measured(4.0 * surface.time(c, 1.0), 0.25 * surface.power(c, 1.0));
  };
  CHECK(arm_sequence(run(surface.space(), plain, Weights{}, 500, 9)) ==
        arm_sequence(run(surface.space(), scaled, Weights{}, 500, 9)));
}

TEST_CASE("pull counts sum to the round budget") {
  const auto surface = make_surface(Preset::lulesh, 2, 0.8);
  for (std::size_t T : {1u, 37u, 120u, 500u}) {
    const NoiseSpec noise{0.05, T};
    const Evaluator e = [&](const Configuration& c, std::size_t t) { return evaluate_surface(surface, c, 0.5, noise, t); };
    const auto report = run(surface.space(), e, Weights{}, T, T);
    std::size_t total = 0;
    for (const auto& [arm, n] : report.final_counts) total += n;
    CHECK(total == T);
    CHECK(report.trace.size() == T);
    for (std::size_t i = 0; i < report.trace.size(); ++i) CHECK(report.trace[i].t == i + 1);
  }
}

TEST_CASE("no arm repeats while any arm is unpulled") {
  const auto surface = make_surface(Preset::kripke, 3, 0.8);
  const Evaluator e = [&](const Configuration& c, std::size_t) { return measured(surface.time(c, 1), surface.power(c, 1)); };
  const auto report = run(surface.space(), e, Weights{}, 400, 11);
  std::set<std::size_t> first;
  for (std::size_t i = 0; i < 216; ++i) {
    first.insert(report.trace[i].arm);
    CHECK(std::isinf(report.trace[i].ucb));
  }
  CHECK(first.size() == 216);
  for (std::size_t i = 216; i < report.trace.size(); ++i) CHECK(std::isfinite(report.trace[i].ucb));
}

TEST_CASE("a budget smaller than the space pulls distinct arms") {
  const auto surface = make_surface(Preset::hypre, 1, 0.8);
  const Evaluator e = [&](const Configuration& c, std::size_t) { return measured(surface.time(c, 1), surface.power(c, 1)); };
  const auto report = run(surface.space(), e, Weights{}, 500, 4);
  std::set<std::size_t> arms;
  for (const auto& rec : report.trace) arms.insert(rec.arm);
  CHECK(arms.size() == 500);
  CHECK(report.final_counts.size() == 500);
}

TEST_CASE("the fastest arm collects the most pulls") {
  std::mt19937_64 rng(77);
  for (std::size_t K = 2; K <= 10; ++K) {
    std::vector<double> times(K);
    double v = 1.0;
    for (auto& t : times) t = (v *= 1.1 + 0.2 * std::uniform_real_distribution<double>()(rng));
    std::shuffle(times.begin(), times.end(), rng);
    const std::size_t fastest = std::min_element(times.begin(), times.end()) - times.begin();
    const auto space = test::grid_space({K});
    const auto report = run(space, table_evaluator(times, std::vector<double>(K, 2.0)), Weights(1, 0), 50 * K, K);
    CHECK(report.x_opt.index == fastest);
    for (const auto& [arm, n] : report.final_counts)
      if (arm != fastest) CHECK(n < report.count(fastest));
  }
}

TEST_CASE("identical settings give identical reports") {
  const auto surface = make_surface(Preset::kripke, 1, 0.8);
  auto once = [&] {
    const NoiseSpec noise{0.15, 5};
    const Evaluator e = [&](const Configuration& c, std::size_t t) { return evaluate_surface(surface, c, 1.0, noise, t); };
    return run(surface.space(), e, Weights{}, 500, 5);
  };
  const auto a = once();
  const auto b = once();
  CHECK(a.x_opt == b.x_opt);
  CHECK(a.final_counts == b.final_counts);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].arm == b.trace[i].arm);
    CHECK(a.trace[i].reward == b.trace[i].reward);
    CHECK(a.trace[i].raw_time == b.trace[i].raw_time);
  }
}
