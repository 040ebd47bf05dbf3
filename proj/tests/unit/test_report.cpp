// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include <doctest.h>

#include <cstdlib>
#include <limits>

#include "helpers.hpp"
#include "lasp/executor.hpp"
#include "lasp/report.hpp"

using namespace lasp;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  SyntheticSurface surface = make_surface(Preset::kripke, 1, 0.8);
  TuneReport report;
  RegretCurve regret;
  BoundTerms bound;

  explicit Fixture(std::uint64_t seed = 42) {
    const NoiseSpec noise{0.05, seed};
    const Evaluator e = [&](const Configuration& c, std::size_t t) { return evaluate_surface(surface, c, 1.0, noise, t); };
    report = run(surface.space(), e, Weights{}, 300, seed);
    const auto means = reward_means(surface, 1.0, Weights{});
    regret = regret_curve(report.trace, means);
    bound = bound_terms(means);
  }

  ReportArtifacts artifacts() const {
    ReportArtifacts a;
    a.space = &surface.space();
    a.report = &report;
    a.regret = regret;
    a.bound = bound;
    a.gain = performance_gain(surface.time(surface.space().default_config(), 1.0), surface.time(report.x_opt, 1.0));
    return a;
  }
};

}  // namespace

TEST_CASE("real formatting") {
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0 / 3.0) == "0.333333333");
  CHECK(format_real(123456789012.0) == "1.23456789e+11");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("precision override") {
  setenv("LASP_OUTPUT_PRECISION", "4", 1);
  CHECK(format_real(1.0 / 3.0) == "0.3333");
  unsetenv("LASP_OUTPUT_PRECISION");
  CHECK(format_real(1.0 / 3.0) == "0.333333333");
}

TEST_CASE("tables render as CSV and JSON with the same fields") {
  Table t;
  t.columns = {"name", "value", "count"};
  t.rows.push_back({std::string("a"), 0.5, std::int64_t{3}});
  CHECK(t.to_csv() == "name,value,count\na,0.5,3\n");
  const std::string json = t.to_json();
  CHECK(json.find("\"name\"") != std::string::npos);
  CHECK(json.find("\"count\"") != std::string::npos);
  CHECK(json.find("0.5") != std::string::npos);
}

TEST_CASE("emitted report files") {
  const Fixture f;
  const auto dir = test::scratch_dir("emit");
  const auto names = emit_report(f.artifacts(), dir);
  CHECK(names == std::vector<std::string>{"trace.csv", "regret.csv", "gain.txt", "heatmap.csv", "report.txt"});
  for (const auto& n : names) CHECK(fs::exists(dir / n));

  const auto trace = test::slurp(dir / "trace.csv");
  CHECK(trace.rfind("t,arm_index,config,raw_time_s,raw_power_w,reward,ucb_chosen\n", 0) == 0);
  CHECK(test::line_count(trace) == 301);
  const auto regret = test::slurp(dir / "regret.csv");
  CHECK(regret.rfind("t,cumulative_regret,bound\n", 0) == 0);
  CHECK(test::line_count(regret) == 301);
  CHECK(test::slurp(dir / "heatmap.csv").rfind("p1_value,p2_value,selection_count\n", 0) == 0);
  CHECK(test::line_count(test::slurp(dir / "heatmap.csv")) == 37);
  CHECK(test::slurp(dir / "gain.txt").find("pg_best=") != std::string::npos);

  const auto report = test::slurp(dir / "report.txt");
  CHECK(report.find("x_opt_index=" + std::to_string(f.report.x_opt.index) + "\n") != std::string::npos);
  CHECK(report.size() >= 16);
  CHECK(report.substr(report.size() - 16) == "status=complete\n");
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().extension() != ".partial");
}

TEST_CASE("heatmap counts add up to the round budget") {
  const Fixture f;
  const auto table = heatmap_table(f.surface.space(), f.report);
  std::int64_t total = 0;
  for (const auto& row : table.rows) total += std::get<std::int64_t>(row[2]);
  CHECK(total == 300);
}

TEST_CASE("re-emitting gives identical bytes") {
  const auto a = test::scratch_dir("emit_a");
  const auto b = test::scratch_dir("emit_b");
  emit_report(Fixture(7).artifacts(), a);
  emit_report(Fixture(7).artifacts(), b);
  emit_report(Fixture(7).artifacts(), b);
  for (const auto& entry : fs::directory_iterator(a))
    CHECK(test::slurp(entry.path()) == test::slurp(b / entry.path().filename()));
}

TEST_CASE("json reports") {
  const Fixture f;
  const auto dir = test::scratch_dir("emit_json");
  const auto names = emit_report(f.artifacts(), dir, Format::json);
  CHECK(names.back() == "report.json");
  CHECK(test::slurp(dir / "report.json").find("\"status\": \"complete\"") != std::string::npos);
  CHECK(test::slurp(dir / "trace.json").find("\"ucb_chosen\"") != std::string::npos);
}

TEST_CASE("an empty output path is refused before anything is written") {
  const Fixture f;
  CHECK_THROWS_AS(emit_report(f.artifacts(), ""), ReportError);
  CHECK_THROWS_AS(write_outputs("", {{"x.txt", "x"}}), ReportError);
}

TEST_CASE("an unwritable output path is reported with its name") {
  const auto dir = test::scratch_dir("blocked");
  std::ofstream(dir / "file") << "x";
  try {
    write_outputs(dir / "file" / "sub", {{"x.txt", "x"}});
    FAIL("expected ReportError");
  } catch (const ReportError& e) {
    CHECK(std::string(e.what()).find("file") != std::string::npos);
  }
}

TEST_CASE("trace and dump round trips") {
  const Fixture f;
  const auto dir = test::scratch_dir("roundtrip");
  write_outputs(dir, {{"trace.csv", trace_table(f.surface.space(), f.report.trace).to_csv()},
                      {"surface.csv", dump_table(f.surface, 0.5).to_csv()}});
  const auto trace = read_trace_csv(dir / "trace.csv");
  REQUIRE(trace.size() == f.report.trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(trace[i].t == f.report.trace[i].t);
    CHECK(trace[i].arm == f.report.trace[i].arm);
    CHECK(trace[i].raw_time == doctest::Approx(f.report.trace[i].raw_time).epsilon(1e-8));
  }
  const auto dump = read_dump_csv(dir / "surface.csv");
  REQUIRE(dump.size() == 216);
  CHECK(dump[5].config_index == 5);
  CHECK(dump[5].assignment == f.surface.space().describe(f.surface.space().config_at(5)));
  CHECK(dump[5].q == 0.5);
  CHECK(dump[5].time == doctest::Approx(f.surface.time(f.surface.space().config_at(5), 0.5)).epsilon(1e-8));
  CHECK_THROWS_AS(read_trace_csv(dir / "surface.csv"), ReportError);
  CHECK_THROWS_AS(read_trace_csv(dir / "missing.csv"), ReportError);
}
