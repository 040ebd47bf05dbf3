// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include "lasp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "lasp/analysis.hpp"
#include "lasp/bandit.hpp"
#include "lasp/executor.hpp"
#include "lasp/report.hpp"
#include "lasp/space.hpp"
#include "lasp/surfaces.hpp"

namespace fs = std::filesystem;

namespace lasp::cli {

void RunSettings::validate() const {
  if (preset.empty() == space_file.empty()) throw std::invalid_argument("give exactly one of --preset or --space");
  if (iterations < 1) throw std::invalid_argument("-T must be at least 1");
  (void)Weights(alpha, beta);
  if (replications && *replications < 1) throw std::invalid_argument("--replications must be at least 1");
  NoiseSpec{noise_level, seed, noise_on_time, noise_on_power}.validate();
  if (!(fidelity_correlation >= 0.0 && fidelity_correlation <= 1.0))
    throw std::invalid_argument("--correlation must lie in [0, 1]");
  if (output_dir.empty()) throw std::invalid_argument("-o must not be empty");
  (void)parse_format(format);
}

std::size_t RunSettings::replication_count() const {
  if (replications) return *replications;
  return mode == Mode::surface ? 100 : 1;
}

namespace {

// Problem source shared by every subcommand: a preset or a space file, and the
// synthetic surface built over it.
struct Problem {
  std::string label;
  std::unique_ptr<ConfigSpace> space;
  std::map<std::string, std::string> command;
  std::unique_ptr<SyntheticSurface> surface;
};

struct SourceOptions {
  std::string preset;
  std::string space_file;
  std::uint64_t structure_seed = 1;
  double correlation = 0.8;
};

void add_source_options(CLI::App& app, SourceOptions& src) {
  app.add_option("--preset", src.preset, "Built-in search space: kripke, lulesh, clomp, hypre");
  app.add_option("--space", src.space_file, "Space file");
  app.add_option("--structure-seed", src.structure_seed, "Seed of the synthetic surface")->capture_default_str();
  app.add_option("--correlation", src.correlation, "Agreement between low and high fidelity, in [0, 1]")
      ->capture_default_str();
}

Problem load_problem(const SourceOptions& src, std::ostream& err, bool need_surface = true) {
  if (src.preset.empty() == src.space_file.empty())
    throw std::invalid_argument("give exactly one of --preset or --space");
  if (!(src.correlation >= 0.0 && src.correlation <= 1.0))
    throw std::invalid_argument("--correlation must lie in [0, 1]");
  Problem problem;
  if (!src.preset.empty()) {
    const Preset preset = parse_preset(src.preset);
    if (preset == Preset::custom) throw std::invalid_argument("'custom' is not a preset; use --space");
    problem.label = std::string(preset_name(preset));
    problem.space = std::make_unique<ConfigSpace>(preset_space(preset));
    const std::size_t listed = preset_listed_size(preset);
    if (listed != problem.space->size()) {
      err << "warning: " << problem.label << " is listed with " << listed
          << " configurations; its parameter ranges give " << problem.space->size() << "\n";
    }
  } else {
    SpaceFile file = load_space_file(src.space_file);
    problem.label = src.space_file;
    problem.space = std::make_unique<ConfigSpace>(std::move(file.space));
    problem.command = std::move(file.command);
  }
  if (need_surface) {
    problem.surface = std::make_unique<SyntheticSurface>(*problem.space, src.structure_seed, src.correlation);
  }
  return problem;
}

double resolve_fidelity(const std::optional<double>& q, const Problem& problem) {
  const FidelityMap& map = problem.surface ? problem.surface->fidelity() : FidelityMap{};
  const double value = q.value_or(map.q_max);
  if (!map.contains(value)) {
    throw std::invalid_argument("-q must lie in [" + format_real(map.q_min) + ", " + format_real(map.q_max) + "]");
  }
  return value;
}

Mode parse_mode(const std::string& text) {
  if (text == "surface") return Mode::surface;
  if (text == "command") return Mode::command;
  throw std::invalid_argument("--mode must be 'surface' or 'command'");
}

Metric parse_metric(const std::string& text) {
  if (text == "time") return Metric::time;
  if (text == "power") return Metric::power;
  throw std::invalid_argument("--metric must be 'time' or 'power'");
}

const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::time: return "time";
    case Metric::power: return "power";
    case Metric::weighted: return "weighted";
  }
  return "time";
}

double true_value(const SyntheticSurface& surface, const Configuration& config, double q, Metric metric) {
  return metric == Metric::power ? surface.power(config, q) : surface.time(config, q);
}

std::string table_name(const std::string& stem, Format format) {
  return stem + (format == Format::csv ? ".csv" : ".json");
}

std::string text_name(const std::string& stem, Format format) {
  return stem + (format == Format::csv ? ".txt" : ".json");
}

// Most-pulled arm of a trace; ties go to the lowest index.
std::size_t most_pulled(std::span<const TraceRecord> trace) {
  if (trace.empty()) throw std::invalid_argument("trace is empty");
  std::map<std::size_t, std::size_t> counts;
  for (const auto& rec : trace) ++counts[rec.arm];
  std::size_t best = 0;
  std::size_t best_count = 0;
  for (const auto& [arm, n] : counts) {
    if (n > best_count) {
      best = arm;
      best_count = n;
    }
  }
  return best;
}

std::optional<double> empirical_mean(std::span<const TraceRecord> trace, std::size_t arm, Metric metric) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& rec : trace) {
    if (rec.arm != arm) continue;
    sum += metric == Metric::power ? rec.raw_power : rec.raw_time;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

void check_trace_fits(std::span<const TraceRecord> trace, const ConfigSpace& space) {
  for (const auto& rec : trace) {
    if (rec.arm >= space.size()) {
      throw std::invalid_argument("trace arm " + std::to_string(rec.arm) + " is outside the space (size " +
                                  std::to_string(space.size()) + ")");
    }
  }
}

void remove_stale_reports(const fs::path& dir) {
  std::error_code ec;
  fs::remove(dir / "report.txt", ec);
  fs::remove(dir / "report.json", ec);
}

// ---------------------------------------------------------------------------
// tune

struct TuneOptions {
  SourceOptions source;
  std::string mode = "surface";
  std::size_t iterations = 500;
  double alpha = 0.8;
  double beta = 0.2;
  std::uint64_t seed = 42;
  double noise = 0.0;
  std::string noise_on = "both";
  std::optional<double> fidelity;
  std::optional<std::size_t> replications;
  std::string output_dir = "lasp_out";
  std::string format = "csv";
  std::string probe;
  unsigned threads = 0;
};

RunSettings to_settings(const TuneOptions& o) {
  RunSettings s;
  s.preset = o.source.preset;
  s.space_file = o.source.space_file;
  s.mode = parse_mode(o.mode);
  s.iterations = o.iterations;
  s.alpha = o.alpha;
  s.beta = o.beta;
  s.seed = o.seed;
  s.noise_level = o.noise;
  if (o.noise_on == "time") {
    s.noise_on_power = false;
  } else if (o.noise_on == "power") {
    s.noise_on_time = false;
  } else if (o.noise_on != "both") {
    throw std::invalid_argument("--noise-on must be 'time', 'power' or 'both'");
  }
  s.fidelity = o.fidelity;
  s.structure_seed = o.source.structure_seed;
  s.fidelity_correlation = o.source.correlation;
  s.output_dir = o.output_dir;
  s.replications = o.replications;
  s.probe = o.probe;
  s.format = o.format;
  s.threads = o.threads;
  s.validate();
  return s;
}

std::vector<TuneReport> run_replications(std::size_t count, unsigned threads,
                                         const std::function<TuneReport(std::size_t)>& one) {
  std::vector<TuneReport> reports(count);
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) reports[i] = one(i);
    return reports;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) reports[i] = one(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return reports;
}

// Per-round minimum, mean and best-run regret across replications.
Table envelope_table(std::span<const RegretCurve> curves, const BoundTerms& bound) {
  Table table;
  table.columns = {"t", "min_envelope", "best_run", "mean", "bound"};
  if (curves.empty()) return table;
  std::size_t best = 0;
  for (std::size_t i = 1; i < curves.size(); ++i)
    if (curves[i].final_regret() < curves[best].final_regret()) best = i;
  const auto mean = mean_curve(curves);
  for (std::size_t t = 0; t < mean.size(); ++t) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& c : curves) lo = std::min(lo, c.cumulative[t]);
    table.rows.push_back({static_cast<std::int64_t>(t + 1), lo, curves[best].cumulative[t], mean[t],
                          bound.at(t + 1)});
  }
  return table;
}

int cmd_tune(const TuneOptions& options, std::ostream& out, std::ostream& err) {
  const RunSettings settings = to_settings(options);
  const Format format = parse_format(settings.format);
  const Weights weights(settings.alpha, settings.beta);
  const std::size_t reps = settings.replication_count();
  const Metric gain_metric = weights.alpha >= weights.beta ? Metric::time : Metric::power;
  const fs::path dir = settings.output_dir;

  Problem problem = load_problem(options.source, err, settings.mode == Mode::surface);
  const ConfigSpace& space = *problem.space;

  std::vector<TuneReport> reports;
  ReportArtifacts artifacts;
  artifacts.space = &space;
  artifacts.gain_metric = metric_name(gain_metric);
  std::vector<OutputFile> extra;

  if (settings.mode == Mode::surface) {
    const SyntheticSurface& surface = *problem.surface;
    const double q = resolve_fidelity(settings.fidelity, problem);
    reports = run_replications(reps, settings.threads, [&](std::size_t i) {
      const std::uint64_t seed = settings.seed + i;
      const NoiseSpec noise{settings.noise_level, seed, settings.noise_on_time, settings.noise_on_power};
      const Evaluator evaluate = [&](const Configuration& c, std::size_t t) {
        return evaluate_surface(surface, c, q, noise, t);
      };
      TuneReport report = run(space, evaluate, weights, settings.iterations, seed);
      report.settings.noise_level = settings.noise_level;
      return report;
    });

    const OracleResult best = oracle(surface, q, gain_metric, weights);
    const double f_default = true_value(surface, space.default_config(), q, gain_metric);
    const ArmMeans means = reward_means(surface, q, weights);
    const BoundTerms bound = bound_terms(means);

    std::vector<RegretCurve> curves;
    Table replications;
    replications.columns = {"seed", "x_opt_index", "x_opt", "distance_from_oracle", "pg_best", "final_regret"};
    Table runs;
    runs.columns = {"seed", "t", "cumulative_regret"};
    for (const auto& r : reports) {
      curves.push_back(regret_curve(r.trace, means));
      const double f_best = true_value(surface, r.x_opt, q, gain_metric);
      replications.rows.push_back({static_cast<std::int64_t>(r.settings.seed), static_cast<std::int64_t>(r.x_opt.index),
                                   space.describe(r.x_opt), distance_from_oracle(f_best, best.value),
                                   performance_gain(f_default, f_best).pg_best, curves.back().final_regret()});
      for (std::size_t t = 0; t < curves.back().cumulative.size(); ++t) {
        runs.rows.push_back({static_cast<std::int64_t>(r.settings.seed), static_cast<std::int64_t>(t + 1),
                             curves.back().cumulative[t]});
      }
    }
    extra.push_back({table_name("replications", format), replications.render(format)});
    extra.push_back({table_name("regret_runs", format), runs.render(format)});
    extra.push_back({table_name("regret_envelope", format), envelope_table(curves, bound).render(format)});

    artifacts.report = &reports.front();
    artifacts.regret = curves.front();
    artifacts.bound = bound;
    artifacts.gain = performance_gain(f_default, true_value(surface, reports.front().x_opt, q, gain_metric));

    out << "oracle_distance_pct=" << format_real(distance_from_oracle(
                                          true_value(surface, reports.front().x_opt, q, gain_metric), best.value))
        << "\n";
  } else {
    if (problem.command.empty()) throw ContractError("command mode needs a [command] section in the space file");
    const CommandSpec command = command_from_section(problem.command);
    (void)substitute(command.command_template, space, space.default_config());
    std::string probe_spec = settings.probe;
    if (probe_spec.empty()) {
      auto it = problem.command.find("probe");
      probe_spec = it != problem.command.end() ? it->second : "constant:1";
    }
    const auto probe = make_probe(probe_spec);
    // Measurements on one device interfere with each other, so replications run one after another.
    for (std::size_t i = 0; i < reps; ++i) {
      const std::uint64_t seed = settings.seed + i;
      const NoiseSpec noise{settings.noise_level, seed, settings.noise_on_time, settings.noise_on_power};
      const Evaluator evaluate = [&](const Configuration& c, std::size_t t) {
        return evaluate_command(command, space, c, *probe, noise, t);
      };
      try {
        reports.push_back(run(space, evaluate, weights, settings.iterations, seed));
      } catch (const RunAborted& e) {
        remove_stale_reports(dir);
        write_outputs(dir, {{"trace_partial.csv", trace_table(space, e.completed()).to_csv()}});
        err << "error: " << e.what() << "\n";
        err << "partial trace (" << e.completed().size() << " rounds) written to "
            << (dir / "trace_partial.csv").string() << "\n";
        return kExitExecution;
      }
      reports.back().settings.noise_level = settings.noise_level;
    }

    Table replications;
    replications.columns = {"seed", "x_opt_index", "x_opt", "x_opt_count"};
    for (const auto& r : reports) {
      replications.rows.push_back({static_cast<std::int64_t>(r.settings.seed), static_cast<std::int64_t>(r.x_opt.index),
                                   space.describe(r.x_opt), static_cast<std::int64_t>(r.count(r.x_opt.index))});
    }
    extra.push_back({table_name("replications", format), replications.render(format)});

    artifacts.report = &reports.front();
    const auto& trace = reports.front().trace;
    const auto f_default = empirical_mean(trace, space.default_config().index, gain_metric);
    const auto f_best = empirical_mean(trace, reports.front().x_opt.index, gain_metric);
    if (f_default && f_best) {
      artifacts.gain = performance_gain(*f_default, *f_best);
    } else {
      err << "note: the default configuration was never run; no gain report\n";
    }
  }

  auto files = render_report(artifacts, format);
  OutputFile report_file = std::move(files.back());
  files.pop_back();
  for (auto& f : extra) files.push_back(std::move(f));
  files.push_back(std::move(report_file));
  write_outputs(dir, files);

  const TuneReport& first = reports.front();
  out << "x_opt_index=" << first.x_opt.index << "\n";
  out << "x_opt=" << space.describe(first.x_opt) << "\n";
  out << "x_opt_count=" << first.count(first.x_opt.index) << "\n";
  if (artifacts.gain) out << "pg_best_pct=" << format_real(artifacts.gain->pg_best) << "\n";
  out << "replications=" << reports.size() << "\n";
  out << "output=" << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleOptions {
  SourceOptions source;
  std::string mode = "surface";
  std::optional<double> fidelity;
  double alpha = 0.8;
  double beta = 0.2;
  std::string output_dir = "lasp_out";
  std::string format = "csv";
  std::string probe;
  bool exhaustive_yes = false;
};

Table oracle_table(const ConfigSpace& space, const std::vector<std::pair<Metric, OracleResult>>& results) {
  Table table;
  table.columns = {"metric", "config_index", "assignment", "value"};
  for (const auto& [metric, r] : results) {
    table.rows.push_back({std::string(metric_name(metric)), static_cast<std::int64_t>(r.config.index),
                          space.describe(r.config), r.value});
  }
  return table;
}

void print_oracles(std::ostream& out, const ConfigSpace& space,
                   const std::vector<std::pair<Metric, OracleResult>>& results) {
  for (const auto& [metric, r] : results) {
    out << metric_name(metric) << " oracle: index=" << r.config.index << " assignment=" << space.describe(r.config)
        << " value=" << format_real(r.value) << "\n";
  }
}

int cmd_oracle(const OracleOptions& options, std::ostream& out, std::ostream& err) {
  const Mode mode = parse_mode(options.mode);
  const Format format = parse_format(options.format);
  const Weights weights(options.alpha, options.beta);
  if (options.output_dir.empty()) throw std::invalid_argument("-o must not be empty");
  if (mode == Mode::command && !options.exhaustive_yes) {
    err << "error: an exhaustive command sweep runs every configuration; confirm with --exhaustive-yes\n";
    return kExitUsage;
  }

  Problem problem = load_problem(options.source, err, mode == Mode::surface);
  const ConfigSpace& space = *problem.space;
  if (space.size() > kExhaustiveGuard) throw std::invalid_argument("space is too large for an exhaustive sweep");
  std::vector<OutputFile> files;
  std::vector<std::pair<Metric, OracleResult>> results;

  if (mode == Mode::surface) {
    const SyntheticSurface& surface = *problem.surface;
    const double q = resolve_fidelity(options.fidelity, problem);
    if (space.size() <= 1'000'000) {
      files.push_back({table_name("surface", format), dump_table(surface, q).render(format)});
    } else {
      err << "warning: " << space.size() << " configurations; skipping the full surface table\n";
    }
    for (Metric m : {Metric::time, Metric::power, Metric::weighted}) results.emplace_back(m, oracle(surface, q, m, weights));
  } else {
    if (problem.command.empty()) throw ContractError("command mode needs a [command] section in the space file");
    const CommandSpec command = command_from_section(problem.command);
    (void)substitute(command.command_template, space, space.default_config());
    std::string probe_spec = options.probe;
    if (probe_spec.empty()) {
      auto it = problem.command.find("probe");
      probe_spec = it != problem.command.end() ? it->second : "constant:1";
    }
    const auto probe = make_probe(probe_spec);
    std::vector<double> times;
    std::vector<double> powers;
    Table sweep;
    sweep.columns = {"config_index", "assignment", "q", "time_s", "power_w"};
    for (const auto& config : space.enumerate()) {
      const Sample s = evaluate_command(command, space, config, *probe, NoiseSpec{}, config.index + 1);
      times.push_back(s.exec_time);
      powers.push_back(s.power);
      sweep.rows.push_back({static_cast<std::int64_t>(config.index), space.describe(config), s.fidelity, s.exec_time,
                            s.power});
    }
    files.push_back({table_name("surface", format), sweep.render(format)});
    MinMax tr, pr;
    for (double v : times) tr.widen(v);
    for (double v : powers) pr.widen(v);
    auto argmin = [&](auto value) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < space.size(); ++i)
        if (value(i) < value(best)) best = i;
      return OracleResult{space.config_at(best), value(best)};
    };
    results.emplace_back(Metric::time, argmin([&](std::size_t i) { return times[i]; }));
    results.emplace_back(Metric::power, argmin([&](std::size_t i) { return powers[i]; }));
    results.emplace_back(Metric::weighted, argmin([&](std::size_t i) {
      return weights.alpha * tr.normalize(times[i]) + weights.beta * pr.normalize(powers[i]);
    }));
  }

  files.push_back({table_name("oracle", format), oracle_table(space, results).render(format)});
  write_outputs(options.output_dir, files);
  print_oracles(out, space, results);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

struct RegretOptions {
  SourceOptions source;
  std::string trace;
  double alpha = 0.8;
  double beta = 0.2;
  std::optional<double> fidelity;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::string format = "csv";
};

fs::path output_dir_or(const std::string& requested, const std::string& input) {
  if (!requested.empty()) return requested;
  const fs::path parent = fs::path(input).parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

int cmd_analyze_regret(const RegretOptions& options, std::ostream& out, std::ostream& err) {
  if (options.trace.empty()) throw std::invalid_argument("--trace is required");
  const Format format = parse_format(options.format);
  const Weights weights(options.alpha, options.beta);
  Problem problem = load_problem(options.source, err);
  const double q = resolve_fidelity(options.fidelity, problem);
  const auto trace = read_trace_csv(options.trace);
  if (trace.empty()) throw std::invalid_argument("trace has no rounds");
  check_trace_fits(trace, *problem.space);

  const ArmMeans means = reward_means(*problem.surface, q, weights);
  const BoundTerms bound = bound_terms(means);
  const RegretCurve curve = regret_curve(trace, means);
  const std::size_t n = trace.size();

  KeyValues summary{{"rounds", std::to_string(n)},
                    {"mu_star", format_real(curve.mu_star)},
                    {"final_regret", format_real(curve.final_regret())},
                    {"play_count_regret", format_real(curve.play_count_total)},
                    {"bound", format_real(bound.at(n))},
                    {"within_bound", curve.final_regret() <= bound.at(n) ? "true" : "false"},
                    {"alpha", format_real(weights.alpha)},
                    {"beta", format_real(weights.beta)},
                    {"fidelity", format_real(q)}};
  if (options.seed) summary.emplace_back("seed", std::to_string(*options.seed));

  const fs::path dir = output_dir_or(options.output_dir, options.trace);
  write_outputs(dir, {{table_name("regret", format), regret_table(curve, bound).render(format)},
                      {text_name("regret_summary", format), render_key_values(summary, format)}});
  out << "final_regret=" << format_real(curve.final_regret()) << "\n";
  out << "bound=" << format_real(bound.at(n)) << "\n";
  return kExitOk;
}

struct GainOptions {
  SourceOptions source;
  std::string trace;
  std::optional<std::size_t> default_index;
  std::string metric = "time";
  std::optional<double> fidelity;
  std::string output_dir;
  std::string format = "csv";
};

int cmd_analyze_gain(const GainOptions& options, std::ostream& out, std::ostream& err) {
  if (options.trace.empty()) throw std::invalid_argument("--trace is required");
  const Format format = parse_format(options.format);
  const Metric metric = parse_metric(options.metric);
  const auto trace = read_trace_csv(options.trace);
  const std::size_t best = most_pulled(trace);

  GainReport gain;
  const bool have_source = !options.source.preset.empty() || !options.source.space_file.empty();
  if (have_source) {
    Problem problem = load_problem(options.source, err);
    const ConfigSpace& space = *problem.space;
    check_trace_fits(trace, space);
    const double q = resolve_fidelity(options.fidelity, problem);
    const std::size_t def = options.default_index.value_or(space.default_config().index);
    if (def >= space.size()) throw std::invalid_argument("--default-index is outside the space");
    gain = performance_gain(true_value(*problem.surface, space.config_at(def), q, metric),
                            true_value(*problem.surface, space.config_at(best), q, metric));
  } else {
    if (!options.default_index) throw std::invalid_argument("--default-index is required without --preset or --space");
    const auto f_default = empirical_mean(trace, *options.default_index, metric);
    if (!f_default) {
      throw std::invalid_argument("configuration " + std::to_string(*options.default_index) +
                                  " never appears in the trace; give --preset or --space to use true values");
    }
    gain = performance_gain(*f_default, *empirical_mean(trace, best, metric));
  }

  KeyValues summary = gain_summary(gain, metric_name(metric));
  summary.emplace_back("x_opt_index", std::to_string(best));
  const fs::path dir = output_dir_or(options.output_dir, options.trace);
  write_outputs(dir, {{text_name("gain", format), render_key_values(summary, format)}});
  out << "pg_best_pct=" << format_real(gain.pg_best) << "\n";
  return kExitOk;
}

struct OverlapOptions {
  std::string dump_a;
  std::string dump_b;
  std::size_t k = 20;
  std::string output_dir;
  std::string format = "csv";
};

std::vector<std::size_t> ranking(const std::vector<DumpRow>& rows) {
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rows[a].time != rows[b].time) return rows[a].time < rows[b].time;
    return rows[a].config_index < rows[b].config_index;
  });
  for (auto& i : order) i = rows[i].config_index;
  return order;
}

int cmd_analyze_overlap(const OverlapOptions& options, std::ostream& out, std::ostream&) {
  if (options.dump_a.empty() || options.dump_b.empty())
    throw std::invalid_argument("--dump-a and --dump-b are required");
  const Format format = parse_format(options.format);
  const auto a = read_dump_csv(options.dump_a);
  const auto b = read_dump_csv(options.dump_b);
  if (a.size() != b.size()) throw std::invalid_argument("the dumps cover different numbers of configurations");
  std::unordered_map<std::size_t, const std::string*> assignments;
  for (const auto& row : a) assignments[row.config_index] = &row.assignment;
  for (const auto& row : b) {
    auto it = assignments.find(row.config_index);
    if (it == assignments.end() || *it->second != row.assignment)
      throw std::invalid_argument("the dumps describe different spaces");
  }
  if (options.k < 1 || options.k > a.size()) throw std::invalid_argument("-k must lie in [1, number of configurations]");

  const std::size_t common = topk_overlap(ranking(a), ranking(b), options.k);
  const fs::path dir = output_dir_or(options.output_dir, options.dump_b);
  write_outputs(dir, {{text_name("overlap", format),
                       render_key_values({{"k", std::to_string(options.k)}, {"overlap", std::to_string(common)}},
                                         format)}});
  out << common << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online bandit autotuner for discrete parameter spaces", "lasp"};
  app.require_subcommand(1);

  TuneOptions tune;
  auto* tune_cmd = app.add_subcommand("tune", "Run the bandit tuning loop");
  add_source_options(*tune_cmd, tune.source);
  tune_cmd->add_option("--mode", tune.mode, "surface or command")->capture_default_str();
  tune_cmd->add_option("-T,--iterations", tune.iterations, "Rounds per run")->capture_default_str();
  tune_cmd->add_option("--alpha", tune.alpha, "Weight on execution time")->capture_default_str();
  tune_cmd->add_option("--beta", tune.beta, "Weight on power")->capture_default_str();
  tune_cmd->add_option("--seed", tune.seed, "Base seed; replication i uses seed + i")->capture_default_str();
  tune_cmd->add_option("--noise", tune.noise, "Multiplicative noise level in [0, 0.5]")->capture_default_str();
  tune_cmd->add_option("--noise-on", tune.noise_on, "time, power or both")->capture_default_str();
  tune_cmd->add_option("-q,--fidelity", tune.fidelity, "Fidelity (default: highest)");
  tune_cmd->add_option("--replications", tune.replications, "Runs (default 100 on surfaces, 1 for commands)");
  tune_cmd->add_option("-o,--output", tune.output_dir, "Output directory")->capture_default_str();
  tune_cmd->add_option("--format", tune.format, "csv or json")->capture_default_str();
  tune_cmd->add_option("--probe", tune.probe, "constant:<watts> or file:<path>");
  tune_cmd->add_option("--threads", tune.threads, "Worker threads for surface replications (0 = all cores)");

  OracleOptions orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustively evaluate the space");
  add_source_options(*oracle_cmd, orc.source);
  oracle_cmd->add_option("--mode", orc.mode, "surface or command")->capture_default_str();
  oracle_cmd->add_option("-q,--fidelity", orc.fidelity, "Fidelity (default: highest)");
  oracle_cmd->add_option("--alpha", orc.alpha, "Weight on execution time")->capture_default_str();
  oracle_cmd->add_option("--beta", orc.beta, "Weight on power")->capture_default_str();
  oracle_cmd->add_option("-o,--output", orc.output_dir, "Output directory")->capture_default_str();
  oracle_cmd->add_option("--format", orc.format, "csv or json")->capture_default_str();
  oracle_cmd->add_option("--probe", orc.probe, "constant:<watts> or file:<path>");
  oracle_cmd->add_flag("--exhaustive-yes", orc.exhaustive_yes, "Allow running every configuration as a command");

  auto* analyze_cmd = app.add_subcommand("analyze", "Post-process tuning outputs");
  analyze_cmd->require_subcommand(1);

  RegretOptions regret;
  auto* regret_cmd = analyze_cmd->add_subcommand("regret", "Cumulative regret of a trace against its surface");
  add_source_options(*regret_cmd, regret.source);
  regret_cmd->add_option("--trace", regret.trace, "trace.csv from tune")->required();
  regret_cmd->add_option("--alpha", regret.alpha, "Weight on execution time")->capture_default_str();
  regret_cmd->add_option("--beta", regret.beta, "Weight on power")->capture_default_str();
  regret_cmd->add_option("-q,--fidelity", regret.fidelity, "Fidelity (default: highest)");
  regret_cmd->add_option("--seed", regret.seed, "Seed of the analysed run, recorded in the summary");
  regret_cmd->add_option("-o,--output", regret.output_dir, "Output directory (default: next to the trace)");
  regret_cmd->add_option("--format", regret.format, "csv or json")->capture_default_str();

  GainOptions gain;
  auto* gain_cmd = analyze_cmd->add_subcommand("gain", "Performance gain of the most-selected configuration");
  add_source_options(*gain_cmd, gain.source);
  gain_cmd->add_option("--trace", gain.trace, "trace.csv from tune")->required();
  gain_cmd->add_option("--default-index", gain.default_index, "Baseline configuration index");
  gain_cmd->add_option("--metric", gain.metric, "time or power")->capture_default_str();
  gain_cmd->add_option("-q,--fidelity", gain.fidelity, "Fidelity (default: highest)");
  gain_cmd->add_option("-o,--output", gain.output_dir, "Output directory (default: next to the trace)");
  gain_cmd->add_option("--format", gain.format, "csv or json")->capture_default_str();

  OverlapOptions overlap;
  auto* overlap_cmd = analyze_cmd->add_subcommand("overlap", "Top-k agreement of two surface tables");
  overlap_cmd->add_option("--dump-a", overlap.dump_a, "surface.csv from oracle")->required();
  overlap_cmd->add_option("--dump-b", overlap.dump_b, "surface.csv from oracle")->required();
  overlap_cmd->add_option("-k", overlap.k, "Ranking depth")->capture_default_str();
  overlap_cmd->add_option("-o,--output", overlap.output_dir, "Output directory (default: next to --dump-b)");
  overlap_cmd->add_option("--format", overlap.format, "csv or json")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*tune_cmd) return cmd_tune(tune, out, err);
    if (*oracle_cmd) return cmd_oracle(orc, out, err);
    if (*regret_cmd) return cmd_analyze_regret(regret, out, err);
    if (*gain_cmd) return cmd_analyze_gain(gain, out, err);
    if (*overlap_cmd) return cmd_analyze_overlap(overlap, out, err);
  } catch (const SpaceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ReportError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ExecutionFault& e) {
    err << "error: " << e.what() << "\n";
    if (!e.output().empty()) err << e.output() << "\n";
    return kExitExecution;
  } catch (const MeasurementError& e) {
    err << "error: " << e.what() << "\n";
    return kExitExecution;
  } catch (const RunAborted& e) {
    err << "error: " << e.what() << "\n";
    return kExitExecution;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace lasp::cli
