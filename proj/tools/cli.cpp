#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nkdelib/deliberation.hpp"
#include "nkdelib/experiments.hpp"
#include "nkdelib/landscape.hpp"
#include "nkdelib/report.hpp"
#include "nkdelib/text.hpp"

namespace nkd::cli {

namespace {

// Failure after configuration was accepted (I/O, run errors).
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  int n = 10;
  int k = 5;
  int m = 5;
  int t_max = 1000;
  int d = 1;
  double alpha = 0.5;
  std::string schedule;
  double w = 0.0;
  IntegrationPolicy policy = IntegrationPolicy::unconditional;
  NeighborScheme neighbors = NeighborScheme::random;
  bool stop_on_consensus = true;
  bool count_initial = false;
  int dm_agent = -1;
  std::uint64_t seed = 0;
  int runs = 1000;
  int resamples = 10000;
  unsigned workers = 0;
  int verbosity = 0;
  std::string output;
  std::string aggregate;
  std::string trace;
  std::vector<double> alphas = default_alpha_grid();
  std::vector<int> k_values;
  std::string schedule_a = "linear:0:1";
  std::string schedule_b = "constant:0.5";
  std::string label_a;
  std::string label_b;
};

const char* policy_name(IntegrationPolicy p) {
  return p == IntegrationPolicy::unconditional ? "unconditional" : "self_interested";
}

const char* scheme_name(NeighborScheme s) { return s == NeighborScheme::random ? "random" : "adjacent"; }

DeliberationParams base_params(const Options& o) {
  DeliberationParams p;
  p.n = o.n;
  p.k = o.k;
  p.m = o.m;
  p.t_max = o.t_max;
  p.d = o.d;
  p.schedule = o.schedule.empty() ? AlphaSchedule::constant(o.alpha) : AlphaSchedule::parse(o.schedule);
  p.divergence_weight = o.w;
  p.integration_policy = o.policy;
  p.neighbor_scheme = o.neighbors;
  p.stop_on_consensus = o.stop_on_consensus;
  p.count_initial_positions = o.count_initial;
  p.seed = o.seed;
  p.validate();
  return p;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += format_real(xs[i]);
    else
      s += std::to_string(xs[i]);
  }
  return s;
}

// Effective configuration; excludes output paths, worker count and
// verbosity so that files are byte-identical across those settings.
std::vector<std::string> header(const std::string& command, const Options& o, const DeliberationParams& p) {
  std::vector<std::string> h{
      "nkdelib " + command,
      "n=" + std::to_string(p.n),
      "k=" + std::to_string(p.k),
      "m=" + std::to_string(p.m),
      "t_max=" + std::to_string(p.t_max),
      "d=" + std::to_string(p.d),
      "schedule=" + p.schedule.describe(),
      "w=" + format_real(p.divergence_weight),
      "policy=" + std::string(policy_name(p.integration_policy)),
      "neighbors=" + std::string(scheme_name(p.neighbor_scheme)),
      "stop_on_consensus=" + std::string(p.stop_on_consensus ? "true" : "false"),
      "count_initial_positions=" + std::string(p.count_initial_positions ? "true" : "false"),
      "dm=" + (o.dm_agent < 0 ? std::string("truth") : "agent " + std::to_string(o.dm_agent)),
      "master_seed=" + std::to_string(o.seed),
  };
  if (command != "run" && command != "dump-landscape") {
    h.push_back("runs=" + std::to_string(o.runs));
    h.push_back("bootstrap_resamples=" + std::to_string(o.resamples));
  }
  return h;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw RuntimeFailure("cannot open output file '" + path + "' for writing");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw RuntimeFailure("failed writing output file '" + path + "'");
}

std::string default_aggregate_path(const std::string& output) {
  std::filesystem::path p(output);
  const std::string stem = p.extension() == ".csv" ? p.stem().string() : p.filename().string();
  return (p.parent_path() / (stem + "_aggregate.csv")).string();
}

BatchOptions batch_options(const Options& o, std::ostream& err) {
  BatchOptions b;
  b.workers = o.workers;
  if (o.verbosity > 0) {
    b.progress = [&err](std::size_t done, std::size_t total) {
      if (done == total || done % 1000 == 0) err << "progress " << done << "/" << total << '\n';
    };
  }
  return b;
}

void write_batch(const ExperimentResult& result, const std::vector<std::string>& comments, const Options& o,
                 std::ofstream& runs_file, std::ofstream& agg_file, const std::string& agg_path) {
  write_runs_csv(result, comments, runs_file);
  finish(runs_file, o.output);
  write_aggregate_csv(result, comments, agg_file);
  finish(agg_file, agg_path);
}

void print_conditions(const ExperimentResult& result, std::ostream& out) {
  for (const auto& c : result.conditions) {
    out << c.label << ": mean distinct_solutions=" << format_real(c.mean_distinct) << " 95% CI ["
        << format_real(c.ci.low) << ", " << format_real(c.ci.high) << "]\n";
  }
}

int cmd_run(const Options& o, std::ostream& out) {
  const auto params = base_params(o);
  const auto comments = header("run", o, params);
  std::optional<std::ofstream> runs_file, trace_file;
  if (!o.output.empty()) runs_file = open_output(o.output);
  if (!o.trace.empty()) trace_file = open_output(o.trace);

  ExperimentSpec spec;
  spec.base = params;
  spec.conditions.push_back({});
  spec.runs_per_condition = 1;
  spec.master_seed = o.seed;
  spec.dm_agent = o.dm_agent;
  spec.bootstrap_resamples = 1;
  const auto result = run_batch(spec, {.workers = 1});
  const auto& rec = result.conditions[0].run_records[0];
  const auto& s = rec.summary;

  out << "seed=" << rec.seed << '\n'
      << "distinct_solutions=" << s.distinct_solutions << '\n'
      << "dm_choice=" << s.dm_choice.to_string() << '\n'
      << "dm_value=" << format_real(s.dm_value) << '\n'
      << "dm_value_normalized=" << (s.dm_value_normalized ? format_real(*s.dm_value_normalized) : "") << '\n'
      << "consensus_round=" << (s.consensus_round ? std::to_string(*s.consensus_round) : "") << '\n'
      << "rounds_executed=" << s.rounds_executed << '\n';

  if (runs_file) {
    write_runs_csv(result, comments, *runs_file);
    finish(*runs_file, o.output);
  }
  if (trace_file) {
    auto p = params;
    p.seed = rec.seed;
    const auto beliefs = build_beliefs(p.n, p.k, p.m, p.divergence_weight, p.neighbor_scheme, p.seed);
    const auto trace = run_deliberation(p, beliefs);
    for (const auto& c : comments) *trace_file << "# " << c << '\n';
    write_trace_csv(trace, beliefs, *trace_file);
    finish(*trace_file, o.trace);
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto params = base_params(o);
  const auto k_values = o.k_values.empty() ? std::vector<int>{params.k} : o.k_values;
  for (int k : k_values) {
    auto p = params;
    p.k = k;
    p.validate();
  }
  if (o.output.empty()) throw ParameterError("sweep-alpha needs --output");
  auto comments = header("sweep-alpha", o, params);
  comments.push_back("alphas=" + join(o.alphas));
  comments.push_back("k_values=" + join(k_values));
  const auto agg_path = o.aggregate.empty() ? default_aggregate_path(o.output) : o.aggregate;
  auto runs_file = open_output(o.output);
  auto agg_file = open_output(agg_path);

  ExperimentSpec spec;
  spec.base = params;
  spec.runs_per_condition = o.runs;
  spec.master_seed = o.seed;
  spec.dm_agent = o.dm_agent;
  spec.bootstrap_resamples = o.resamples;
  for (int k : k_values)
    for (double a : o.alphas) spec.conditions.push_back({"", AlphaSchedule::constant(a), k, std::nullopt});
  const auto result = run_batch(spec, batch_options(o, err));
  write_batch(result, comments, o, runs_file, agg_file, agg_path);
  print_conditions(result, out);
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  const auto params = base_params(o);
  const auto a = AlphaSchedule::parse(o.schedule_a);
  const auto b = AlphaSchedule::parse(o.schedule_b);
  if (o.output.empty()) throw ParameterError("compare-schedules needs --output");
  if (o.runs < 2) throw ParameterError("compare-schedules needs --runs >= 2");
  const auto agg_path = o.aggregate.empty() ? default_aggregate_path(o.output) : o.aggregate;
  auto runs_file = open_output(o.output);
  auto agg_file = open_output(agg_path);

  ExperimentSpec spec;
  spec.base = params;
  spec.runs_per_condition = o.runs;
  spec.master_seed = o.seed;
  spec.dm_agent = o.dm_agent;
  spec.bootstrap_resamples = o.resamples;
  spec.conditions.push_back({o.label_a.empty() ? a.describe() : o.label_a, a, std::nullopt, std::nullopt});
  spec.conditions.push_back({o.label_b.empty() ? b.describe() : o.label_b, b, std::nullopt, std::nullopt});
  auto result = run_batch(spec, batch_options(o, err));
  const auto cmp = compare_conditions(result, 0, 1, o.resamples, spec.confidence,
                                      substream_seed(o.seed, 0xC2'0000'0000ULL));
  result.comparisons.push_back(cmp);

  auto comments = header("compare-schedules", o, params);
  comments.push_back("schedule_a=" + a.describe());
  comments.push_back("schedule_b=" + b.describe());
  comments.push_back("paired_mean_difference=" + format_real(cmp.test.mean_difference));
  comments.push_back("paired_difference_ci=" + format_real(cmp.test.ci.low) + "," + format_real(cmp.test.ci.high));
  comments.push_back("one_sided_p_value=" + format_real(cmp.test.p_value));
  write_batch(result, comments, o, runs_file, agg_file, agg_path);

  print_conditions(result, out);
  out << "paired mean difference (a - b)=" << format_real(cmp.test.mean_difference)
      << " one-sided p=" << format_real(cmp.test.p_value) << '\n';
  return kExitOk;
}

int cmd_dump(const Options& o, std::ostream& out) {
  auto params = base_params(o);
  const auto landscape = build_nk_landscape(params.n, params.k, params.neighbor_scheme, o.seed);
  const auto comments = header("dump-landscape", o, params);
  if (o.output.empty()) {
    for (const auto& c : comments) out << "# " << c << '\n';
    dump_landscape(landscape, out);
    return kExitOk;
  }
  auto f = open_output(o.output);
  for (const auto& c : comments) f << "# " << c << '\n';
  dump_landscape(landscape, f);
  finish(f, o.output);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Monte Carlo simulator of multiagent deliberation on NK landscapes", "nkdelib"};
  app.set_config("--config", "", "flat key = value configuration file ('#' comments); flags override it");
  app.allow_config_extras(false);
  app.require_subcommand(1, 1);

  const std::map<std::string, IntegrationPolicy> policies{{"unconditional", IntegrationPolicy::unconditional},
                                                          {"self_interested", IntegrationPolicy::self_interested}};
  const std::map<std::string, NeighborScheme> schemes{{"random", NeighborScheme::random},
                                                      {"adjacent", NeighborScheme::adjacent}};

  app.add_option("--n", o.n, "number of binary components")->capture_default_str();
  app.add_option("--k", o.k, "dependencies per component")->capture_default_str();
  app.add_option("--m", o.m, "number of agents")->capture_default_str();
  app.add_option("--t-max", o.t_max, "maximum number of rounds")->capture_default_str();
  app.add_option("--d", o.d, "local search radius (Hamming)")->capture_default_str();
  app.add_option("--alpha", o.alpha, "constant integration rate")->capture_default_str();
  app.add_option("--schedule", o.schedule, "alpha schedule: constant:V | linear:S:E | piecewise:R=V,...");
  app.add_option("--w", o.w, "divergence weight of agent beliefs (0 = aligned)")->capture_default_str();
  app.add_option("--policy", o.policy, "integration policy")->transform(CLI::CheckedTransformer(policies));
  app.add_option("--neighbors", o.neighbors, "neighbor scheme")->transform(CLI::CheckedTransformer(schemes));
  app.add_option("--stop-on-consensus", o.stop_on_consensus, "stop when all agents coincide")->capture_default_str();
  app.add_flag("--count-initial", o.count_initial, "count random initial positions as discovered solutions");
  app.add_option("--dm-agent", o.dm_agent, "DM evaluator: -1 ground truth, else that agent's beliefs")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "master seed")->capture_default_str();
  app.add_option("--runs", o.runs, "runs per condition")->capture_default_str();
  app.add_option("--bootstrap-resamples", o.resamples, "bootstrap resamples")->capture_default_str();
  app.add_option("--workers", o.workers, "worker threads (0 = machine parallelism)")->capture_default_str();
  app.add_option("--output", o.output, "output file");
  app.add_option("--aggregate", o.aggregate, "aggregate CSV path (default: <output stem>_aggregate.csv)");
  app.add_flag("-v,--verbose", o.verbosity, "progress on stderr");

  auto* run_cmd = app.add_subcommand("run", "single deliberation run");
  run_cmd->add_option("--trace", o.trace, "write the per-round trace CSV here");
  auto* sweep_cmd = app.add_subcommand("sweep-alpha", "constant-alpha sweep over alphas and k values");
  sweep_cmd->add_option("--alphas", o.alphas, "alpha grid")->delimiter(',');
  sweep_cmd->add_option("--k-values", o.k_values, "k values (default: --k)")->delimiter(',');
  auto* compare_cmd = app.add_subcommand("compare-schedules", "paired comparison of two alpha schedules");
  compare_cmd->add_option("--schedule-a", o.schedule_a, "first schedule")->capture_default_str();
  compare_cmd->add_option("--schedule-b", o.schedule_b, "second schedule")->capture_default_str();
  compare_cmd->add_option("--label-a", o.label_a, "label of the first schedule");
  compare_cmd->add_option("--label-b", o.label_b, "label of the second schedule");
  auto* dump_cmd = app.add_subcommand("dump-landscape", "write a landscape as structured text");
  for (auto* sub : {run_cmd, sweep_cmd, compare_cmd, dump_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "nkdelib: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out, err);
    if (*compare_cmd) return cmd_compare(o, out, err);
    return cmd_dump(o, out);
  } catch (const ParameterError& e) {
    err << "nkdelib: invalid configuration: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DimensionError& e) {
    err << "nkdelib: invalid configuration: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const CapacityError& e) {
    err << "nkdelib: invalid configuration: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "nkdelib: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace nkd::cli
