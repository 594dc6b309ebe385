#include "nkdelib/experiments.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "nkdelib/text.hpp"

namespace nkd {

namespace {

constexpr std::uint64_t kConditionCiStream = 0xC1'0000'0000ULL;
constexpr std::uint64_t kComparisonStream = 0xC2'0000'0000ULL;

std::string default_label(const DeliberationParams& p) {
  return "k=" + std::to_string(p.k) + " w=" + format_real(p.divergence_weight) + " alpha=" + p.schedule.describe();
}

ConditionResult aggregate(const ExperimentSpec& spec, std::size_t c, std::vector<RunRecord> runs) {
  ConditionResult out;
  out.params = condition_params(spec, c);
  out.label = spec.conditions[c].label.empty() ? default_label(out.params) : spec.conditions[c].label;
  out.runs = static_cast<int>(runs.size());
  out.run_records = std::move(runs);

  const auto distinct = out.distinct_values();
  out.mean_distinct = mean(distinct);
  out.sd_distinct = sample_sd(distinct);
  out.ci = bootstrap_mean_ci(distinct, spec.bootstrap_resamples, spec.confidence,
                             substream_seed(spec.master_seed, kConditionCiStream + c));

  double dm_sum = 0.0;
  double norm_sum = 0.0;
  bool all_normalized = true;
  double consensus_sum = 0.0;
  for (const auto& r : out.run_records) {
    dm_sum += r.summary.dm_value;
    if (r.summary.dm_value_normalized)
      norm_sum += *r.summary.dm_value_normalized;
    else
      all_normalized = false;
    if (r.summary.consensus_round) {
      consensus_sum += *r.summary.consensus_round;
      ++out.converged_runs;
    }
  }
  out.mean_dm_value = dm_sum / out.runs;
  if (all_normalized) out.mean_dm_value_normalized = norm_sum / out.runs;
  if (out.converged_runs > 0) out.mean_consensus_round = consensus_sum / out.converged_runs;
  return out;
}

}  // namespace

std::vector<double> ConditionResult::distinct_values() const {
  std::vector<double> v;
  v.reserve(run_records.size());
  for (const auto& r : run_records) v.push_back(r.summary.distinct_solutions);
  return v;
}

void ExperimentSpec::validate() const {
  if (conditions.empty()) throw ParameterError("experiment needs at least one condition");
  if (runs_per_condition < 1) throw ParameterError("runs_per_condition must be positive");
  if (bootstrap_resamples < 1) throw ParameterError("bootstrap_resamples must be positive");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ParameterError("confidence must lie in (0, 1)");
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    const auto p = condition_params(*this, c);
    p.validate();
    if (dm_agent >= p.m) throw ParameterError("dm_agent out of range");
  }
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t condition_index, std::uint64_t run_index) {
  const std::uint64_t packed = (condition_index << 32) | (run_index & 0xffffffffULL);
  return mix64(master_seed ^ mix64(packed));
}

DeliberationParams condition_params(const ExperimentSpec& spec, std::size_t condition) {
  DeliberationParams p = spec.base;
  const auto& c = spec.conditions.at(condition);
  if (c.schedule) p.schedule = *c.schedule;
  if (c.k) p.k = *c.k;
  if (c.divergence_weight) p.divergence_weight = *c.divergence_weight;
  return p;
}

RunSummary simulate_run(DeliberationParams params, std::uint64_t run_seed, int dm_agent) {
  params.seed = run_seed;
  params.validate();
  const auto beliefs =
      build_beliefs(params.n, params.k, params.m, params.divergence_weight, params.neighbor_scheme, run_seed);
  const auto trace = run_deliberation(params, beliefs);
  if (dm_agent < 0) {
    return summarize_run(trace, beliefs.truth(), [&](const Configuration& x) { return beliefs.truth().fitness(x); });
  }
  if (dm_agent >= params.m) throw ParameterError("dm_agent out of range");
  return summarize_run(trace, beliefs.truth(),
                       [&](const Configuration& x) { return beliefs.perceived_fitness(dm_agent, x); });
}

ExperimentResult run_batch(const ExperimentSpec& spec, const BatchOptions& options) {
  spec.validate();
  const std::size_t n_cond = spec.conditions.size();
  const auto n_runs = static_cast<std::size_t>(spec.runs_per_condition);
  const std::size_t total = n_cond * n_runs;

  std::vector<std::vector<RunRecord>> records(n_cond, std::vector<RunRecord>(n_runs));
  std::vector<DeliberationParams> params(n_cond);
  for (std::size_t c = 0; c < n_cond; ++c) params[c] = condition_params(spec, c);

  struct Failure {
    std::size_t task;
    std::string message;
  };
  std::optional<Failure> failure;
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::size_t completed = 0;

  auto worker = [&] {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::size_t c = task / n_runs;
      const std::size_t r = task % n_runs;
      const std::uint64_t seed =
          derive_run_seed(spec.master_seed, spec.pairing == Pairing::common_random_numbers ? 0 : c, r);
      auto& rec = records[c][r];
      rec.run_index = static_cast<int>(r);
      rec.seed = seed;
      try {
        rec.summary = simulate_run(params[c], seed, spec.dm_agent);
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        if (!failure || task < failure->task) failure = Failure{task, e.what()};
        next.store(total);
        return;
      }
      if (options.progress) {
        std::lock_guard lock(mutex);
        options.progress(++completed, total);
      }
    }
  };

  unsigned workers = options.workers == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.workers;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  if (failure) {
    const std::size_t c = failure->task / n_runs;
    const std::size_t r = failure->task % n_runs;
    const auto seed = records[c][r].seed;
    throw BatchError("run failed (condition " + std::to_string(c) + ", run " + std::to_string(r) + ", seed " +
                         std::to_string(seed) + "): " + failure->message,
                     static_cast<int>(c), static_cast<int>(r), seed);
  }

  ExperimentResult result;
  result.conditions.reserve(n_cond);
  for (std::size_t c = 0; c < n_cond; ++c) result.conditions.push_back(aggregate(spec, c, std::move(records[c])));
  return result;
}

PairedComparison compare_conditions(const ExperimentResult& result, std::size_t a, std::size_t b, int resamples,
                                    double confidence, std::uint64_t seed) {
  const auto& ca = result.conditions.at(a);
  const auto& cb = result.conditions.at(b);
  if (ca.runs != cb.runs) throw ParameterError("paired comparison needs equal run counts");
  std::vector<double> diff(static_cast<std::size_t>(ca.runs));
  for (std::size_t r = 0; r < diff.size(); ++r) {
    if (ca.run_records[r].seed != cb.run_records[r].seed)
      throw ParameterError("paired comparison needs common random numbers (run seeds differ)");
    diff[r] = ca.run_records[r].summary.distinct_solutions - cb.run_records[r].summary.distinct_solutions;
  }
  PairedComparison out;
  out.label_a = ca.label;
  out.label_b = cb.label;
  out.mean_a = ca.mean_distinct;
  out.mean_b = cb.mean_distinct;
  out.test = paired_bootstrap_test(diff, resamples, confidence, seed);
  return out;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

ExperimentResult sweep_alpha(const DeliberationParams& base, const std::vector<double>& alphas,
                             const std::vector<int>& k_values, double divergence_weight, int runs,
                             std::uint64_t master_seed, const BatchOptions& options) {
  if (alphas.empty()) throw ParameterError("alpha sweep needs at least one alpha");
  if (k_values.empty()) throw ParameterError("alpha sweep needs at least one k");
  ExperimentSpec spec;
  spec.base = base;
  spec.base.divergence_weight = divergence_weight;
  spec.runs_per_condition = runs;
  spec.master_seed = master_seed;
  for (int k : k_values)
    for (double a : alphas) spec.conditions.push_back({"", AlphaSchedule::constant(a), k, std::nullopt});
  return run_batch(spec, options);
}

ScheduleComparison compare_schedules(const DeliberationParams& base, const AlphaSchedule& schedule_a,
                                     const AlphaSchedule& schedule_b, int runs, std::uint64_t master_seed,
                                     const BatchOptions& options, std::string label_a, std::string label_b) {
  if (runs < 2) throw ParameterError("schedule comparison needs at least two runs");
  ExperimentSpec spec;
  spec.base = base;
  spec.runs_per_condition = runs;
  spec.master_seed = master_seed;
  spec.conditions.push_back({std::move(label_a), schedule_a, std::nullopt, std::nullopt});
  spec.conditions.push_back({std::move(label_b), schedule_b, std::nullopt, std::nullopt});
  ScheduleComparison out;
  out.result = run_batch(spec, options);
  out.comparison = compare_conditions(out.result, 0, 1, spec.bootstrap_resamples, spec.confidence,
                                      substream_seed(master_seed, kComparisonStream));
  out.result.comparisons.push_back(out.comparison);
  return out;
}

}  // namespace nkd
