#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nkdelib/deliberation.hpp"
#include "nkdelib/metrics.hpp"
#include "nkdelib/stats.hpp"

namespace nkd {

enum class Pairing { common_random_numbers, independent };

// Overrides applied to ExperimentSpec::base for one condition.
struct Condition {
  std::string label;
  std::optional<AlphaSchedule> schedule;
  std::optional<int> k;
  std::optional<double> divergence_weight;
};

struct ExperimentSpec {
  DeliberationParams base;
  std::vector<Condition> conditions;
  int runs_per_condition = 1000;
  std::uint64_t master_seed = 0;
  Pairing pairing = Pairing::common_random_numbers;
  // DM evaluator: -1 for ground truth, otherwise that agent's perceived fitness.
  int dm_agent = -1;
  int bootstrap_resamples = 10000;
  double confidence = 0.95;

  void validate() const;
};

struct RunRecord {
  int run_index = 0;
  std::uint64_t seed = 0;
  RunSummary summary;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct ConditionResult {
  std::string label;
  DeliberationParams params;  // base with overrides; params.seed unused
  int runs = 0;
  double mean_distinct = 0.0;
  double sd_distinct = 0.0;
  Interval ci;  // bootstrap interval for mean_distinct
  double mean_dm_value = 0.0;
  std::optional<double> mean_dm_value_normalized;
  std::optional<double> mean_consensus_round;  // over converged runs
  int converged_runs = 0;
  std::vector<RunRecord> run_records;  // by run index

  std::vector<double> distinct_values() const;

  friend bool operator==(const ConditionResult&, const ConditionResult&) = default;
};

struct PairedComparison {
  std::string label_a;
  std::string label_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  PairedTest test;  // on run-wise distinct_solutions(a) - distinct_solutions(b)
};

struct ExperimentResult {
  std::vector<ConditionResult> conditions;
  std::vector<PairedComparison> comparisons;
};

// Thrown when any run of a batch fails; names the offending run.
class BatchError : public std::runtime_error {
 public:
  BatchError(const std::string& what, int condition, int run_index, std::uint64_t seed)
      : std::runtime_error(what), condition(condition), run_index(run_index), seed(seed) {}
  int condition;
  int run_index;
  std::uint64_t seed;
};

struct BatchOptions {
  // 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  // Called after each completed run with (completed, total); may be called
  // from worker threads, serialized by the harness.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Seed of run `run_index` in condition `condition_index`. The two indices
/// (each < 2^32) are packed into one word, which is pushed through the
/// SplitMix64 finalizer, xored with the master seed and finalized again.
/// Every step is a bijection, so distinct index pairs give distinct seeds.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t condition_index, std::uint64_t run_index);

// Parameters of one condition: base with the condition's overrides.
DeliberationParams condition_params(const ExperimentSpec& spec, std::size_t condition);

// Builds beliefs from `run_seed`, runs the deliberation and summarizes it.
RunSummary simulate_run(DeliberationParams params, std::uint64_t run_seed, int dm_agent = -1);

// Result is a pure function of spec; workers only change wall time.
ExperimentResult run_batch(const ExperimentSpec& spec, const BatchOptions& options = {});

// Paired comparison of two conditions of a common-random-number batch.
PairedComparison compare_conditions(const ExperimentResult& result, std::size_t a, std::size_t b, int resamples,
                                    double confidence, std::uint64_t seed);

std::vector<double> default_alpha_grid();

// One condition per (k, alpha), k-major, each with a constant schedule.
ExperimentResult sweep_alpha(const DeliberationParams& base, const std::vector<double>& alphas,
                             const std::vector<int>& k_values, double divergence_weight, int runs,
                             std::uint64_t master_seed, const BatchOptions& options = {});

struct ScheduleComparison {
  ExperimentResult result;  // conditions {a, b}; comparisons {a - b}
  PairedComparison comparison;
};

ScheduleComparison compare_schedules(const DeliberationParams& base, const AlphaSchedule& schedule_a,
                                     const AlphaSchedule& schedule_b, int runs, std::uint64_t master_seed,
                                     const BatchOptions& options = {}, std::string label_a = "",
                                     std::string label_b = "");

}  // namespace nkd
