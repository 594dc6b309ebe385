#include "nkdelib/metrics.hpp"

#include <unordered_set>

namespace nkd {

int distinct_solutions(const DeliberationTrace& trace) {
  const std::unordered_set<Configuration> unique(trace.discovered.begin(), trace.discovered.end());
  return static_cast<int>(unique.size());
}

RunSummary summarize_run(const DeliberationTrace& trace, const NKLandscape& truth,
                         const std::function<double(const Configuration&)>& dm_evaluate) {
  if (truth.n() != trace.params.n || truth.k() != trace.params.k)
    throw ParameterError("truth landscape shape does not match the trace");
  RunSummary s;
  s.distinct_solutions = distinct_solutions(trace);
  std::tie(s.dm_choice, s.dm_value) = dm_select(trace, dm_evaluate);
  if (truth.n() <= kMaxEnumerableComponents) {
    const double optimum = global_optimum(truth).second;
    s.dm_value_normalized = truth.fitness(s.dm_choice) / optimum;
  }
  for (const auto& r : trace.rounds) {
    if (r.consensus_after) {
      s.consensus_round = r.round;
      break;
    }
  }
  s.rounds_executed = static_cast<int>(trace.rounds.size());
  return s;
}

}  // namespace nkd
