#pragma once

#include <functional>
#include <optional>

#include "nkdelib/deliberation.hpp"
#include "nkdelib/landscape.hpp"

namespace nkd {

struct RunSummary {
  int distinct_solutions = 0;
  Configuration dm_choice;
  double dm_value = 0.0;                       // under the DM evaluator
  std::optional<double> dm_value_normalized;   // truth(dm_choice) / global optimum, n <= 20 only
  std::optional<int> consensus_round;          // first round ending in consensus
  int rounds_executed = 0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

// Number of unique configurations in trace.discovered.
int distinct_solutions(const DeliberationTrace& trace);

// Throws ParameterError when truth's shape differs from the trace's.
RunSummary summarize_run(const DeliberationTrace& trace, const NKLandscape& truth,
                         const std::function<double(const Configuration&)>& dm_evaluate);

}  // namespace nkd
