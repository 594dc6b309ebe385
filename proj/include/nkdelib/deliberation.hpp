#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nkdelib/configuration.hpp"
#include "nkdelib/landscape.hpp"
#include "nkdelib/rng.hpp"

namespace nkd {

/// Maps a round index to the integration rate alpha.
struct AlphaSchedule {
  enum class Kind { constant, linear, piecewise };

  Kind kind = Kind::constant;
  double value = 0.0;
  double start = 0.0;
  double end = 0.0;
  // (round, value) pairs, strictly increasing rounds, first round is 1.
  std::vector<std::pair<int, double>> breakpoints;

  static AlphaSchedule constant(double value);
  static AlphaSchedule linear(double start, double end);
  static AlphaSchedule piecewise(std::vector<std::pair<int, double>> breakpoints);

  // Text form accepted by parse(): "constant:V", "linear:S:E",
  // "piecewise:R1=V1,R2=V2,...".
  std::string describe() const;
  static AlphaSchedule parse(std::string_view text);

  friend bool operator==(const AlphaSchedule&, const AlphaSchedule&) = default;
};

// Throws ParameterError unless 1 <= t <= t_max.
double alpha_at(const AlphaSchedule& schedule, int t, int t_max);

enum class IntegrationPolicy { unconditional, self_interested };

struct DeliberationParams {
  int n = 10;
  int k = 5;
  int m = 5;
  int t_max = 1000;
  int d = 1;
  AlphaSchedule schedule = AlphaSchedule::constant(0.5);
  double divergence_weight = 0.0;
  IntegrationPolicy integration_policy = IntegrationPolicy::unconditional;
  NeighborScheme neighbor_scheme = NeighborScheme::random;
  bool stop_on_consensus = true;
  bool count_initial_positions = false;
  std::uint64_t seed = 0;

  // Throws ParameterError on m < 1, t_max < 1, d outside [1, n], or an
  // invalid landscape shape.
  void validate() const;

  friend bool operator==(const DeliberationParams&, const DeliberationParams&) = default;
};

struct RoundRecord {
  int round = 0;
  std::vector<Configuration> pre_positions;   // local peaks reached in Phase 1
  int proposer = 0;
  std::vector<Configuration> post_positions;  // after Phase 2
  double alpha_used = 0.0;
  bool consensus_after = false;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

enum class Termination { consensus, round_limit };

struct DeliberationTrace {
  DeliberationParams params;
  std::vector<Configuration> initial_positions;
  std::vector<RoundRecord> rounds;
  Termination terminated_by = Termination::round_limit;
  // Unique pre-integration positions over all agents and rounds (plus the
  // initial positions when params.count_initial_positions), ascending.
  std::vector<Configuration> discovered;

  friend bool operator==(const DeliberationTrace&, const DeliberationTrace&) = default;
};

inline std::uint64_t initial_positions_stream(std::uint64_t seed) { return substream_seed(seed, 0x1'0000'0001ULL); }
inline std::uint64_t proposer_stream(std::uint64_t seed) { return substream_seed(seed, 0x1'0000'0002ULL); }
inline std::uint64_t integration_stream(std::uint64_t seed) { return substream_seed(seed, 0x1'0000'0003ULL); }

inline int select_proposer(int m, Rng& rng) {
  if (m < 1) throw ParameterError("agent count m must be positive");
  return static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(m)));
}

inline bool is_consensus(const std::vector<Configuration>& positions) {
  if (positions.empty()) throw ParameterError("consensus check needs at least one position");
  for (const auto& p : positions)
    if (p != positions.front()) return false;
  return true;
}

/// Moves `current` toward `proposal`: each differing component independently
/// takes the proposal's bit with probability alpha. Under the self-interested
/// policy this happens only if perceived(proposal) > perceived(current).
///
/// One uniform draw is consumed per differing component, in component order,
/// whatever alpha is.
template <class Evaluate>
Configuration integrate(const Configuration& current, const Configuration& proposal, double alpha,
                        IntegrationPolicy policy, Evaluate&& perceived, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
  if (current.size() != proposal.size()) throw DimensionError("integration of configurations with different lengths");
  if (policy == IntegrationPolicy::self_interested && !(perceived(proposal) > perceived(current))) return current;
  Configuration out = current;
  for (int i = 0; i < current.size(); ++i) {
    if (current[i] == proposal[i]) continue;
    if (uniform01(rng) < alpha) out.set(i, proposal[i]);
  }
  return out;
}

DeliberationTrace run_deliberation(const DeliberationParams& params, const BeliefStructure& beliefs);

// Same as above with the agents' starting positions supplied instead of drawn.
DeliberationTrace run_deliberation(const DeliberationParams& params, const BeliefStructure& beliefs,
                                   std::vector<Configuration> initial_positions);

/// Argmax of dm_evaluate over trace.discovered, ties to the lexicographically
/// smallest. Throws StateError on an empty discovered set.
template <class Evaluate>
std::pair<Configuration, double> dm_select(const DeliberationTrace& trace, Evaluate&& dm_evaluate) {
  if (trace.discovered.empty()) throw StateError("decision maker has no discovered solutions to choose from");
  std::pair<Configuration, double> best{trace.discovered.front(), dm_evaluate(trace.discovered.front())};
  for (std::size_t i = 1; i < trace.discovered.size(); ++i) {
    const auto& x = trace.discovered[i];
    const double v = dm_evaluate(x);
    if (v > best.second || (v == best.second && x < best.first)) best = {x, v};
  }
  return best;
}

/// Trace export: one CSV record per round. Per-agent fields are joined with
/// ';' in agent order; bit strings list component 0 first; fitness columns
/// hold each agent's perceived fitness at full round-trip precision.
void write_trace_csv(const DeliberationTrace& trace, const BeliefStructure& beliefs, std::ostream& out);

}  // namespace nkd
