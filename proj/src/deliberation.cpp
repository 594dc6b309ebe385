#include "nkdelib/deliberation.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <unordered_set>

#include "nkdelib/search.hpp"
#include "nkdelib/text.hpp"

namespace nkd {

namespace {

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ParameterError(std::string(what) + " must lie in [0, 1]");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

// One agent's perceived fitness with lazily filled value and climb caches.
// Caching is used when the space is small enough to index directly.
class AgentSearch {
 public:
  AgentSearch(const BeliefStructure& beliefs, int agent, int d)
      : perceived_{&beliefs, agent}, n_(beliefs.truth().n()), d_(d) {
    if (n_ <= kMaxEnumerableComponents) {
      values_.assign(std::size_t{1} << n_, std::numeric_limits<double>::quiet_NaN());
      peaks_.assign(std::size_t{1} << n_, kUnknown);
    }
  }

  double value(const Configuration& x) {
    if (values_.empty()) return perceived_(x);
    double& v = values_[x.bits()];
    if (std::isnan(v)) v = perceived_(x);
    return v;
  }

  Configuration climb(const Configuration& start) {
    auto eval = [this](const Configuration& x) { return value(x); };
    if (peaks_.empty()) return local_search(start, eval, d_);
    if (peaks_[start.bits()] != kUnknown) return Configuration(n_, peaks_[start.bits()]);
    // Every point on a steepest-ascent path leads to the same peak.
    const auto path = local_search_path(start, eval, d_);
    const auto peak = static_cast<std::uint32_t>(path.back().bits());
    for (const auto& x : path) peaks_[x.bits()] = peak;
    return path.back();
  }

 private:
  static constexpr std::uint32_t kUnknown = 0xffffffffU;

  PerceivedFitness perceived_;
  int n_;
  int d_;
  std::vector<double> values_;
  std::vector<std::uint32_t> peaks_;
};

}  // namespace

AlphaSchedule AlphaSchedule::constant(double value) {
  check_unit(value, "constant alpha");
  AlphaSchedule s;
  s.kind = Kind::constant;
  s.value = value;
  return s;
}

AlphaSchedule AlphaSchedule::linear(double start, double end) {
  check_unit(start, "linear schedule start");
  check_unit(end, "linear schedule end");
  AlphaSchedule s;
  s.kind = Kind::linear;
  s.start = start;
  s.end = end;
  return s;
}

AlphaSchedule AlphaSchedule::piecewise(std::vector<std::pair<int, double>> breakpoints) {
  if (breakpoints.empty()) throw ParameterError("piecewise schedule needs at least one breakpoint");
  if (breakpoints.front().first != 1) throw ParameterError("piecewise schedule must start at round 1");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    check_unit(breakpoints[i].second, "piecewise alpha");
    if (i > 0 && breakpoints[i].first <= breakpoints[i - 1].first)
      throw ParameterError("piecewise breakpoints must have strictly increasing rounds");
  }
  AlphaSchedule s;
  s.kind = Kind::piecewise;
  s.breakpoints = std::move(breakpoints);
  return s;
}

std::string AlphaSchedule::describe() const {
  switch (kind) {
    case Kind::constant:
      return "constant:" + format_real(value);
    case Kind::linear:
      return "linear:" + format_real(start) + ":" + format_real(end);
    case Kind::piecewise: {
      std::string out = "piecewise:";
      for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(breakpoints[i].first) + "=" + format_real(breakpoints[i].second);
      }
      return out;
    }
  }
  return {};
}

AlphaSchedule AlphaSchedule::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts[0] == "constant" && parts.size() == 2) return constant(parse_real(parts[1]));
  if (parts[0] == "linear" && parts.size() == 3) return linear(parse_real(parts[1]), parse_real(parts[2]));
  if (parts[0] == "piecewise" && parts.size() == 2) {
    std::vector<std::pair<int, double>> bps;
    for (auto item : split(parts[1], ',')) {
      const auto kv = split(item, '=');
      if (kv.size() != 2) throw ParameterError("piecewise breakpoint must be ROUND=VALUE");
      bps.emplace_back(parse_int(kv[0]), parse_real(kv[1]));
    }
    return piecewise(std::move(bps));
  }
  throw ParameterError("unrecognized alpha schedule '" + std::string(text) +
                       "' (expected constant:V, linear:S:E or piecewise:R=V,...)");
}

double alpha_at(const AlphaSchedule& schedule, int t, int t_max) {
  if (t_max < 1 || t < 1 || t > t_max)
    throw ParameterError("round " + std::to_string(t) + " outside [1, " + std::to_string(t_max) + "]");
  switch (schedule.kind) {
    case AlphaSchedule::Kind::constant:
      return schedule.value;
    case AlphaSchedule::Kind::linear: {
      if (t_max == 1) return schedule.start;
      if (t == t_max) return schedule.end;
      const double frac = static_cast<double>(t - 1) / static_cast<double>(t_max - 1);
      const double a = schedule.start + (schedule.end - schedule.start) * frac;
      return std::clamp(a, 0.0, 1.0);
    }
    case AlphaSchedule::Kind::piecewise: {
      double a = schedule.breakpoints.front().second;
      for (const auto& [round, value] : schedule.breakpoints) {
        if (round > t) break;
        a = value;
      }
      return a;
    }
  }
  return 0.0;
}

void DeliberationParams::validate() const {
  if (n < 1 || n > kMaxComponents) throw ParameterError("n must be in [1, 64]");
  if (k < 0 || k > n - 1) throw ParameterError("k must be in [0, n-1]");
  if (m < 1) throw ParameterError("agent count m must be positive");
  if (t_max < 1) throw ParameterError("t_max must be positive");
  if (d < 1 || d > n) throw ParameterError("search radius d must satisfy 1 <= d <= n");
  check_unit(divergence_weight, "divergence weight");
}

DeliberationTrace run_deliberation(const DeliberationParams& params, const BeliefStructure& beliefs) {
  params.validate();
  Rng rng(initial_positions_stream(params.seed));
  std::vector<Configuration> initial;
  initial.reserve(static_cast<std::size_t>(params.m));
  for (int i = 0; i < params.m; ++i) initial.emplace_back(params.n, rng());
  return run_deliberation(params, beliefs, std::move(initial));
}

DeliberationTrace run_deliberation(const DeliberationParams& params, const BeliefStructure& beliefs,
                                   std::vector<Configuration> initial_positions) {
  params.validate();
  if (beliefs.truth().n() != params.n || beliefs.truth().k() != params.k)
    throw ParameterError("belief structure shape does not match deliberation parameters");
  if (beliefs.agent_count() != params.m)
    throw ParameterError("belief structure has " + std::to_string(beliefs.agent_count()) + " agents, params say " +
                         std::to_string(params.m));
  if (beliefs.divergence_weight() != params.divergence_weight)
    throw ParameterError("belief structure divergence weight does not match deliberation parameters");
  if (initial_positions.size() != static_cast<std::size_t>(params.m))
    throw ParameterError("need exactly one initial position per agent");
  for (const auto& x : initial_positions)
    if (x.size() != params.n) throw DimensionError("initial position length does not match n");

  // Aligned agents share one perceived landscape, hence one cache.
  std::vector<std::shared_ptr<AgentSearch>> search(static_cast<std::size_t>(params.m));
  for (int i = 0; i < params.m; ++i) {
    const bool shared = params.divergence_weight == 0.0 && i > 0;
    search[static_cast<std::size_t>(i)] = shared ? search[0] : std::make_shared<AgentSearch>(beliefs, i, params.d);
  }

  DeliberationTrace trace;
  trace.params = params;
  trace.initial_positions = initial_positions;

  std::unordered_set<Configuration> discovered;
  if (params.count_initial_positions) discovered.insert(initial_positions.begin(), initial_positions.end());

  Rng proposer_rng(proposer_stream(params.seed));
  Rng integration_rng(integration_stream(params.seed));

  std::vector<Configuration> positions = std::move(initial_positions);
  for (int t = 1; t <= params.t_max; ++t) {
    RoundRecord rec;
    rec.round = t;
    rec.alpha_used = alpha_at(params.schedule, t, params.t_max);

    rec.pre_positions.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
      rec.pre_positions.push_back(search[i]->climb(positions[i]));
      discovered.insert(rec.pre_positions.back());
    }

    rec.proposer = select_proposer(params.m, proposer_rng);
    const Configuration& proposal = rec.pre_positions[static_cast<std::size_t>(rec.proposer)];
    rec.post_positions.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (static_cast<int>(i) == rec.proposer) {
        rec.post_positions.push_back(proposal);
        continue;
      }
      auto& agent = *search[i];
      rec.post_positions.push_back(integrate(rec.pre_positions[i], proposal, rec.alpha_used,
                                             params.integration_policy,
                                             [&agent](const Configuration& x) { return agent.value(x); },
                                             integration_rng));
    }
    rec.consensus_after = is_consensus(rec.post_positions);
    positions = rec.post_positions;
    const bool stop = params.stop_on_consensus && rec.consensus_after;
    trace.rounds.push_back(std::move(rec));
    if (stop) {
      trace.terminated_by = Termination::consensus;
      break;
    }
  }

  trace.discovered.assign(discovered.begin(), discovered.end());
  std::sort(trace.discovered.begin(), trace.discovered.end());
  return trace;
}

void write_trace_csv(const DeliberationTrace& trace, const BeliefStructure& beliefs, std::ostream& out) {
  auto join_bits = [](const std::vector<Configuration>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i > 0) s += ';';
      s += xs[i].to_string();
    }
    return s;
  };
  auto join_fitness = [&beliefs](const std::vector<Configuration>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i > 0) s += ';';
      s += format_real(beliefs.perceived_fitness(static_cast<int>(i), xs[i]));
    }
    return s;
  };
  out << "round,alpha,proposer,pre_positions,pre_fitness,post_positions,post_fitness,consensus_after\n";
  for (const auto& r : trace.rounds) {
    out << r.round << ',' << format_real(r.alpha_used) << ',' << r.proposer << ',' << join_bits(r.pre_positions)
        << ',' << join_fitness(r.pre_positions) << ',' << join_bits(r.post_positions) << ','
        << join_fitness(r.post_positions) << ',' << (r.consensus_after ? 1 : 0) << '\n';
  }
}

}  // namespace nkd
