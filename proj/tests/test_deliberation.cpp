#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "nkdelib/deliberation.hpp"
#include "nkdelib/search.hpp"
#include "oracles.hpp"

using namespace nkd;

namespace {

DeliberationParams small_params(int n, int k, int m, double alpha, std::uint64_t seed) {
  DeliberationParams p;
  p.n = n;
  p.k = k;
  p.m = m;
  p.t_max = 200;
  p.schedule = AlphaSchedule::constant(alpha);
  p.seed = seed;
  return p;
}

BeliefStructure beliefs_for(const DeliberationParams& p) {
  return build_beliefs(p.n, p.k, p.m, p.divergence_weight, p.neighbor_scheme, p.seed);
}

// Structural invariants every trace must satisfy.
void check_trace_invariants(const DeliberationTrace& trace, const BeliefStructure& beliefs) {
  const auto& p = trace.params;
  REQUIRE(trace.rounds.size() <= static_cast<std::size_t>(p.t_max));
  REQUIRE_FALSE(trace.rounds.empty());
  std::set<Configuration> pre_union;
  std::vector<Configuration> previous = trace.initial_positions;
  for (const auto& r : trace.rounds) {
    CHECK(r.alpha_used == alpha_at(p.schedule, r.round, p.t_max));
    CHECK(r.post_positions[std::size_t(r.proposer)] == r.pre_positions[std::size_t(r.proposer)]);
    for (int i = 0; i < p.m; ++i) {
      const auto& pre = r.pre_positions[std::size_t(i)];
      const PerceivedFitness eval{&beliefs, i};
      CHECK(is_local_peak(pre, eval, p.d));
      CHECK(local_search(previous[std::size_t(i)], eval, p.d) == pre);
      pre_union.insert(pre);
      if (p.integration_policy == IntegrationPolicy::self_interested && i != r.proposer &&
          r.post_positions[std::size_t(i)] != pre) {
        CHECK(eval(r.pre_positions[std::size_t(r.proposer)]) > eval(pre));
      }
    }
    CHECK(r.consensus_after == is_consensus(r.post_positions));
    previous = r.post_positions;
  }
  if (p.count_initial_positions) pre_union.insert(trace.initial_positions.begin(), trace.initial_positions.end());
  CHECK(std::vector<Configuration>(pre_union.begin(), pre_union.end()) == trace.discovered);
  if (trace.terminated_by == Termination::consensus) {
    CHECK(is_consensus(trace.rounds.back().post_positions));
  } else {
    CHECK(trace.rounds.size() == static_cast<std::size_t>(p.t_max));
  }
}

}  // namespace

TEST_CASE("alpha_at") {
  const auto lin = AlphaSchedule::linear(0.0, 1.0);
  CHECK(alpha_at(lin, 1, 1000) == 0.0);
  CHECK(alpha_at(lin, 1000, 1000) == 1.0);
  CHECK(alpha_at(lin, 501, 1001) == 0.5);
  CHECK(alpha_at(lin, 1, 1) == 0.0);
  for (int t : {1, 7, 500, 1000}) CHECK(alpha_at(AlphaSchedule::constant(0.5), t, 1000) == 0.5);

  const auto pw = AlphaSchedule::piecewise({{1, 0.1}, {10, 0.6}, {20, 0.9}});
  CHECK(alpha_at(pw, 1, 30) == 0.1);
  CHECK(alpha_at(pw, 9, 30) == 0.1);
  CHECK(alpha_at(pw, 10, 30) == 0.6);
  CHECK(alpha_at(pw, 30, 30) == 0.9);

  CHECK_THROWS_AS(alpha_at(lin, 0, 10), ParameterError);
  CHECK_THROWS_AS(alpha_at(lin, 11, 10), ParameterError);
  CHECK_THROWS_AS(AlphaSchedule::constant(1.5), ParameterError);
  CHECK_THROWS_AS(AlphaSchedule::piecewise({{2, 0.1}}), ParameterError);
  CHECK_THROWS_AS(AlphaSchedule::piecewise({{1, 0.1}, {1, 0.2}}), ParameterError);
}

TEST_CASE("alpha schedules stay in [0,1] and round-trip through text") {
  const std::vector<AlphaSchedule> schedules{AlphaSchedule::constant(0.3), AlphaSchedule::linear(0.0, 1.0),
                                             AlphaSchedule::linear(0.9, 0.1),
                                             AlphaSchedule::piecewise({{1, 0.0}, {5, 0.25}, {50, 1.0}})};
  for (const auto& s : schedules) {
    CHECK(AlphaSchedule::parse(s.describe()) == s);
    for (int t_max : {1, 2, 3, 997})
      for (int t = 1; t <= t_max; ++t) {
        const double a = alpha_at(s, t, t_max);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
      }
  }
  CHECK_THROWS_AS(AlphaSchedule::parse("cosine:1"), ParameterError);
  CHECK_THROWS_AS(AlphaSchedule::parse("linear:0"), ParameterError);
}

TEST_CASE("integrate endpoints") {
  Rng rng(1);
  const auto none = [](const Configuration&) { return 0.0; };
  for (int trial = 0; trial < 200; ++trial) {
    const Configuration a(12, rng()), b(12, rng());
    CHECK(integrate(a, b, 0.0, IntegrationPolicy::unconditional, none, rng) == a);
    CHECK(integrate(a, b, 1.0, IntegrationPolicy::unconditional, none, rng) == b);
  }
  CHECK_THROWS_AS(integrate(Configuration(3), Configuration(3), 1.1, IntegrationPolicy::unconditional, none, rng),
                  ParameterError);
  CHECK_THROWS_AS(integrate(Configuration(3), Configuration(4), 0.5, IntegrationPolicy::unconditional, none, rng),
                  DimensionError);
}

TEST_CASE("integrate adopts differing bits with probability alpha") {
  Rng rng(2024);
  const auto cur = Configuration::from_string("0000001111");
  const auto prop = Configuration::from_string("1111110000");
  const auto none = [](const Configuration&) { return 0.0; };
  // Six differing components.
  const auto cur6 = Configuration::from_string("0000000000");
  const auto prop6 = Configuration::from_string("1111110000");
  const int trials = 100000;
  double adopted = 0.0;
  std::vector<int> per_component(10, 0);
  for (int t = 0; t < trials; ++t) {
    const auto out = integrate(cur6, prop6, 0.5, IntegrationPolicy::unconditional, none, rng);
    adopted += hamming_distance(out, cur6);
    for (int i = 0; i < 10; ++i) per_component[std::size_t(i)] += out[i];
    // Equal components never change.
    CHECK(((out.bits() ^ cur6.bits()) & ~(prop6.bits() ^ cur6.bits())) == 0);
  }
  const double mean_adopted = adopted / trials;
  CHECK(mean_adopted >= 2.95);
  CHECK(mean_adopted <= 3.05);
  for (int i = 0; i < 6; ++i) CHECK(per_component[std::size_t(i)] / double(trials) == doctest::Approx(0.5).epsilon(0.02));

  // Componentwise expectation (1 - a) * current + a * proposal.
  for (double a : {0.2, 0.8}) {
    std::vector<double> mean_bit(10, 0.0);
    for (int t = 0; t < 20000; ++t) {
      const auto out = integrate(cur, prop, a, IntegrationPolicy::unconditional, none, rng);
      for (int i = 0; i < 10; ++i) mean_bit[std::size_t(i)] += out[i];
    }
    for (int i = 0; i < 10; ++i)
      CHECK(mean_bit[std::size_t(i)] / 20000 == doctest::Approx((1 - a) * cur[i] + a * prop[i]).epsilon(0.03));
  }
}

TEST_CASE("self-interested integration only accepts improving proposals") {
  Rng rng(3);
  const auto value = [](const Configuration& x) { return static_cast<double>(x.bits()); };
  const auto low = Configuration::from_string("0001");
  const auto high = Configuration::from_string("1110");
  CHECK(integrate(high, low, 1.0, IntegrationPolicy::self_interested, value, rng) == high);
  CHECK(integrate(low, high, 1.0, IntegrationPolicy::self_interested, value, rng) == high);
  CHECK(integrate(low, low, 1.0, IntegrationPolicy::self_interested, value, rng) == low);
}

TEST_CASE("select_proposer") {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) CHECK(select_proposer(1, rng) == 0);
  std::vector<int> counts(5, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[std::size_t(select_proposer(5, rng))];
  for (int c : counts) {
    CHECK(c / double(draws) >= 0.19);
    CHECK(c / double(draws) <= 0.21);
  }
  Rng a(77), b(77);
  for (int i = 0; i < 50; ++i) CHECK(select_proposer(7, a) == select_proposer(7, b));
  CHECK_THROWS_AS(select_proposer(0, rng), ParameterError);
}

TEST_CASE("is_consensus") {
  CHECK(is_consensus({Configuration::from_string("0101")}));
  auto x = Configuration::from_string("0101");
  CHECK(is_consensus({x, x}));
  CHECK_FALSE(is_consensus({x, x.flipped(2)}));
  CHECK_THROWS_AS(is_consensus({}), ParameterError);

  Rng rng(4);
  const auto none = [](const Configuration&) { return 0.0; };
  const Configuration proposal(8, rng());
  std::vector<Configuration> post{proposal};
  for (int i = 0; i < 4; ++i)
    post.push_back(integrate(Configuration(8, rng()), proposal, 1.0, IntegrationPolicy::unconditional, none, rng));
  CHECK(is_consensus(post));
}

TEST_CASE("run_deliberation: lone agent") {
  for (double alpha : {0.0, 0.5, 1.0}) {
    auto p = small_params(10, 5, 1, alpha, 12);
    const auto beliefs = beliefs_for(p);
    const auto trace = run_deliberation(p, beliefs);
    CHECK(trace.discovered.size() == 1);
    CHECK(trace.rounds.size() == 1);
    CHECK(trace.terminated_by == Termination::consensus);
    check_trace_invariants(trace, beliefs);
  }
}

TEST_CASE("run_deliberation: N=10 K=5 m=5 T=1000 yields valid traces") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    DeliberationParams p = small_params(10, 5, 5, 0.1 + 0.15 * double(seed), seed);
    p.t_max = 1000;
    const auto beliefs = beliefs_for(p);
    check_trace_invariants(run_deliberation(p, beliefs), beliefs);
  }
}

TEST_CASE("run_deliberation: variants keep the invariants") {
  std::uint64_t seed = 100;
  for (auto policy : {IntegrationPolicy::unconditional, IntegrationPolicy::self_interested})
    for (double w : {0.0, 0.5})
      for (int d : {1, 2})
        for (bool count_initial : {false, true}) {
          DeliberationParams p = small_params(8, 3, 4, 0.3, ++seed);
          p.integration_policy = policy;
          p.divergence_weight = w;
          p.d = d;
          p.t_max = 60;
          p.count_initial_positions = count_initial;
          p.stop_on_consensus = (seed % 2) == 0;
          p.schedule = AlphaSchedule::linear(0.0, 1.0);
          const auto beliefs = beliefs_for(p);
          const auto trace = run_deliberation(p, beliefs);
          check_trace_invariants(trace, beliefs);
          if (count_initial)
            for (const auto& x : trace.initial_positions)
              CHECK(std::binary_search(trace.discovered.begin(), trace.discovered.end(), x));
        }
}

TEST_CASE("run_deliberation: alpha=0 matches a hand-executed oracle on a dumped landscape") {
  DeliberationParams p = small_params(4, 1, 2, 0.0, 31);
  p.t_max = 25;
  p.stop_on_consensus = false;
  const auto beliefs = beliefs_for(p);
  std::stringstream dumped;
  dump_landscape(beliefs.truth(), dumped);
  const auto table = load_landscape(dumped);
  const auto eval = [&](const std::string& s) { return oracle::fitness(table, s); };

  const auto trace = run_deliberation(p, beliefs);
  REQUIRE(trace.rounds.size() == 25);
  std::vector<std::string> peaks;
  for (const auto& x : trace.initial_positions) peaks.push_back(oracle::climb(eval, x.to_string()));
  for (const auto& r : trace.rounds)
    for (int i = 0; i < 2; ++i) {
      CHECK(r.pre_positions[std::size_t(i)].to_string() == peaks[std::size_t(i)]);
      CHECK(r.post_positions[std::size_t(i)].to_string() == peaks[std::size_t(i)]);
    }
  CHECK(trace.discovered.size() == std::set<std::string>(peaks.begin(), peaks.end()).size());
}

TEST_CASE("run_deliberation: alpha=0 aligned freezes agents; alpha=1 ends in round 1") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto p = small_params(10, 9, 5, 0.0, seed);
    const auto b = beliefs_for(p);
    CHECK(run_deliberation(p, b).discovered.size() <= 5);
    p.schedule = AlphaSchedule::constant(1.0);
    const auto t1 = run_deliberation(p, b);
    CHECK(t1.rounds.size() == 1);
    CHECK(t1.rounds[0].consensus_after);
  }
}

TEST_CASE("run_deliberation: identical starting points under aligned beliefs give one solution") {
  auto p = small_params(10, 5, 5, 0.5, 4);
  const auto b = beliefs_for(p);
  const auto trace = run_deliberation(p, b, std::vector<Configuration>(5, Configuration::from_string("0110100101")));
  CHECK(trace.discovered.size() == 1);
  CHECK(trace.terminated_by == Termination::consensus);
}

TEST_CASE("run_deliberation: determinism and parameter errors") {
  auto p = small_params(10, 5, 5, 0.3, 9);
  p.divergence_weight = 0.5;
  const auto b = beliefs_for(p);
  CHECK(run_deliberation(p, b) == run_deliberation(p, b));

  auto wrong_m = p;
  wrong_m.m = 4;
  CHECK_THROWS_AS(run_deliberation(wrong_m, b), ParameterError);
  auto wrong_w = p;
  wrong_w.divergence_weight = 0.0;
  CHECK_THROWS_AS(run_deliberation(wrong_w, b), ParameterError);
  auto wrong_d = p;
  wrong_d.d = 11;
  CHECK_THROWS_AS(run_deliberation(wrong_d, b), ParameterError);
  auto wrong_t = p;
  wrong_t.t_max = 0;
  CHECK_THROWS_AS(run_deliberation(wrong_t, b), ParameterError);
  CHECK_THROWS_AS(run_deliberation(p, b, std::vector<Configuration>(3, Configuration(10))), ParameterError);
}

TEST_CASE("dm_select") {
  const auto L = build_nk_landscape(6, 3, NeighborScheme::random, 55);
  DeliberationTrace trace;
  CHECK_THROWS_AS(dm_select(trace, L), StateError);

  trace.discovered = {Configuration::from_string("010101")};
  CHECK(dm_select(trace, L).first.to_string() == "010101");

  Rng rng(6);
  std::set<Configuration> picks;
  while (picks.size() < 8) picks.insert(Configuration(6, rng()));
  trace.discovered.assign(picks.begin(), picks.end());
  std::vector<std::string> strings;
  for (const auto& x : trace.discovered) strings.push_back(x.to_string());
  const auto [x, v] = dm_select(trace, L);
  const auto [ox, ov] = oracle::argmax(strings, [&](const std::string& s) { return oracle::fitness(L, s); });
  CHECK(x.to_string() == ox);
  CHECK(v == ov);

  // Ties go to the smallest configuration.
  const auto flat = [](const Configuration&) { return 0.5; };
  CHECK(dm_select(trace, flat).first == trace.discovered.front());
}

TEST_CASE("dm_select is optimal under each evaluator on misaligned runs") {
  auto p = small_params(10, 5, 5, 0.3, 71);
  p.divergence_weight = 0.5;
  const auto b = beliefs_for(p);
  const auto trace = run_deliberation(p, b);
  const auto truth_pick = dm_select(trace, b.truth());
  const auto agent_pick = dm_select(trace, PerceivedFitness{&b, 0});
  for (const auto& x : trace.discovered) {
    CHECK(truth_pick.second >= b.truth().fitness(x));
    CHECK(agent_pick.second >= b.perceived_fitness(0, x));
  }
}

TEST_CASE("trace CSV export") {
  auto p = small_params(6, 2, 3, 0.5, 3);
  p.t_max = 5;
  p.stop_on_consensus = false;
  const auto b = beliefs_for(p);
  const auto trace = run_deliberation(p, b);
  std::ostringstream out;
  write_trace_csv(trace, b, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "round,alpha,proposer,pre_positions,pre_fitness,post_positions,post_fitness,consensus_after");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    REQUIRE(fields.size() == 8);
    const auto& r = trace.rounds[std::size_t(rows - 1)];
    CHECK(fields[0] == std::to_string(r.round));
    CHECK(fields[3] == r.pre_positions[0].to_string() + ";" + r.pre_positions[1].to_string() + ";" +
                           r.pre_positions[2].to_string());
    // Fitness values parse back exactly.
    std::stringstream fit(fields[4]);
    std::string first;
    std::getline(fit, first, ';');
    CHECK(std::stod(first) == b.perceived_fitness(0, r.pre_positions[0]));
  }
  CHECK(rows == 5);
}
