#include "nkdelib/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "json.hpp"
#include "nkdelib/rng.hpp"

namespace nkd {

namespace {

void validate_shape(int n, int k) {
  if (n < 1 || n > kMaxComponents) throw ParameterError("n must be in [1, 64], got " + std::to_string(n));
  if (k < 0 || k > n - 1)
    throw ParameterError("k must be in [0, n-1], got k=" + std::to_string(k) + " n=" + std::to_string(n));
  // Table size 2^(k+1) doubles.
  if (k > 24) throw ParameterError("k > 24 would need contribution tables larger than 2^25 entries");
}

constexpr double kBelowOne = 0x1.fffffffffffffp-1;

}  // namespace

NKLandscape::NKLandscape(int n, int k, std::uint64_t seed, std::vector<std::vector<int>> neighbors,
                         std::vector<std::vector<double>> tables)
    : n_(n), k_(k), seed_(seed), neighbors_(std::move(neighbors)), tables_(std::move(tables)) {
  validate_shape(n, k);
  if (neighbors_.size() != static_cast<std::size_t>(n) || tables_.size() != static_cast<std::size_t>(n))
    throw ParameterError("landscape needs one neighbor list and one table per component");
  const std::size_t entries = std::size_t{1} << (k + 1);
  for (int i = 0; i < n; ++i) {
    const auto& nb = neighbors_[static_cast<std::size_t>(i)];
    if (nb.size() != static_cast<std::size_t>(k)) throw ParameterError("neighbor list must have exactly k entries");
    for (std::size_t a = 0; a < nb.size(); ++a) {
      if (nb[a] < 0 || nb[a] >= n || nb[a] == i) throw ParameterError("neighbor index out of range or equal to self");
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (nb[a] == nb[b]) throw ParameterError("neighbor indices must be distinct");
    }
    const auto& table = tables_[static_cast<std::size_t>(i)];
    if (table.size() != entries) throw ParameterError("contribution table must have 2^(k+1) entries");
    for (double v : table)
      if (!(v >= 0.0 && v < 1.0)) throw ParameterError("contribution values must lie in [0, 1)");
  }
}

double NKLandscape::fitness_packed(std::uint64_t bits) const {
  double sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    std::uint64_t state = (bits >> (n_ - 1 - i)) & 1U;
    for (int j : neighbors_[static_cast<std::size_t>(i)]) state = (state << 1) | ((bits >> (n_ - 1 - j)) & 1U);
    sum += tables_[static_cast<std::size_t>(i)][state];
  }
  return std::min(sum / n_, kBelowOne);
}

double NKLandscape::fitness(const Configuration& x) const {
  if (x.size() != n_)
    throw DimensionError("configuration has length " + std::to_string(x.size()) + ", landscape expects " +
                         std::to_string(n_));
  return fitness_packed(x.bits());
}

NKLandscape build_nk_landscape(int n, int k, NeighborScheme scheme, std::uint64_t seed) {
  validate_shape(n, k);
  Rng rng(seed);
  std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& nb = neighbors[static_cast<std::size_t>(i)];
    if (scheme == NeighborScheme::adjacent) {
      for (int j = 1; j <= k; ++j) nb.push_back((i + j) % n);
      continue;
    }
    // Partial Fisher-Yates over the other n-1 components.
    std::vector<int> others;
    others.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    for (int j = 0; j < k; ++j) {
      const auto pick = j + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n - 1 - j)));
      std::swap(others[static_cast<std::size_t>(j)], others[static_cast<std::size_t>(pick)]);
      nb.push_back(others[static_cast<std::size_t>(j)]);
    }
  }
  std::vector<std::vector<double>> tables(static_cast<std::size_t>(n));
  for (auto& table : tables) {
    table.resize(std::size_t{1} << (k + 1));
    for (double& v : table) v = uniform01(rng);
  }
  return NKLandscape(n, k, seed, std::move(neighbors), std::move(tables));
}

BeliefStructure::BeliefStructure(NKLandscape truth, std::vector<NKLandscape> divergence, double divergence_weight)
    : truth_(std::move(truth)), divergence_(std::move(divergence)), w_(divergence_weight) {
  if (!(w_ >= 0.0 && w_ <= 1.0)) throw ParameterError("divergence weight must lie in [0, 1]");
  if (divergence_.empty()) throw ParameterError("belief structure needs at least one agent");
  for (const auto& b : divergence_)
    if (b.n() != truth_.n() || b.k() != truth_.k())
      throw ParameterError("divergence landscapes must share n and k with the truth landscape");
}

double BeliefStructure::perceived_fitness(int agent, const Configuration& x) const {
  if (agent < 0 || agent >= agent_count())
    throw ParameterError("agent index " + std::to_string(agent) + " out of range");
  if (w_ == 0.0) return truth_.fitness(x);
  const double b = divergence_[static_cast<std::size_t>(agent)].fitness(x);
  if (w_ == 1.0) return b;
  return std::min((1.0 - w_) * truth_.fitness(x) + w_ * b, kBelowOne);
}

BeliefStructure build_beliefs(int n, int k, int m, double divergence_weight, NeighborScheme scheme,
                              std::uint64_t seed) {
  if (m < 1) throw ParameterError("agent count m must be positive");
  NKLandscape truth = build_nk_landscape(n, k, scheme, substream_seed(seed, 0));
  std::vector<NKLandscape> divergence;
  divergence.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    divergence.push_back(build_nk_landscape(n, k, scheme, substream_seed(seed, static_cast<std::uint64_t>(i) + 1)));
  return BeliefStructure(std::move(truth), std::move(divergence), divergence_weight);
}

std::pair<Configuration, double> global_optimum(const NKLandscape& landscape) {
  const int n = landscape.n();
  if (n > kMaxEnumerableComponents) throw CapacityError("global optimum enumeration needs n <= 20");
  std::uint64_t best = 0;
  double best_value = landscape.fitness_packed(0);
  for (std::uint64_t b = 1; b < (std::uint64_t{1} << n); ++b) {
    const double v = landscape.fitness_packed(b);
    if (v > best_value) {
      best = b;
      best_value = v;
    }
  }
  return {Configuration(n, best), best_value};
}

void dump_landscape(const NKLandscape& landscape, std::ostream& out) {
  nlohmann::ordered_json j;
  j["n"] = landscape.n();
  j["k"] = landscape.k();
  j["seed"] = landscape.seed();
  j["neighbor_map"] = landscape.neighbors();
  j["contribution_tables"] = landscape.tables();
  out << j.dump(1) << '\n';
}

NKLandscape load_landscape(std::istream& in) {
  // Leading '#' lines are a free-form comment header.
  std::string text, line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header && !line.empty() && line.front() == '#') continue;
    header = false;
    text += line;
    text += '\n';
  }
  try {
    const auto j = nlohmann::json::parse(text);
    return NKLandscape(j.at("n").get<int>(), j.at("k").get<int>(), j.at("seed").get<std::uint64_t>(),
                       j.at("neighbor_map").get<std::vector<std::vector<int>>>(),
                       j.at("contribution_tables").get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed landscape file: ") + e.what());
  }
}

}  // namespace nkd
