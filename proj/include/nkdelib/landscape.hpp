#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "nkdelib/configuration.hpp"

namespace nkd {

enum class NeighborScheme { random, adjacent };

/// An NK fitness landscape over length-n binary configurations.
///
/// Component i contributes `tables()[i][state]`, where `state` packs the
/// component's own bit (most significant) followed by its k neighbor bits in
/// `neighbors()[i]` order. Fitness is the mean contribution.
class NKLandscape {
 public:
  // Validates the invariants (neighbor lists distinct and excluding self,
  // 2^(k+1) entries per table, entries in [0,1)) and throws ParameterError
  // on violation.
  NKLandscape(int n, int k, std::uint64_t seed, std::vector<std::vector<int>> neighbors,
              std::vector<std::vector<double>> tables);

  int n() const { return n_; }
  int k() const { return k_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }
  const std::vector<std::vector<double>>& tables() const { return tables_; }

  // Throws DimensionError on length mismatch.
  double fitness(const Configuration& x) const;
  double operator()(const Configuration& x) const { return fitness(x); }

  // Unchecked evaluation on a packed word; used by the tabulation fast path.
  double fitness_packed(std::uint64_t bits) const;

  friend bool operator==(const NKLandscape&, const NKLandscape&) = default;

 private:
  int n_;
  int k_;
  std::uint64_t seed_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<double>> tables_;
};

NKLandscape build_nk_landscape(int n, int k, NeighborScheme scheme, std::uint64_t seed);

inline double fitness(const NKLandscape& landscape, const Configuration& x) { return landscape.fitness(x); }

/// Ground truth plus one divergence landscape per agent. Agent i perceives
/// (1 - w) * truth(x) + w * divergence[i](x).
class BeliefStructure {
 public:
  BeliefStructure(NKLandscape truth, std::vector<NKLandscape> divergence, double divergence_weight);

  const NKLandscape& truth() const { return truth_; }
  const std::vector<NKLandscape>& divergence_landscapes() const { return divergence_; }
  double divergence_weight() const { return w_; }
  int agent_count() const { return static_cast<int>(divergence_.size()); }

  double perceived_fitness(int agent, const Configuration& x) const;

 private:
  NKLandscape truth_;
  std::vector<NKLandscape> divergence_;
  double w_;
};

// Truth from substream 0 of `seed`, agent i's divergence landscape from
// substream i + 1.
BeliefStructure build_beliefs(int n, int k, int m, double divergence_weight, NeighborScheme scheme,
                              std::uint64_t seed);

inline double perceived_fitness(const BeliefStructure& beliefs, int agent, const Configuration& x) {
  return beliefs.perceived_fitness(agent, x);
}

// Callable view of one agent's perceived fitness.
struct PerceivedFitness {
  const BeliefStructure* beliefs;
  int agent;
  double operator()(const Configuration& x) const { return beliefs->perceived_fitness(agent, x); }
};

/// Precomputed values of an evaluator over all 2^n configurations.
class FitnessTable {
 public:
  template <class Evaluate>
  FitnessTable(int n, Evaluate&& evaluate) : n_(n) {
    if (n < 0 || n > kMaxEnumerableComponents) throw CapacityError("fitness table needs n <= 20");
    values_.resize(std::size_t{1} << n);
    for (std::uint64_t b = 0; b < values_.size(); ++b) values_[b] = evaluate(Configuration(n, b));
  }

  int n() const { return n_; }
  double operator()(const Configuration& x) const {
    if (x.size() != n_) throw DimensionError("configuration length does not match fitness table");
    return values_[x.bits()];
  }
  double at(std::uint64_t bits) const { return values_[bits]; }

 private:
  int n_;
  std::vector<double> values_;
};

// Argmax over all 2^n configurations; ties go to the lexicographically
// smallest. Throws CapacityError when n > 20.
std::pair<Configuration, double> global_optimum(const NKLandscape& landscape);

// Structured-text (JSON) serialization. Reals are written in shortest
// round-trip form, so load(dump(L)) == L exactly. load_landscape skips
// leading lines that start with '#'.
void dump_landscape(const NKLandscape& landscape, std::ostream& out);
NKLandscape load_landscape(std::istream& in);

}  // namespace nkd
