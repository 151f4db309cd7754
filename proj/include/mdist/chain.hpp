#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdist/numeral.hpp"
#include "mdist/shift.hpp"

namespace mdist {

using RationalMatrix = std::vector<std::vector<Rational>>;
using CountMatrix = std::vector<std::vector<BigInt>>;
using RationalDistribution = std::vector<Rational>;

// Z_a x V, residues lexicographic and nodes in cover order within each.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(ModulusVector moduli, std::vector<std::string> node_names);

  std::size_t size() const { return moduli_.size() * nodes_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  const ModulusVector& moduli() const { return moduli_; }
  const std::vector<std::string>& node_names() const { return nodes_; }

  std::size_t index(std::size_t residue_index, int node) const { return residue_index * nodes_.size() + static_cast<std::size_t>(node); }
  std::size_t residue_index(std::size_t state) const { return state / nodes_.size(); }
  int node(std::size_t state) const { return static_cast<int>(state % nodes_.size()); }
  // "(b1,...,br|node)"
  std::string label(std::size_t state) const;

 private:
  ModulusVector moduli_;
  std::vector<std::string> nodes_;
};

struct ChainOptions {
  // Must be a multiple of the family's least period.
  std::optional<std::int64_t> period;
  // Restriction length and first index of the matrix window; defaults to
  // max(eventual-period ell, shortest synchronizing length, 1).
  std::optional<std::int64_t> ell;
  // For sft1 specs, use the digit graph instead of the Fischer cover.
  bool sft_shortcut = false;
};

struct MarkovVerdict {
  std::int64_t i = 0;
  bool irreducible = false;
  bool aperiodic = false;
  int period = 0;
  std::vector<std::vector<int>> sccs;
};

struct LimitDistribution {
  bool exists = false;
  std::vector<int> support;
  std::optional<Rational> uniform_value;  // when the limit is constant on the support
  RationalDistribution limit;             // full state vector, when it exists
  std::vector<std::vector<int>> cyclic_classes;
  int period = 1;  // lcm of the class periods on the support
};

struct ChainClass {
  std::vector<int> states;
  RationalMatrix matrix;
  RationalDistribution initial;
  Rational weight;
};

struct SpectralEstimate {
  double rho = 0;
  std::vector<double> tv;  // distance to the limit at n = 1..N
};

class ChainSystem {
 public:
  ChainSystem(FischerCover cover, GAdditiveFamily family, ChainOptions options = {});
  static ChainSystem from_spec(const ShiftSpec& spec, const GAdditiveFamily& family, ChainOptions options = {});

  const FischerCover& cover() const { return cover_; }
  const GAdditiveFamily& family() const { return family_; }
  const StateSpace& states() const { return states_; }
  int k() const { return k_; }
  std::int64_t period() const { return p_; }
  std::int64_t ell() const { return ell_; }
  // Least index from which the family is periodic.
  std::int64_t periodic_from() const { return periodic_from_; }
  std::vector<std::int64_t> window() const;

  std::vector<Word> extension_set(std::int64_t i, const ResidueVector& b, int from, int to) const;
  // Entries |E_i(b'-b, F, F')|.
  CountMatrix count_matrix(std::int64_t i) const;
  RationalMatrix transition_matrix(std::int64_t i) const;
  // Word counts over L^i restricted at ell, per state.
  std::vector<BigInt> initial_counts(std::int64_t i) const;
  RationalDistribution initial_distribution(std::int64_t i) const;
  RationalDistribution evolve(std::int64_t i, std::uint64_t n) const;
  std::vector<BigInt> evolve_counts(std::int64_t i, std::uint64_t n) const;

  MarkovVerdict markov_verdict(std::int64_t i) const;
  std::vector<MarkovVerdict> markov_condition() const;
  bool markov_condition_holds() const;

  LimitDistribution limit_distribution(std::int64_t i) const;
  std::vector<ChainClass> decompose_classes(std::int64_t i) const;
  SpectralEstimate spectral_gap_estimate(std::int64_t i, int steps = 20) const;

  // Positive-entry digraph of M_i.
  Adjacency support_graph(std::int64_t i) const;

 private:
  std::int64_t reduce(std::int64_t i) const;
  CountMatrix build_counts(std::int64_t i) const;
  const CountMatrix* cached(std::int64_t i) const;

  FischerCover cover_;
  GAdditiveFamily family_;
  StateSpace states_;
  int k_ = 0;
  std::int64_t p_ = 1;
  std::int64_t ell_ = 1;
  std::int64_t periodic_from_ = 0;
  std::vector<CountMatrix> window_counts_;
};

RationalMatrix to_rational(const CountMatrix& m, const BigInt& denominator);
Rational total(const RationalDistribution& d);

}  // namespace mdist
