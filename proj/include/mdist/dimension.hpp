#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdist/numeral.hpp"
#include "mdist/shift.hpp"

namespace mdist {

// Spectral radius of the counting automaton of the cover's language. Runs
// power iteration on A + I per strongly connected block.
double perron_eigenvalue(const Cover& cover);
double entropy(const Cover& cover);
// (log|L^n1| - log|L^n0|) / (n1 - n0)
double language_slope(const Cover& cover, std::size_t n0, std::size_t n1);

struct EmpiricalPoint {
  int m;
  std::uint64_t count;  // elements below g^m
  double ratio;         // log(count) / (m log g), 0 when count <= 1
};

struct DimensionEstimate {
  int base = 10;
  std::optional<double> eigenvalue;  // exact value log(eigenvalue) / log(base)
  std::optional<double> exact;
  std::vector<EmpiricalPoint> points;
  // Over the last third of the m range: least-squares slope of log(count)
  // against m log g, and the extreme ratios.
  double fit = 0;
  double lower = 0;
  double upper = 0;
  bool empty = false;  // no element below the horizon
  std::string note;
};

// counts[m-1] = |A ∩ [0, g^m)| for m = 1..counts.size().
DimensionEstimate fit_counts(int g, const std::vector<std::uint64_t>& counts);

DimensionEstimate mass_dimension(const ShiftSpec& spec, int m_max = 0);

struct Progression {
  std::int64_t a = 1;
  std::int64_t b = 0;
};

// Slopes of |A ∩ (aN + b) ∩ [0, g^m)| from the oracle, m = 1..m_max.
DimensionEstimate empirical_dimension(const ShiftSpec& spec, Progression p, int m_max, unsigned threads = 0);

enum class Transversality { equal_dimension, finite_intersection, unsupported };
std::string transversality_name(Transversality t);

struct TransversalityResult {
  Transversality verdict = Transversality::unsupported;
  Progression progression;
  std::optional<Word> witness;           // |w| >= max(1, a-1), (w)_g = b mod a
  std::vector<std::uint64_t> finite_set;  // the whole intersection, when finite
  std::size_t states = 0;                 // explored search states
  std::string note;
};

TransversalityResult transversality_check(const ShiftSpec& spec, Progression p);

// Words h d^k z (z in D^k) for k = 0..i_max concatenated in lexicographic
// order of z, with d the smallest digit of D.
class BlockSequence {
 public:
  BlockSequence(int g, std::vector<int> digits, int h, int i_max);

  int base() const { return g_; }
  int marker() const { return h_; }
  const std::vector<int>& sequence() const { return seq_; }
  // Words of W_k in order.
  std::vector<Word> block(int k) const;
  // Distinct integers read from subwords of length <= max_len, ascending.
  std::vector<std::uint64_t> integers(int max_len) const;
  // |{n < g^m read in the sequence, n = h mod g}| or all of them, m = 1..m_max.
  std::vector<std::uint64_t> counts(int m_max, bool marker_only) const;

 private:
  int g_, h_, i_max_;
  std::vector<int> digits_;
  std::vector<int> seq_;
};

BlockSequence block_sequence_shift(int g, std::vector<int> digits, int h, int i_max);

struct LadderStep {
  std::vector<int> gaps;
  double entropy = 0;
  TransversalityResult check;
  double dimension = 0;  // of A ∩ (aN + b)
};

// One step per prefix S_1 ⊂ S_2 ⊂ ... of the gap list.
std::vector<LadderStep> sgap_dimension_ladder(const std::vector<int>& gaps, Progression p);

}  // namespace mdist
