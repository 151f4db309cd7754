#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mdist/analyzer.hpp"
#include "mdist/numeral.hpp"
#include "mdist/shift.hpp"

namespace mdist {

// g^m, or DomainError when it does not fit in 64 bits.
std::uint64_t horizon(int g, int m);

// Integers of A in [0, limit) with their canonical words, ascending.
void visit_set(const ShiftSpec& spec, std::uint64_t limit, const std::function<void(std::uint64_t, const Word&)>& fn);
std::vector<std::uint64_t> enumerate_set(const ShiftSpec& spec, std::uint64_t limit);

struct CensusTable {
  std::uint64_t limit = 0;
  int base = 10;
  ModulusVector moduli;
  std::vector<std::uint64_t> counts;  // by residue index
  std::uint64_t total = 0;
  // by_length[t][residue index]: integers with exactly t digits (0 has one).
  std::vector<std::vector<std::uint64_t>> by_length;

  std::vector<Rational> frequencies() const;
  // Counts of integers below g^m for m <= the largest enumerated length.
  std::vector<std::uint64_t> counts_below_power(int m) const;
};

// threads = 0 uses the available parallelism.
CensusTable census(const ShiftSpec& spec, const GAdditiveFamily& family, std::uint64_t limit, unsigned threads = 0);
CensusTable census_horizon(const ShiftSpec& spec, const GAdditiveFamily& family, int m, unsigned threads = 0);

struct Comparison {
  double tv = 0;
  double max_cell_error = 0;
  bool pass = false;
  double tolerance = 0;
  // Cells whose limit does not exist; reported, not scored.
  std::vector<ResidueVector> oscillating;
};

Comparison compare(const AnalysisReport& report, const CensusTable& table, double tolerance);

// Prediction used for distances: known limits as given, cells without a
// limit share the remaining mass evenly.
std::vector<double> predicted_frequencies(const AnalysisReport& report);

struct ConvergenceRow {
  int m;
  double tv;
};
std::vector<ConvergenceRow> convergence_table(const ShiftSpec& spec, const GAdditiveFamily& family,
                                              const AnalysisReport& report, int m_max, unsigned threads = 0);

}  // namespace mdist
