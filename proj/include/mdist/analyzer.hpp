#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdist/numeral.hpp"
#include "mdist/shift.hpp"

namespace mdist {

enum class Verdict { uniform, subgroup_uniform, zero_or_nonexistent, not_uniform_with_witness, unsupported };
enum class Method { missing_digits, general_pair, gelfond, sft, chain_direct };

std::string verdict_name(Verdict v);
std::string method_name(Method m);

// nullopt marks a cell whose limit does not exist.
using LimitValue = std::optional<Rational>;

// Limit of the census frequencies along horizons g^m with m = phase (mod modulus).
struct PhaseTable {
  std::int64_t phase = 0;
  std::int64_t modulus = 1;
  std::vector<Rational> values;
};

struct AnalysisReport {
  std::string shift;
  int base = 10;
  std::vector<std::int64_t> moduli;
  std::vector<std::string> functions;
  Verdict verdict = Verdict::unsupported;
  Method method = Method::chain_direct;
  std::vector<LimitValue> table;  // by residue index, lexicographic
  std::optional<std::int64_t> delta;
  std::optional<std::vector<std::int64_t>> subgroup;  // generator per coordinate
  std::vector<Word> witness_words;
  std::vector<BigInt> witness_integers;
  std::vector<ResidueVector> witness_residues;
  // Exhausted search: the reachable residue closure proving nonexistence.
  std::optional<std::size_t> certificate_states;
  std::vector<ResidueVector> certificate_reachable;
  // Residue shift of the coset holding integers of each length class.
  std::vector<std::pair<std::int64_t, ResidueVector>> cosets;
  std::int64_t coset_period = 0;
  std::vector<PhaseTable> phases;
  std::optional<bool> markov_condition;
  bool sft_shortcut = false;
  std::vector<std::string> notes;

  ModulusVector modulus_vector() const { return ModulusVector(moduli); }
  // Value at a residue vector; nullopt when the limit does not exist.
  LimitValue at(const ResidueVector& b) const;
};

// (id mod a) when a2 <= 1, else (id mod a, digit sum mod a2).
GAdditiveFamily pair_family(int g, std::int64_t a, std::int64_t a2);

// Exact limiting census frequencies per horizon phase, for k-regular
// presentations. Counts every word of the language (through the prefix
// tracker) and drops representations with a most significant zero.
struct HorizonProfile {
  std::int64_t period = 1;
  std::int64_t offset = 0;
  std::vector<std::vector<Rational>> tables;  // tables[r]: horizons m = offset + r (mod period)
  const std::vector<Rational>& at_horizon(std::int64_t m) const;
  bool constant() const;
};

HorizonProfile horizon_profile(const FischerCover& fc, const GAdditiveFamily& family);

AnalysisReport analyze_missing_digits(int g, std::vector<int> digits, std::int64_t a, std::int64_t a2 = 1);
AnalysisReport analyze_general_pair(int g, std::vector<int> digits, std::int64_t a, std::int64_t a2);
AnalysisReport analyze_naturals(int g, std::int64_t a, std::int64_t a2);
AnalysisReport analyze_sft(const ShiftSpec& spec, std::int64_t a, std::int64_t a2);
AnalysisReport chain_direct(const ShiftSpec& spec, const GAdditiveFamily& family);

// Picks the most specific procedure for the input.
AnalysisReport analyze(const ShiftSpec& spec, const GAdditiveFamily& family);

std::string describe(const ShiftSpec& spec);

}  // namespace mdist
