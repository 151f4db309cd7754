#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mdist {

using BigInt = mpz_class;
using Rational = mpq_class;

// "num/den", always with an explicit denominator.
std::string to_string(const Rational& q);
std::string to_string(const BigInt& n);

// Digits are little-endian: digits[0] is the least significant.
struct Word {
  int base = 10;
  std::vector<int> digits;

  Word() = default;
  Word(int base, std::vector<int> digits);

  std::size_t size() const { return digits.size(); }
  bool empty() const { return digits.empty(); }
  // Digit string, least significant first unless msb_first. Bases above 10
  // separate digits with '.'.
  std::string str(bool msb_first = false) const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

BigInt word_to_integer(const Word& w);
Word integer_to_word(const BigInt& n, int base);

using ResidueVector = std::vector<std::int64_t>;

// Moduli (a_1..a_r); residue vectors are indexed in mixed radix with the
// first component most significant, so index order is lexicographic.
class ModulusVector {
 public:
  ModulusVector() = default;
  explicit ModulusVector(std::vector<std::int64_t> moduli);

  std::size_t rank() const { return moduli_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<std::int64_t>& moduli() const { return moduli_; }
  std::int64_t operator[](std::size_t j) const { return moduli_[j]; }

  std::size_t index(const ResidueVector& b) const;
  ResidueVector residue(std::size_t index) const;
  ResidueVector reduce(ResidueVector b) const;
  std::size_t add(std::size_t x, std::size_t y) const;
  std::size_t sub(std::size_t x, std::size_t y) const;

  friend bool operator==(const ModulusVector&, const ModulusVector&) = default;

 private:
  std::vector<std::int64_t> moduli_;
  std::size_t size_ = 1;
};

// f(d * g^i) mod a for a g-additive f.
class GAdditiveFunction {
 public:
  enum class Kind { identity, sum_digits, table };

  struct TableEntry {
    int digit;
    std::int64_t position;
    std::int64_t value;
  };

  static GAdditiveFunction identity(int base, std::int64_t modulus);
  static GAdditiveFunction sum_digits(int base, std::int64_t modulus);
  // Values for every digit d >= 1 and position i < ell + period; larger
  // positions reduce to ell + (i - ell) mod period.
  static GAdditiveFunction from_table(int base, std::int64_t modulus, std::int64_t ell,
                                      std::int64_t period, const std::vector<TableEntry>& entries);

  Kind kind() const { return kind_; }
  int base() const { return base_; }
  std::int64_t modulus() const { return modulus_; }
  std::string name() const;
  std::int64_t table_ell() const { return ell_; }
  std::int64_t table_period() const { return period_; }

  std::int64_t at(int digit, std::uint64_t position) const;
  std::uint64_t reduced_position(std::uint64_t position) const;

 private:
  GAdditiveFunction(Kind kind, int base, std::int64_t modulus)
      : kind_(kind), base_(base), modulus_(modulus) {}

  Kind kind_;
  int base_;
  std::int64_t modulus_;
  std::int64_t ell_ = 0;
  std::int64_t period_ = 1;
  std::vector<std::int64_t> table_;  // [position * base + digit]
};

class GAdditiveFamily {
 public:
  explicit GAdditiveFamily(std::vector<GAdditiveFunction> functions);
  // (id mod a) alone, or (id mod a, sum_digits mod a2) when a2 > 0.
  static GAdditiveFamily id_and_sum(int base, std::int64_t a, std::int64_t a2 = 0);

  int base() const { return base_; }
  const ModulusVector& moduli() const { return moduli_; }
  const std::vector<GAdditiveFunction>& functions() const { return functions_; }

  ResidueVector contribution(int digit, std::uint64_t position) const;
  std::size_t contribution_index(int digit, std::uint64_t position) const;
  // Residues of f(g^offset * (w)_g).
  ResidueVector eval(const Word& w, std::uint64_t offset = 0) const;
  std::size_t eval_index(const Word& w, std::uint64_t offset = 0) const;

 private:
  int base_;
  std::vector<GAdditiveFunction> functions_;
  ModulusVector moduli_;
};

inline ResidueVector eval_family(const GAdditiveFamily& fam, const Word& w) { return fam.eval(w); }

struct EventualPeriod {
  std::int64_t p = 1;
  std::int64_t ell = 0;
  friend bool operator==(const EventualPeriod&, const EventualPeriod&) = default;
};

EventualPeriod find_eventual_period(const GAdditiveFamily& fam);
// True when f(d g^{i+p}) = f(d g^i) for every digit and i in [ell, ell + span*p).
bool is_eventual_period(const GAdditiveFamily& fam, EventualPeriod ep, int span = 1);

std::int64_t totient(std::int64_t n);
std::int64_t euler_period(int g, std::int64_t a, std::int64_t a2);
std::int64_t delta_gcd(std::int64_t modulus_product, std::span<const int> digits);
std::int64_t powmod(std::int64_t base, std::uint64_t exp, std::int64_t mod);

}  // namespace mdist
