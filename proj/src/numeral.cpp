#include "mdist/numeral.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "mdist/errors.hpp"

namespace mdist {

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const BigInt& n) { return n.get_str(); }

Word::Word(int b, std::vector<int> ds) : base(b), digits(std::move(ds)) {
  if (base < 2) throw DomainError("base must be at least 2");
  for (int d : digits)
    if (d < 0 || d >= base) throw DomainError("digit " + std::to_string(d) + " outside base " + std::to_string(base));
}

std::string Word::str(bool msb_first) const {
  std::ostringstream out;
  auto emit = [&](auto first, auto last) {
    for (auto it = first; it != last; ++it) {
      if (base > 10 && it != first) out << '.';
      out << *it;
    }
  };
  if (msb_first)
    emit(digits.rbegin(), digits.rend());
  else
    emit(digits.begin(), digits.end());
  return out.str();
}

BigInt word_to_integer(const Word& w) {
  if (w.empty()) throw DomainError("empty word has no integer value");
  BigInt n = 0;
  for (auto it = w.digits.rbegin(); it != w.digits.rend(); ++it) n = n * w.base + *it;
  return n;
}

Word integer_to_word(const BigInt& n, int base) {
  if (base < 2) throw DomainError("base must be at least 2");
  if (n < 0) throw DomainError("negative integers are not represented");
  std::vector<int> digits;
  BigInt rest = n;
  do {
    BigInt q, r;
    mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(), static_cast<unsigned long>(base));
    digits.push_back(static_cast<int>(r.get_si()));
    rest = q;
  } while (rest != 0);
  return Word(base, std::move(digits));
}

namespace {

std::int64_t mod(std::int64_t x, std::int64_t m) {
  x %= m;
  return x < 0 ? x + m : x;
}

}  // namespace

ModulusVector::ModulusVector(std::vector<std::int64_t> moduli) : moduli_(std::move(moduli)) {
  if (moduli_.empty()) throw DomainError("at least one modulus required");
  size_ = 1;
  for (auto a : moduli_) {
    if (a < 1) throw DomainError("moduli must be positive");
    if (size_ > (std::size_t{1} << 40) / static_cast<std::size_t>(a)) throw DomainError("modulus product too large");
    size_ *= static_cast<std::size_t>(a);
  }
}

std::size_t ModulusVector::index(const ResidueVector& b) const {
  if (b.size() != moduli_.size()) throw DomainError("residue vector rank mismatch");
  std::size_t idx = 0;
  for (std::size_t j = 0; j < moduli_.size(); ++j) idx = idx * moduli_[j] + mod(b[j], moduli_[j]);
  return idx;
}

ResidueVector ModulusVector::residue(std::size_t idx) const {
  ResidueVector b(moduli_.size());
  for (std::size_t j = moduli_.size(); j-- > 0;) {
    b[j] = static_cast<std::int64_t>(idx % moduli_[j]);
    idx /= moduli_[j];
  }
  return b;
}

ResidueVector ModulusVector::reduce(ResidueVector b) const {
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = mod(b[j], moduli_[j]);
  return b;
}

std::size_t ModulusVector::add(std::size_t x, std::size_t y) const {
  if (moduli_.size() == 1) return (x + y) % size_;
  auto bx = residue(x), by = residue(y);
  for (std::size_t j = 0; j < bx.size(); ++j) bx[j] += by[j];
  return index(bx);
}

std::size_t ModulusVector::sub(std::size_t x, std::size_t y) const {
  if (moduli_.size() == 1) return (x + size_ - y) % size_;
  auto bx = residue(x), by = residue(y);
  for (std::size_t j = 0; j < bx.size(); ++j) bx[j] -= by[j];
  return index(bx);
}

std::int64_t powmod(std::int64_t base, std::uint64_t exp, std::int64_t m) {
  if (m == 1) return 0;
  __int128 result = 1, b = mod(base, m);
  while (exp) {
    if (exp & 1) result = result * b % m;
    b = b * b % m;
    exp >>= 1;
  }
  return static_cast<std::int64_t>(result);
}

GAdditiveFunction GAdditiveFunction::identity(int base, std::int64_t modulus) {
  if (base < 2) throw DomainError("base must be at least 2");
  if (modulus < 1) throw DomainError("modulus must be positive");
  return GAdditiveFunction(Kind::identity, base, modulus);
}

GAdditiveFunction GAdditiveFunction::sum_digits(int base, std::int64_t modulus) {
  if (base < 2) throw DomainError("base must be at least 2");
  if (modulus < 1) throw DomainError("modulus must be positive");
  return GAdditiveFunction(Kind::sum_digits, base, modulus);
}

GAdditiveFunction GAdditiveFunction::from_table(int base, std::int64_t modulus, std::int64_t ell,
                                                std::int64_t period, const std::vector<TableEntry>& entries) {
  if (base < 2) throw SpecError("base must be at least 2");
  if (modulus < 1) throw SpecError("modulus must be positive");
  if (ell < 0 || period < 1) throw SpecError("table period needs ell >= 0 and p >= 1");
  const std::int64_t positions = ell + period;
  if (positions > 1'000'000) throw SpecError("table too long");
  GAdditiveFunction f(Kind::table, base, modulus);
  f.ell_ = ell;
  f.period_ = period;
  f.table_.assign(static_cast<std::size_t>(positions * base), -1);
  for (const auto& e : entries) {
    if (e.digit < 0 || e.digit >= base) throw SpecError("table digit out of range");
    if (e.position < 0 || e.position >= positions)
      throw SpecError("table position " + std::to_string(e.position) + " outside [0, ell+p)");
    if (e.value < 0 || e.value >= modulus) throw SpecError("table value must be a reduced residue");
    if (e.digit == 0 && e.value != 0) throw SpecError("f(0) must vanish");
    auto& slot = f.table_[static_cast<std::size_t>(e.position * base + e.digit)];
    if (slot != -1 && slot != e.value) throw SpecError("conflicting table entries");
    slot = e.value;
  }
  for (std::int64_t i = 0; i < positions; ++i) {
    auto& zero = f.table_[static_cast<std::size_t>(i * base)];
    if (zero == -1) zero = 0;
    for (int d = 1; d < base; ++d)
      if (f.table_[static_cast<std::size_t>(i * base + d)] == -1)
        throw SpecError("table misses digit " + std::to_string(d) + " at position " + std::to_string(i));
  }
  return f;
}

std::string GAdditiveFunction::name() const {
  switch (kind_) {
    case Kind::identity: return "id";
    case Kind::sum_digits: return "sum_digits";
    case Kind::table: return "table";
  }
  return "?";
}

std::uint64_t GAdditiveFunction::reduced_position(std::uint64_t i) const {
  const auto ell = static_cast<std::uint64_t>(ell_), p = static_cast<std::uint64_t>(period_);
  return i < ell + p ? i : ell + (i - ell) % p;
}

std::int64_t GAdditiveFunction::at(int digit, std::uint64_t position) const {
  switch (kind_) {
    case Kind::identity:
      return static_cast<std::int64_t>(static_cast<__int128>(digit) * powmod(base_, position, modulus_) % modulus_);
    case Kind::sum_digits:
      return digit % modulus_;
    case Kind::table:
      return table_[static_cast<std::size_t>(reduced_position(position)) * base_ + digit];
  }
  return 0;
}

GAdditiveFamily::GAdditiveFamily(std::vector<GAdditiveFunction> functions) : functions_(std::move(functions)) {
  if (functions_.empty()) throw DomainError("a family needs at least one function");
  base_ = functions_.front().base();
  std::vector<std::int64_t> moduli;
  for (const auto& f : functions_) {
    if (f.base() != base_) throw DomainError("functions in a family must share the base");
    moduli.push_back(f.modulus());
  }
  moduli_ = ModulusVector(std::move(moduli));
}

GAdditiveFamily GAdditiveFamily::id_and_sum(int base, std::int64_t a, std::int64_t a2) {
  std::vector<GAdditiveFunction> fns{GAdditiveFunction::identity(base, a)};
  if (a2 > 0) fns.push_back(GAdditiveFunction::sum_digits(base, a2));
  return GAdditiveFamily(std::move(fns));
}

ResidueVector GAdditiveFamily::contribution(int digit, std::uint64_t position) const {
  ResidueVector b(functions_.size());
  for (std::size_t j = 0; j < functions_.size(); ++j) b[j] = functions_[j].at(digit, position);
  return b;
}

std::size_t GAdditiveFamily::contribution_index(int digit, std::uint64_t position) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < functions_.size(); ++j)
    idx = idx * moduli_[j] + static_cast<std::size_t>(functions_[j].at(digit, position));
  return idx;
}

ResidueVector GAdditiveFamily::eval(const Word& w, std::uint64_t offset) const {
  if (w.base != base_) throw DomainError("word base does not match the family base");
  ResidueVector b(functions_.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < functions_.size(); ++j)
      b[j] = (b[j] + functions_[j].at(w.digits[i], offset + i)) % moduli_[j];
  return b;
}

std::size_t GAdditiveFamily::eval_index(const Word& w, std::uint64_t offset) const {
  return moduli_.index(eval(w, offset));
}

namespace {

// Column of all values f_j(d g^i) at one position, the object whose
// eventual periodicity is sought.
std::vector<std::int64_t> value_column(const GAdditiveFamily& fam, std::uint64_t i) {
  std::vector<std::int64_t> col;
  col.reserve(static_cast<std::size_t>(fam.base()) * fam.functions().size());
  for (const auto& f : fam.functions())
    for (int d = 0; d < fam.base(); ++d) col.push_back(f.at(d, i));
  return col;
}

}  // namespace

bool is_eventual_period(const GAdditiveFamily& fam, EventualPeriod ep, int span) {
  if (ep.p < 1 || ep.ell < 0) return false;
  for (std::int64_t i = ep.ell; i < ep.ell + span * ep.p; ++i)
    if (value_column(fam, static_cast<std::uint64_t>(i)) != value_column(fam, static_cast<std::uint64_t>(i + ep.p)))
      return false;
  return true;
}

EventualPeriod find_eventual_period(const GAdditiveFamily& fam) {
  // Every component is driven by a small deterministic state (g^i mod a, or
  // the reduced table index); the joint state sequence repeats first at some
  // j0 < j1, which bounds the value sequence's preperiod and period.
  constexpr std::int64_t cap = 1'000'000;
  std::map<std::vector<std::int64_t>, std::int64_t> seen;
  std::vector<std::int64_t> state;
  std::int64_t j0 = 0, j1 = 0;
  for (std::int64_t i = 0;; ++i) {
    if (i > cap) throw DomainError("eventual period scan exceeded 10^6 positions");
    state.clear();
    for (const auto& f : fam.functions()) {
      switch (f.kind()) {
        case GAdditiveFunction::Kind::identity:
          state.push_back(powmod(f.base(), static_cast<std::uint64_t>(i), f.modulus()));
          break;
        case GAdditiveFunction::Kind::sum_digits:
          state.push_back(0);
          break;
        case GAdditiveFunction::Kind::table:
          state.push_back(static_cast<std::int64_t>(f.reduced_position(static_cast<std::uint64_t>(i))));
          break;
      }
    }
    auto [it, fresh] = seen.emplace(state, i);
    if (!fresh) {
      j0 = it->second;
      j1 = i;
      break;
    }
  }
  const std::int64_t state_period = j1 - j0;
  std::vector<std::vector<std::int64_t>> cols;
  for (std::int64_t i = 0; i < j0 + 2 * state_period; ++i) cols.push_back(value_column(fam, static_cast<std::uint64_t>(i)));

  EventualPeriod best{state_period, j0};
  for (std::int64_t q = 1; q <= state_period; ++q) {
    if (state_period % q != 0) continue;
    bool ok = true;
    for (std::int64_t i = j0; i < j0 + state_period && ok; ++i) ok = cols[i] == cols[i + q];
    if (ok) {
      best.p = q;
      break;
    }
  }
  while (best.ell > 0 && cols[best.ell - 1] == cols[best.ell - 1 + best.p]) --best.ell;
  if (!is_eventual_period(fam, best, 3)) throw std::logic_error("eventual period verification failed");
  return best;
}

std::int64_t totient(std::int64_t n) {
  if (n < 1) throw DomainError("totient needs a positive argument");
  std::int64_t result = n;
  for (std::int64_t q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    while (n % q == 0) n /= q;
    result -= result / q;
  }
  if (n > 1) result -= result / n;
  return result;
}

std::int64_t euler_period(int g, std::int64_t a, std::int64_t a2) {
  if (g < 2 || a < 1 || a2 < 1) throw DomainError("euler_period needs g >= 2 and positive moduli");
  if (std::gcd(static_cast<std::int64_t>(g), a) != 1) throw PreconditionError("euler_period requires gcd(g, a) = 1");
  return a2 * totient(a * (g - 1));
}

std::int64_t delta_gcd(std::int64_t modulus_product, std::span<const int> digits) {
  if (digits.size() < 2) throw PreconditionError("delta needs at least two digits");
  for (std::size_t j = 1; j < digits.size(); ++j)
    if (digits[j] <= digits[j - 1]) throw PreconditionError("digits must be strictly increasing");
  std::int64_t delta = modulus_product;
  for (std::size_t j = 1; j < digits.size(); ++j) delta = std::gcd(delta, static_cast<std::int64_t>(digits[j] - digits[0]));
  return delta;
}

}  // namespace mdist
