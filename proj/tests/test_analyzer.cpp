#include <cmath>
#include <numeric>

#include "builtins.hpp"
#include "doctest.h"
#include "mdist/analyzer.hpp"
#include "mdist/errors.hpp"
#include "mdist/oracle.hpp"

using namespace mdist;
using namespace testing_shifts;

namespace {

Rational rat(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::vector<int> all_digits(int g) {
  std::vector<int> d(static_cast<std::size_t>(g));
  std::iota(d.begin(), d.end(), 0);
  return d;
}

bool in_coset(const ResidueVector& r, const ResidueVector& shift, const std::vector<std::int64_t>& gen) {
  for (std::size_t j = 0; j < r.size(); ++j)
    if ((r[j] - shift[j]) % gen[j] != 0) return false;
  return true;
}

// Rows indexed by D's row/column order.
ShiftSpec matrix_shift(int g, const std::vector<int>& digits, const std::vector<std::vector<int>>& t) {
  std::vector<std::pair<int, int>> allowed;
  for (std::size_t i = 0; i < digits.size(); ++i)
    for (std::size_t j = 0; j < digits.size(); ++j)
      if (t[i][j]) allowed.push_back({digits[i], digits[j]});
  return ShiftSpec::sft1(g, digits, allowed);
}

}  // namespace

TEST_CASE("missing digits examples") {
  auto r = analyze_missing_digits(10, {1, 2, 4}, 3);
  CHECK(r.verdict == Verdict::uniform);
  CHECK(r.delta == 1);
  for (const auto& v : r.table) CHECK(v == rat(1, 3));

  auto z = analyze_missing_digits(10, {0, 3, 6, 9}, 3);
  CHECK(z.verdict == Verdict::subgroup_uniform);
  CHECK(z.delta == 3);
  CHECK(z.table == std::vector<LimitValue>{Rational(1), Rational(0), Rational(0)});

  auto o = analyze_missing_digits(10, {1, 4, 7}, 3);
  CHECK(o.verdict == Verdict::zero_or_nonexistent);
  CHECK(o.coset_period == 3);
  for (const auto& v : o.table) CHECK(!v.has_value());
  // Length i integers are congruent to i mod 3.
  for (const auto& [len, shift] : o.cosets) CHECK(shift[0] == len % 3);

  CHECK(analyze_missing_digits(6, {1, 2, 4}, 12).verdict == Verdict::unsupported);
  CHECK(analyze_missing_digits(10, {1, 2}, 3, 3).verdict == Verdict::unsupported);
  CHECK_THROWS_AS(analyze_missing_digits(10, {9}, 3), PreconditionError);
}

TEST_CASE("trichotomy tables") {
  for (int g = 3; g <= 10; g += 7)
    for (std::int64_t a = 1; a <= 5; ++a)
      for (std::int64_t b = 1; b <= 4; ++b) {
        if (std::gcd<std::int64_t>(g, a) != 1 || std::gcd(a, b) != 1) continue;
        for (int d1 = 0; d1 < g; ++d1)
          for (int d2 = d1 + 1; d2 < g; ++d2) {
            std::vector<int> d{d1, d2};
            CAPTURE(g);
            CAPTURE(a);
            CAPTURE(b);
            CAPTURE(d1);
            CAPTURE(d2);
            auto rep = analyze_missing_digits(g, d, a, b);
            const auto n = static_cast<long>(a * b);
            const std::int64_t delta = std::gcd(a * b, static_cast<std::int64_t>(d2 - d1));
            CHECK(rep.delta == delta);
            if (delta == 1) {
              CHECK(rep.verdict == Verdict::uniform);
              continue;
            }
            if (rep.verdict == Verdict::subgroup_uniform) {
              Rational sum = 0;
              int support = 0;
              for (const auto& v : rep.table) {
                REQUIRE(v.has_value());
                sum += *v;
                if (*v != 0) {
                  ++support;
                  CHECK(*v == rat(static_cast<long>(delta), n));
                }
              }
              CHECK(sum == 1);
              CHECK(support * delta == n);
            } else {
              CHECK(rep.verdict == Verdict::zero_or_nonexistent);
              CHECK(rep.coset_period > 1);
            }
          }
      }
}

TEST_CASE("missing digits agree with chain direct") {
  struct Case {
    int g;
    std::vector<int> d;
    std::int64_t a, b;
  };
  const std::vector<Case> cases = {
      {10, {1, 2, 4}, 3, 1}, {10, {0, 3, 6, 9}, 3, 1}, {10, {1, 4, 7}, 3, 1}, {10, {1, 3}, 3, 2},
      {3, {0, 2}, 2, 1},     {5, {1, 3}, 2, 3},        {7, {2, 5}, 3, 2},     {10, {3, 7}, 1, 4},
      {4, {1, 3}, 5, 2},     {9, {0, 4}, 2, 1},
  };
  for (const auto& c : cases) {
    CAPTURE(c.g);
    CAPTURE(c.a);
    CAPTURE(c.b);
    auto fam = pair_family(c.g, c.a, c.b);
    auto md = analyze_missing_digits(c.g, c.d, c.a, c.b);
    auto cd = chain_direct(ShiftSpec::full(c.g, c.d), fam);
    CHECK(verdict_name(md.verdict) == verdict_name(cd.verdict));
    CHECK(md.table == cd.table);
  }
}

TEST_CASE("case three cosets hold the per-length residues") {
  for (auto [g, d, a, b] : std::vector<std::tuple<int, std::vector<int>, std::int64_t, std::int64_t>>{
           {10, {1, 4, 7}, 3, 1}, {10, {1, 3}, 3, 2}, {5, {1, 3}, 2, 3}, {7, {1, 4}, 3, 1}}) {
    auto rep = analyze_missing_digits(g, d, a, b);
    REQUIRE(rep.verdict == Verdict::zero_or_nonexistent);
    REQUIRE(rep.subgroup.has_value());
    auto fam = pair_family(g, a, b);
    auto table = census_horizon(ShiftSpec::full(g, d), fam, 7);
    const auto& mv = fam.moduli();
    for (std::size_t t = 1; t < table.by_length.size(); ++t) {
      const auto& shift = rep.cosets[(t - 1) % rep.cosets.size()].second;
      for (std::size_t i = 0; i < mv.size(); ++i)
        if (table.by_length[t][i] > 0) CHECK(in_coset(mv.residue(i), shift, *rep.subgroup));
    }
  }
}

TEST_CASE("general pair") {
  auto u = analyze_general_pair(10, {1, 2}, 3, 2);
  CHECK(u.verdict == Verdict::uniform);
  REQUIRE(u.witness_words.size() == 1);
  const auto p = euler_period(10, 3, 2);
  auto ev = GAdditiveFamily::id_and_sum(10, 3, 2).eval(u.witness_words[0]);
  CHECK(ev == ResidueVector{0, 1});
  CHECK(static_cast<std::int64_t>(u.witness_words[0].size()) % p == 0);

  auto full = analyze_general_pair(10, all_digits(10), 1, 2);
  CHECK(full.verdict == Verdict::uniform);

  // Outside the trichotomy's hypotheses: gcd(a,a') = 3.
  auto r = analyze_general_pair(10, {1, 2}, 3, 3);
  CHECK(r.method == Method::general_pair);
  CHECK(r.verdict != Verdict::unsupported);
  auto t = census_horizon(ShiftSpec::full(10, {1, 2}), pair_family(10, 3, 3), 14);
  CHECK(compare(r, t, 0.02).pass);
}

TEST_CASE("naturals") {
  auto n93 = analyze_naturals(10, 9, 3);
  CHECK(n93.verdict == Verdict::not_uniform_with_witness);
  CHECK(n93.witness_integers.empty());
  REQUIRE(n93.certificate_states.has_value());
  // Every reachable (n mod 9, S mod 3) with n > 0 has S = n mod 3.
  for (const auto& r : n93.certificate_reachable) CHECK(r[1] == r[0] % 3);
  for (std::size_t i = 0; i < n93.table.size(); ++i) {
    auto b = n93.modulus_vector().residue(i);
    CHECK(n93.table[i] == (b[1] == b[0] % 3 ? rat(1, 9) : Rational(0)));
  }

  auto n22 = analyze_naturals(10, 2, 2);
  CHECK(n22.verdict == Verdict::uniform);
  REQUIRE(n22.witness_integers.size() == 1);
  CHECK(n22.witness_integers[0] == 10);

  auto n72 = analyze_naturals(10, 7, 2);
  CHECK(n72.verdict == Verdict::uniform);
  REQUIRE(!n72.witness_integers.empty());
  const auto w = n72.witness_integers[0];
  CHECK(BigInt(w % 7) == 0);
  auto word = integer_to_word(w, 10);
  CHECK(GAdditiveFamily::id_and_sum(10, 7, 2).eval(word) == ResidueVector{0, 1});

  // Classical condition gcd(g-1, a') = 1 always yields a witness.
  for (std::int64_t a = 1; a <= 8; ++a)
    for (std::int64_t b = 1; b <= 8; ++b) {
      if (std::gcd<std::int64_t>(9, b) != 1) continue;
      CHECK(analyze_naturals(10, a, b).verdict == Verdict::uniform);
    }
}

TEST_CASE("digit-pair criterion") {
  auto nb = analyze_sft(neighbour_digits(), 3, 7);
  CHECK(nb.verdict == Verdict::uniform);
  CHECK(nb.method == Method::sft);
  for (const auto& v : nb.table) CHECK(v == rat(1, 21));
  CHECK(nb.notes.front() == "digit pair (0,1)");

  const std::vector<std::vector<int>> t = {{1, 1, 0, 0}, {1, 0, 1, 0}, {0, 0, 1, 1}, {0, 1, 0, 1}};
  for (auto [d, e] : std::vector<std::pair<int, int>>{{3, 5}, {0, 9}, {4, 7}}) {
    auto spec = matrix_shift(10, {1, 2, d, e}, t);
    for (std::int64_t a : {3, 7, 9})
      for (std::int64_t b : {1, 2, 4}) {
        if (std::gcd(a, b) != 1) continue;
        CAPTURE(d);
        CAPTURE(e);
        CAPTURE(a);
        CAPTURE(b);
        auto rep = analyze_sft(spec, a, b);
        CHECK(rep.verdict == Verdict::uniform);
        CHECK(rep.notes.front() == "digit pair (1,2)");
        // The criterion is sufficient for the Markov condition.
        auto cd = chain_direct(spec, pair_family(10, a, b));
        CHECK(cd.markov_condition == true);
        CHECK(cd.table == rep.table);
      }
  }

  // No pair with T(d,d) = T(d,e) = T(e,d) = 1: falls back.
  auto cyc = ShiftSpec::sft1(10, {1, 2, 3}, {{1, 2}, {2, 3}, {3, 1}, {1, 3}, {2, 1}, {3, 2}});
  auto fb = analyze_sft(cyc, 7, 1);
  CHECK(fb.method == Method::chain_direct);
  CHECK(fb.notes.back() == "no qualifying digit pair; chain-direct fallback");
  CHECK_THROWS_AS(analyze_sft(even_shift(), 5, 7), PreconditionError);
}

TEST_CASE("chain direct examples") {
  auto even = chain_direct(even_shift(), pair_family(3, 5, 7));
  CHECK(even.verdict == Verdict::uniform);
  CHECK(even.markov_condition == true);
  for (const auto& v : even.table) CHECK(v == rat(1, 35));

  auto g6 = chain_direct(ShiftSpec::full(6, {1, 2, 4}), pair_family(6, 12, 1));
  std::vector<LimitValue> expect(12, Rational(0));
  for (int b : {1, 2, 4}) expect[static_cast<std::size_t>(b)] = rat(2, 9);
  for (int b : {7, 8, 10}) expect[static_cast<std::size_t>(b)] = rat(1, 9);
  CHECK(g6.table == expect);
  CHECK(g6.verdict == Verdict::not_uniform_with_witness);
  CHECK(analyze(ShiftSpec::full(6, {1, 2, 4}), pair_family(6, 12, 1)).table == expect);

  auto all = chain_direct(ShiftSpec::full(10, all_digits(10)), pair_family(10, 4, 1));
  CHECK(all.verdict == Verdict::uniform);

  CHECK(chain_direct(golden_mean(), pair_family(2, 3, 1)).verdict == Verdict::unsupported);
  CHECK(chain_direct(ShiftSpec::full(6, {1, 2, 4}), pair_family(6, 5 * 4, 1)).verdict == Verdict::unsupported);
  CHECK(chain_direct(even_shift(), pair_family(3, 6, 1)).verdict == Verdict::unsupported);
}

TEST_CASE("dispatch") {
  CHECK(analyze(ShiftSpec::full(10, all_digits(10)), pair_family(10, 9, 3)).method == Method::gelfond);
  CHECK(analyze(ShiftSpec::full(10, {1, 4, 7}), pair_family(10, 3, 1)).method == Method::missing_digits);
  CHECK(analyze(ShiftSpec::full(10, {1, 2}), pair_family(10, 3, 3)).method == Method::general_pair);
  CHECK(analyze(neighbour_digits(), pair_family(10, 3, 7)).method == Method::sft);
  CHECK(analyze(even_shift(), pair_family(3, 5, 7)).method == Method::chain_direct);
  CHECK(analyze(ShiftSpec::full(6, {1, 2, 4}), pair_family(6, 12, 1)).method == Method::chain_direct);
}

TEST_CASE("horizon profile against the census") {
  struct Case {
    ShiftSpec spec;
    GAdditiveFamily fam;
    int m;
    double tol;
  };
  const std::vector<Case> cases = {
      {ShiftSpec::full(10, {1, 4, 7}), pair_family(10, 3, 1), 9, 1e-3},
      {ShiftSpec::full(6, {1, 2, 4}), pair_family(6, 12, 1), 9, 1e-3},
      {ShiftSpec::full(10, {1, 3}), pair_family(10, 3, 2), 16, 1e-3},
      {even_shift(), pair_family(3, 2, 2), 16, 0.01},
  };
  for (const auto& c : cases) {
    CAPTURE(describe(c.spec));
    auto hp = horizon_profile(fischer_cover(build_cover(c.spec)), c.fam);
    auto table = census_horizon(c.spec, c.fam, c.m);
    for (int m = c.m - 2; m <= c.m; ++m) {
      CAPTURE(m);
      auto counts = table.counts_below_power(m);
      double tot = 0;
      for (auto x : counts) tot += static_cast<double>(x);
      const auto& lim = hp.at_horizon(m);
      double worst = 0;
      for (std::size_t i = 0; i < counts.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<double>(counts[i]) / tot - lim[i].get_d()));
      CHECK(worst < c.tol);
    }
    Rational s = 0;
    for (const auto& q : hp.tables[0]) s += q;
    CHECK(s == 1);
  }
}

TEST_CASE("witnesses re-evaluate") {
  auto g6 = analyze(ShiftSpec::full(6, {1, 2, 4}), pair_family(6, 12, 1));
  REQUIRE(g6.witness_residues.size() == 1);
  auto v = g6.at(g6.witness_residues[0]);
  REQUIRE(v.has_value());
  CHECK(*v != rat(1, 12));
  for (auto [a, b] : std::vector<std::pair<std::int64_t, std::int64_t>>{{2, 2}, {7, 2}, {3, 5}, {1, 4}}) {
    auto r = analyze_naturals(10, a, b);
    for (const auto& n : r.witness_integers) {
      auto w = integer_to_word(n, 10);
      CHECK(GAdditiveFamily::id_and_sum(10, a, b).eval(w) == ResidueVector{0, 1 % b});
    }
  }
}
