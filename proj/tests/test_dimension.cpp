#include <cmath>

#include "builtins.hpp"
#include "doctest.h"
#include "mdist/chain.hpp"
#include "mdist/dimension.hpp"
#include "mdist/errors.hpp"
#include "mdist/oracle.hpp"

using namespace mdist;
using namespace testing_shifts;

namespace {

const double golden = (1 + std::sqrt(5.0)) / 2;

std::vector<ShiftSpec> transitive_builtins() {
  return {ShiftSpec::full(2, {0, 1}), ShiftSpec::full(3, {0, 2}), ShiftSpec::full(10, {1, 2, 4}), golden_mean(),
          even_shift(), ShiftSpec::sgap(2, {1, 2}), neighbour_digits()};
}

}  // namespace

TEST_CASE("entropy examples") {
  CHECK(std::abs(entropy(build_cover(ShiftSpec::full(10, {1, 5, 7}))) - std::log(3.0)) < 1e-12);
  CHECK(std::abs(perron_eigenvalue(build_cover(golden_mean())) - golden) < 1e-10);
  CHECK(std::abs(entropy(build_cover(even_shift())) - std::log(2.0)) < 1e-12);
  CHECK(std::abs(entropy(build_cover(even_shift_redundant())) - std::log(2.0)) < 1e-12);
  CHECK(std::abs(entropy(build_cover(neighbour_digits())) - std::log(3.0)) < 1e-12);
  // Only runs of ones with zeros at the ends.
  CHECK(entropy(build_cover(ShiftSpec::sgap(2, {0}))) == 0.0);
  // The union's entropy is the larger component's.
  CHECK(std::abs(entropy(build_cover(union_counterexample())) - std::log(3.0)) < 1e-12);
  for (int k = 2; k <= 10; ++k) {
    std::vector<int> d;
    for (int x = 0; x < k; ++x) d.push_back(x);
    CHECK(std::abs(entropy(build_cover(ShiftSpec::full(10, d))) - std::log(static_cast<double>(k))) < 1e-12);
  }
  // Period-2 presentations still converge.
  CHECK(perron_eigenvalue(build_cover(two_cycle())) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy against language growth") {
  auto specs = transitive_builtins();
  specs.push_back(union_counterexample());
  specs.push_back(even_shift_redundant());
  for (const auto& s : specs) {
    CAPTURE(kind_name(s.kind));
    const auto c = build_cover(s);
    CHECK(std::abs(entropy(c) - language_slope(c, 30, 40)) <= 1e-3);
  }
}

TEST_CASE("mass dimension") {
  auto d5 = mass_dimension(ShiftSpec::full(10, {0, 2, 4, 6, 8}), 6);
  CHECK(std::abs(*d5.exact - std::log(5.0) / std::log(10.0)) < 1e-12);
  CHECK(std::abs(d5.fit - *d5.exact) < 0.01);
  auto u = mass_dimension(union_counterexample());
  CHECK(std::abs(*u.exact - std::log(3.0) / std::log(5.0)) < 1e-12);
  auto all = mass_dimension(ShiftSpec::full(4, {0, 1, 2, 3}));
  CHECK(std::abs(*all.exact - 1.0) < 1e-12);
  CHECK(std::abs(all.fit - 1.0) < 1e-9);
  for (const auto& est : {d5, u, all}) {
    CHECK(est.lower <= est.upper);
    CHECK(est.lower >= 0);
    CHECK(est.upper <= 1);
  }
}

TEST_CASE("fit over the last third") {
  // Counts 2^m in base 4: every ratio and the fit are 1/2.
  std::vector<std::uint64_t> c;
  for (int m = 1; m <= 12; ++m) c.push_back(std::uint64_t{1} << m);
  auto est = fit_counts(4, c);
  CHECK(est.fit == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.lower == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.points.size() == 12);
  auto empty = fit_counts(4, {0, 0, 0});
  CHECK(empty.empty);
  CHECK(empty.fit == 0);
  // Finite sets flatten out.
  auto flat = fit_counts(10, {3, 5, 5, 5, 5, 5});
  CHECK(flat.fit == doctest::Approx(0.0));
}

TEST_CASE("empirical dimension examples") {
  const double l2 = std::log(2.0), l3 = std::log(3.0), l5 = std::log(5.0), l10 = std::log(10.0);
  auto u0 = empirical_dimension(union_counterexample(), {5, 0}, 12);
  CHECK(std::abs(u0.fit - l2 / l5) < 0.03);
  auto uf = empirical_dimension(union_counterexample(), {1, 0}, 12);
  CHECK(std::abs(uf.fit - l3 / l5) < 0.03);
  // Odd members of C_{10,{1,3}} keep the full dimension.
  auto odd = empirical_dimension(ShiftSpec::full(10, {1, 3}), {2, 1}, 10);
  CHECK(std::abs(odd.fit - l2 / l10) < 0.01);
  auto none = empirical_dimension(ShiftSpec::full(10, {1, 3}), {2, 0}, 6);
  CHECK(none.empty);
  CHECK_THROWS_AS(empirical_dimension(even_shift(), {3, 3}, 4), DomainError);
}

TEST_CASE("transversality examples") {
  auto even = transversality_check(even_shift(), {2, 1});
  CHECK(even.verdict == Transversality::equal_dimension);
  REQUIRE(even.witness.has_value());
  CHECK(even.witness->str() == "1");

  for (const auto& s : transitive_builtins()) {
    auto r = transversality_check(s, {1, 0});
    CHECK(r.verdict == Transversality::equal_dimension);
    CHECK(r.witness->size() == 1);
  }

  // Words of length >= 2 in C_{6,{1,5}} are 3 mod 4, so class 1 holds only 1 and 5.
  auto fin = transversality_check(ShiftSpec::full(6, {1, 5}), {4, 1});
  CHECK(fin.verdict == Transversality::finite_intersection);
  CHECK(fin.finite_set == std::vector<std::uint64_t>{1, 5});
  CHECK(transversality_check(ShiftSpec::full(6, {1, 5}), {4, 3}).verdict == Transversality::equal_dimension);
  auto empty = transversality_check(ShiftSpec::full(10, {0, 3, 6, 9}), {3, 1});
  CHECK(empty.verdict == Transversality::finite_intersection);
  CHECK(empty.finite_set.empty());

  CHECK(transversality_check(union_counterexample(), {5, 0}).verdict == Transversality::unsupported);
}

TEST_CASE("transversality agrees with the oracle") {
  for (const auto& s : transitive_builtins()) {
    CAPTURE(kind_name(s.kind));
    const auto exact = *mass_dimension(s, 1).exact;
    for (std::int64_t a = 1; a <= 5; ++a) {
      // About 2e5 elements at the horizon.
      const int m = static_cast<int>(std::log(2e5) / (exact * std::log(static_cast<double>(s.base))));
      auto table = census_horizon(s, pair_family(s.base, a, 1), m);
      for (std::int64_t b = 0; b < a; ++b) {
        CAPTURE(a);
        CAPTURE(b);
        auto r = transversality_check(s, {a, b});
        REQUIRE(r.verdict != Transversality::unsupported);
        std::vector<std::uint64_t> counts;
        for (int t = 1; t <= m; ++t) counts.push_back(table.counts_below_power(t)[static_cast<std::size_t>(b)]);
        if (r.verdict == Transversality::finite_intersection) {
          CHECK(counts.back() == r.finite_set.size());
        } else {
          CHECK(counts.back() > counts[static_cast<std::size_t>(m / 2)]);
          auto est = fit_counts(s.base, counts);
          CHECK(std::abs(est.fit - exact) < 0.05);
        }
      }
    }
  }
}

TEST_CASE("count matrices") {
  // Non-normalized matrices are k^p times the stochastic ones, and word
  // counts evolve by them.
  for (const auto& s : {even_shift(), ShiftSpec::full(10, {1, 2, 4}), ShiftSpec::sgap(2, {1, 2})}) {
    auto fc = fischer_cover(build_cover(s));
    if (!fc.k) continue;
    ChainSystem sys(fc, GAdditiveFamily::id_and_sum(s.base, 5));
    BigInt kp = 1;
    for (std::int64_t j = 0; j < sys.period(); ++j) kp *= sys.k();
    for (auto i : sys.window()) {
      auto counts = sys.count_matrix(i);
      auto m = sys.transition_matrix(i);
      for (std::size_t r = 0; r < counts.size(); ++r)
        for (std::size_t c = 0; c < counts.size(); ++c) CHECK(Rational(counts[r][c]) == m[r][c] * kp);
    }
    for (std::int64_t i = sys.ell(); i <= sys.ell() + 1; ++i)
      for (std::uint64_t n = 1; n <= 2; ++n)
        CHECK(sys.evolve_counts(i, n) == sys.initial_counts(i + static_cast<std::int64_t>(n) * sys.period()));
  }
}

TEST_CASE("block sequence construction") {
  auto bs = block_sequence_shift(3, {0, 1}, 2, 6);
  for (int k = 0; k <= 6; ++k) {
    auto w = bs.block(k);
    CHECK(w.size() == (std::size_t{1} << k));
    for (const auto& x : w) {
      CHECK(x.size() == static_cast<std::size_t>(2 * k + 1));
      CHECK(x.digits[0] == 2);
    }
  }
  std::size_t len = 0;
  for (int k = 0; k <= 6; ++k) len += static_cast<std::size_t>(2 * k + 1) << k;
  CHECK(bs.sequence().size() == len);
  CHECK_THROWS_AS(block_sequence_shift(3, {0, 1}, 1, 4), PreconditionError);
  CHECK_THROWS_AS(block_sequence_shift(3, {0, 1}, 2, 13), DomainError);

  // Every integer of C_{3,{0,1}} below 3^6 is read inside the sequence.
  auto ints = bs.integers(6);
  for (auto n : enumerate_set(ShiftSpec::full(3, {0, 1}), horizon(3, 6)))
    CHECK(std::binary_search(ints.begin(), ints.end(), n));
}

TEST_CASE("s-gap ladder") {
  auto ladder = sgap_dimension_ladder({2, 3, 5, 7, 11, 13}, {3, 1});
  REQUIRE(ladder.size() == 6);
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    CHECK(ladder[i].entropy >= ladder[i - 1].entropy - 1e-12);
    CHECK(ladder[i].dimension >= ladder[i - 1].dimension - 1e-12);
  }
  auto one = sgap_dimension_ladder({1, 2}, {3, 2});
  CHECK(one.back().check.verdict == Transversality::equal_dimension);
  CHECK(std::abs(one.back().dimension - one.back().entropy / std::log(2.0)) < 1e-15);
  auto zero = sgap_dimension_ladder({0}, {2, 1});
  CHECK(zero[0].entropy == 0.0);
  CHECK(zero[0].dimension == 0.0);
  CHECK_THROWS_AS(sgap_dimension_ladder({3, 1}, {2, 1}), SpecError);
}
