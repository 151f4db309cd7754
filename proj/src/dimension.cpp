#include "mdist/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "mdist/analyzer.hpp"
#include "mdist/errors.hpp"
#include "mdist/graph.hpp"
#include "mdist/oracle.hpp"

namespace mdist {

namespace {

double log_big(const BigInt& n) {
  if (n <= 0) return -INFINITY;
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

// Perron root of a strongly connected block, nullopt when the cap is hit.
std::optional<double> block_radius(const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size();
  std::vector<double> x(n, 1.0), y(n);
  for (int it = 0; it < 100000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];  // the identity shift makes the block primitive
      for (std::size_t j = 0; j < n; ++j) s += m[i][j] * x[j];
      y[i] = s;
    }
    double lo = INFINITY, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, y[i] / x[i]);
      hi = std::max(hi, y[i] / x[i]);
    }
    const double top = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / top;
    if (hi - lo <= 1e-12 * hi) return 0.5 * (lo + hi) - 1.0;
  }
  return std::nullopt;
}

bool accepts(const Cover& c, const Word& w) {
  std::vector<char> cur(static_cast<std::size_t>(c.size()), 1);
  for (int d : w.digits) {
    std::vector<char> next(cur.size(), 0);
    bool any = false;
    for (const auto& e : c.edges())
      if (cur[static_cast<std::size_t>(e.from)] && e.label == d) next[static_cast<std::size_t>(e.to)] = any = true;
    if (!any) return false;
    cur = std::move(next);
  }
  return true;
}

}  // namespace

double perron_eigenvalue(const Cover& cover) {
  const auto trimmed = cover.trimmed();
  if (trimmed.size() == 0) throw EmptyShiftError();
  std::vector<int> all(static_cast<std::size_t>(trimmed.size()));
  std::iota(all.begin(), all.end(), 0);
  const auto dfa = determinize(trimmed, {all});
  Adjacency adj(static_cast<std::size_t>(dfa.size()));
  for (int s = 0; s < dfa.size(); ++s)
    for (int t : dfa.next[static_cast<std::size_t>(s)])
      if (t >= 0) adj[static_cast<std::size_t>(s)].push_back(t);

  double best = 0;
  for (const auto& comp : strongly_connected_components(adj)) {
    std::vector<int> pos(static_cast<std::size_t>(dfa.size()), -1);
    for (std::size_t i = 0; i < comp.size(); ++i) pos[static_cast<std::size_t>(comp[i])] = static_cast<int>(i);
    std::vector<std::vector<double>> m(comp.size(), std::vector<double>(comp.size(), 0.0));
    bool cycle = false;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (int t : adj[static_cast<std::size_t>(comp[i])])
        if (pos[static_cast<std::size_t>(t)] >= 0) {
          m[i][static_cast<std::size_t>(pos[static_cast<std::size_t>(t)])] += 1.0;
          cycle = true;
        }
    if (!cycle) continue;
    auto r = block_radius(m);
    if (!r) return std::exp(language_slope(trimmed, 30, 40));
    best = std::max(best, *r);
  }
  return best;
}

double entropy(const Cover& cover) {
  const double lambda = perron_eigenvalue(cover);
  return lambda <= 1.0 ? 0.0 : std::log(lambda);
}

double language_slope(const Cover& cover, std::size_t n0, std::size_t n1) {
  if (n1 <= n0) throw DomainError("slope needs n1 > n0");
  return (log_big(language_count(cover, n1)) - log_big(language_count(cover, n0))) / static_cast<double>(n1 - n0);
}

DimensionEstimate fit_counts(int g, const std::vector<std::uint64_t>& counts) {
  DimensionEstimate est;
  est.base = g;
  const double lg = std::log(static_cast<double>(g));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const int m = static_cast<int>(i) + 1;
    const double ratio = counts[i] > 1 ? std::log(static_cast<double>(counts[i])) / (m * lg) : 0.0;
    est.points.push_back({m, counts[i], ratio});
  }
  if (counts.empty() || counts.back() == 0) {
    est.empty = true;
    est.note = "no element below the horizon";
    return est;
  }
  const int total = static_cast<int>(counts.size());
  const int first = std::max(1, total - std::max(2, total / 3) + 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  est.lower = 1;
  est.upper = 0;
  for (int m = first; m <= total; ++m) {
    const auto& pt = est.points[static_cast<std::size_t>(m - 1)];
    est.lower = std::min(est.lower, pt.ratio);
    est.upper = std::max(est.upper, pt.ratio);
    if (pt.count == 0) continue;
    const double x = m * lg, y = std::log(static_cast<double>(pt.count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 2) est.fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return est;
}

DimensionEstimate empirical_dimension(const ShiftSpec& spec, Progression p, int m_max, unsigned threads) {
  if (p.a < 1 || p.b < 0 || p.b >= p.a) throw DomainError("progression needs a >= 1 and 0 <= b < a");
  if (m_max < 1) throw DomainError("m_max must be positive");
  const auto table = census_horizon(spec, pair_family(spec.base, p.a, 1), m_max, threads);
  std::vector<std::uint64_t> counts;
  for (int m = 1; m <= m_max; ++m) counts.push_back(table.counts_below_power(m)[static_cast<std::size_t>(p.b)]);
  return fit_counts(spec.base, counts);
}

DimensionEstimate mass_dimension(const ShiftSpec& spec, int m_max) {
  spec.validate();
  const auto cover = build_cover(spec);
  const double lambda = perron_eigenvalue(cover);
  const double lg = std::log(static_cast<double>(spec.base));
  if (m_max <= 0) {
    // Keep the enumeration near 2e5 elements.
    const double per = std::log(std::max(lambda, 1.5));
    m_max = std::clamp(static_cast<int>(std::log(2e5) / per), 1, static_cast<int>(std::floor(63 * std::log(2.0) / lg)));
  }
  auto est = empirical_dimension(spec, {1, 0}, m_max);
  est.eigenvalue = lambda;
  est.exact = lambda <= 1.0 ? 0.0 : std::log(lambda) / lg;
  return est;
}

std::string transversality_name(Transversality t) {
  switch (t) {
    case Transversality::equal_dimension: return "equal-dimension";
    case Transversality::finite_intersection: return "finite-intersection";
    case Transversality::unsupported: return "unsupported";
  }
  return "?";
}

TransversalityResult transversality_check(const ShiftSpec& spec, Progression p) {
  spec.validate();
  if (p.a < 1 || p.b < 0 || p.b >= p.a) throw DomainError("progression needs a >= 1 and 0 <= b < a");
  TransversalityResult res;
  res.progression = p;
  FischerCover fc;
  try {
    fc = fischer_cover(build_cover(spec));
  } catch (const NotTransitiveError& e) {
    res.note = "not transitive; use empirical_dimension";
    return res;
  }
  const Cover& c = fc.graph;
  const int g = spec.base;
  const std::int64_t a = p.a;
  const std::int64_t need = std::max<std::int64_t>(1, a - 1);

  // Words grow at the least significant end: state (first node, value mod a,
  // length saturated at need).
  auto index = [&](int v, std::int64_t r, std::int64_t len) {
    return (static_cast<std::size_t>(v) * static_cast<std::size_t>(a) + static_cast<std::size_t>(r)) *
               static_cast<std::size_t>(need + 1) +
           static_cast<std::size_t>(len);
  };
  const std::size_t total = static_cast<std::size_t>(c.size()) * static_cast<std::size_t>(a) * static_cast<std::size_t>(need + 1);
  std::vector<long long> parent(total, -2);
  std::vector<int> via(total, -1);
  std::deque<std::size_t> queue;
  for (int v = 0; v < c.size(); ++v) {
    parent[index(v, 0, 0)] = -1;
    queue.push_back(index(v, 0, 0));
  }
  std::optional<std::size_t> goal;
  while (!queue.empty() && !goal) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const std::int64_t len = static_cast<std::int64_t>(cur % static_cast<std::size_t>(need + 1));
    const std::int64_t r = static_cast<std::int64_t>(cur / static_cast<std::size_t>(need + 1) % static_cast<std::size_t>(a));
    const int v = static_cast<int>(cur / static_cast<std::size_t>(need + 1) / static_cast<std::size_t>(a));
    for (int id : c.in_edges(v)) {
      const auto& e = c.edges()[static_cast<std::size_t>(id)];
      const std::int64_t r2 = (e.label + g * r) % a, len2 = std::min(len + 1, need);
      const std::size_t t = index(e.from, r2, len2);
      if (parent[t] != -2) continue;
      parent[t] = static_cast<long long>(cur);
      via[t] = e.label;
      queue.push_back(t);
      if (r2 == p.b && len2 == need) {
        goal = t;
        break;
      }
    }
  }
  for (auto x : parent) res.states += x != -2;

  if (goal) {
    std::vector<int> digits;
    for (long long cur = static_cast<long long>(*goal); parent[static_cast<std::size_t>(cur)] != -1;
         cur = parent[static_cast<std::size_t>(cur)])
      digits.push_back(via[static_cast<std::size_t>(cur)]);
    Word w(g, digits);
    if (BigInt(word_to_integer(w) % a) != p.b || static_cast<std::int64_t>(w.size()) < need || !accepts(c, w))
      throw std::logic_error("transversality witness does not re-evaluate");
    res.verdict = Transversality::equal_dimension;
    res.witness = w;
    return res;
  }
  res.verdict = Transversality::finite_intersection;
  visit_set(spec, horizon(g, static_cast<int>(need)), [&](std::uint64_t n, const Word&) {
    if (static_cast<std::int64_t>(n % static_cast<std::uint64_t>(a)) == p.b) res.finite_set.push_back(n);
  });
  res.note = "no word of length >= " + std::to_string(need) + " in this class";
  return res;
}

BlockSequence::BlockSequence(int g, std::vector<int> digits, int h, int i_max) : g_(g), h_(h), i_max_(i_max) {
  std::sort(digits.begin(), digits.end());
  digits.erase(std::unique(digits.begin(), digits.end()), digits.end());
  ShiftSpec::full(g, digits).validate();
  if (digits.size() < 2) throw PreconditionError("block construction needs at least two digits");
  if (h < 0 || h >= g) throw SpecError("marker digit outside the base");
  if (std::find(digits.begin(), digits.end(), h) != digits.end()) throw PreconditionError("marker digit must lie outside D");
  if (i_max < 0 || i_max > 12) throw DomainError("i_max must lie in [0, 12]");
  digits_ = std::move(digits);
  for (int k = 0; k <= i_max_; ++k)
    for (const auto& w : block(k)) seq_.insert(seq_.end(), w.digits.begin(), w.digits.end());
}

std::vector<Word> BlockSequence::block(int k) const {
  const int d = digits_.front();
  const std::size_t q = digits_.size();
  std::vector<Word> out;
  std::vector<std::size_t> z(static_cast<std::size_t>(k), 0);
  for (;;) {
    std::vector<int> w{h_};
    w.insert(w.end(), static_cast<std::size_t>(k), d);
    for (auto i : z) w.push_back(digits_[i]);
    out.emplace_back(g_, std::move(w));
    int pos = k - 1;
    while (pos >= 0 && ++z[static_cast<std::size_t>(pos)] == q) z[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return out;
}

std::vector<std::uint64_t> BlockSequence::integers(int max_len) const {
  horizon(g_, max_len);  // overflow guard
  std::vector<std::uint64_t> out;
  for (std::size_t s = 0; s < seq_.size(); ++s) {
    std::uint64_t v = 0, w = 1;
    for (int len = 1; len <= max_len && s + static_cast<std::size_t>(len) <= seq_.size(); ++len) {
      v += static_cast<std::uint64_t>(seq_[s + static_cast<std::size_t>(len) - 1]) * w;
      w *= static_cast<std::uint64_t>(g_);
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint64_t> BlockSequence::counts(int m_max, bool marker_only) const {
  const auto ints = integers(m_max);
  std::vector<std::uint64_t> out;
  for (int m = 1; m <= m_max; ++m) {
    const std::uint64_t lim = horizon(g_, m);
    std::uint64_t n = 0;
    for (auto x : ints) {
      if (x >= lim) break;
      if (!marker_only || static_cast<int>(x % static_cast<std::uint64_t>(g_)) == h_) ++n;
    }
    out.push_back(n);
  }
  return out;
}

BlockSequence block_sequence_shift(int g, std::vector<int> digits, int h, int i_max) {
  return BlockSequence(g, std::move(digits), h, i_max);
}

std::vector<LadderStep> sgap_dimension_ladder(const std::vector<int>& gaps, Progression p) {
  if (!std::is_sorted(gaps.begin(), gaps.end()) || std::adjacent_find(gaps.begin(), gaps.end()) != gaps.end())
    throw SpecError("gap list must be strictly ascending");
  std::vector<LadderStep> out;
  for (std::size_t n = 1; n <= gaps.size(); ++n) {
    LadderStep step;
    step.gaps.assign(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(n));
    const auto spec = ShiftSpec::sgap(2, step.gaps);
    step.entropy = entropy(build_cover(spec));
    step.check = transversality_check(spec, p);
    if (step.check.verdict == Transversality::equal_dimension) step.dimension = step.entropy / std::log(2.0);
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace mdist
