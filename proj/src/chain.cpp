#include "mdist/chain.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "mdist/errors.hpp"

namespace mdist {

StateSpace::StateSpace(ModulusVector moduli, std::vector<std::string> node_names)
    : moduli_(std::move(moduli)), nodes_(std::move(node_names)) {
  if (nodes_.empty()) throw DomainError("state space needs at least one node");
}

std::string StateSpace::label(std::size_t state) const {
  auto b = moduli_.residue(residue_index(state));
  std::string out = "(";
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (j) out += ",";
    out += std::to_string(b[j]);
  }
  return out + "|" + nodes_[static_cast<std::size_t>(node(state))] + ")";
}

RationalMatrix to_rational(const CountMatrix& m, const BigInt& denominator) {
  RationalMatrix out(m.size());
  for (std::size_t r = 0; r < m.size(); ++r) {
    out[r].reserve(m[r].size());
    for (const auto& x : m[r]) {
      Rational q(x, denominator);
      q.canonicalize();
      out[r].push_back(q);
    }
  }
  return out;
}

Rational total(const RationalDistribution& d) {
  Rational s = 0;
  for (const auto& x : d) s += x;
  return s;
}

namespace {

BigInt power(int k, std::uint64_t e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(k), e);
  return r;
}

CountMatrix multiply(const CountMatrix& x, const CountMatrix& y) {
  const std::size_t n = x.size();
  CountMatrix z(n, std::vector<BigInt>(n, 0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t m = 0; m < n; ++m) {
      if (x[r][m] == 0) continue;
      for (std::size_t c = 0; c < n; ++c)
        if (y[m][c] != 0) z[r][c] += x[r][m] * y[m][c];
    }
  return z;
}

std::vector<BigInt> multiply(const std::vector<BigInt>& v, const CountMatrix& m) {
  std::vector<BigInt> out(v.size(), 0);
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (v[r] == 0) continue;
    for (std::size_t c = 0; c < v.size(); ++c)
      if (m[r][c] != 0) out[c] += v[r] * m[r][c];
  }
  return out;
}

RationalDistribution normalize(const std::vector<BigInt>& counts) {
  BigInt sum = 0;
  for (const auto& c : counts) sum += c;
  if (sum == 0) throw DomainError("empty restricted language");
  RationalDistribution d;
  d.reserve(counts.size());
  for (const auto& c : counts) {
    Rational q(c, sum);
    q.canonicalize();
    d.push_back(q);
  }
  return d;
}

constexpr std::uint64_t kMaxEvolveSteps = std::uint64_t{1} << 16;

}  // namespace

ChainSystem ChainSystem::from_spec(const ShiftSpec& spec, const GAdditiveFamily& family, ChainOptions options) {
  if (options.sft_shortcut && spec.kind == ShiftSpec::Kind::sft1)
    return ChainSystem(sft_shortcut_cover(spec), family, options);
  return ChainSystem(fischer_cover(build_cover(spec)), family, options);
}

ChainSystem::ChainSystem(FischerCover cover, GAdditiveFamily family, ChainOptions options)
    : cover_(std::move(cover)), family_(std::move(family)) {
  if (cover_.graph.base() != family_.base()) throw DomainError("cover and family use different bases");
  if (!cover_.k) throw PreconditionError("regularity required: the cover must be k-regular with k >= 2");
  k_ = *cover_.k;
  states_ = StateSpace(family_.moduli(), cover_.graph.names());
  if (states_.size() > 20000) throw DomainError("state space too large for exact chains");

  const auto ep = find_eventual_period(family_);
  periodic_from_ = ep.ell;
  p_ = options.period.value_or(ep.p);
  if (p_ < 1 || p_ % ep.p != 0)
    throw PreconditionError("chain period must be a multiple of the least eventual period " + std::to_string(ep.p));
  const std::int64_t sync = std::max<std::int64_t>(1, cover_.sync_length);
  ell_ = options.ell.value_or(std::max(ep.ell, sync));
  if (ell_ < sync) throw PreconditionError("ell below the shortest synchronizing length");

  for (std::int64_t i = ell_; i < ell_ + p_; ++i) window_counts_.push_back(build_counts(i));
  const BigInt kp = power(k_, static_cast<std::uint64_t>(p_));
  for (const auto& m : window_counts_) {
    const std::size_t n = m.size();
    for (std::size_t r = 0; r < n; ++r) {
      BigInt row = 0, col = 0;
      for (std::size_t c = 0; c < n; ++c) {
        row += m[r][c];
        col += m[c][r];
      }
      if (row != kp || col != kp) throw std::logic_error("constructed matrix is not doubly stochastic");
    }
  }
}

std::vector<std::int64_t> ChainSystem::window() const {
  std::vector<std::int64_t> w;
  for (std::int64_t i = ell_; i < ell_ + p_; ++i) w.push_back(i);
  return w;
}

std::int64_t ChainSystem::reduce(std::int64_t i) const {
  const std::int64_t base = std::max(ell_, periodic_from_);
  if (i < base) return i;
  return base + (i - base) % p_;
}

const CountMatrix* ChainSystem::cached(std::int64_t i) const {
  const std::int64_t r = reduce(i);
  if (r >= ell_ && r < ell_ + p_) return &window_counts_[static_cast<std::size_t>(r - ell_)];
  return nullptr;
}

CountMatrix ChainSystem::build_counts(std::int64_t i) const {
  if (i < 0) throw DomainError("negative position");
  const auto& g = cover_.graph;
  const auto& mv = family_.moduli();
  const std::size_t A = mv.size(), V = static_cast<std::size_t>(g.size());
  std::vector<std::vector<std::size_t>> contrib(static_cast<std::size_t>(p_), std::vector<std::size_t>(static_cast<std::size_t>(g.base())));
  for (std::int64_t j = 0; j < p_; ++j)
    for (int d = 0; d < g.base(); ++d)
      contrib[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] = family_.contribution_index(d, static_cast<std::uint64_t>(i + j));

  CountMatrix m(states_.size(), std::vector<BigInt>(states_.size(), 0));
  for (std::size_t from = 0; from < V; ++from) {
    // dp[(node, residue increment)]
    std::vector<BigInt> dp(V * A, 0), next;
    dp[from * A] = 1;
    for (std::int64_t j = 0; j < p_; ++j) {
      next.assign(V * A, 0);
      for (std::size_t v = 0; v < V; ++v)
        for (std::size_t r = 0; r < A; ++r) {
          const auto& c = dp[v * A + r];
          if (c == 0) continue;
          for (int id : g.out_edges(static_cast<int>(v))) {
            const auto& e = g.edges()[static_cast<std::size_t>(id)];
            std::size_t nr = mv.add(r, contrib[static_cast<std::size_t>(j)][static_cast<std::size_t>(e.label)]);
            next[static_cast<std::size_t>(e.to) * A + nr] += c;
          }
        }
      dp.swap(next);
    }
    for (std::size_t b = 0; b < A; ++b)
      for (std::size_t to = 0; to < V; ++to)
        for (std::size_t delta = 0; delta < A; ++delta) {
          const auto& c = dp[to * A + delta];
          if (c == 0) continue;
          m[states_.index(b, static_cast<int>(from))][states_.index(mv.add(b, delta), static_cast<int>(to))] = c;
        }
  }
  return m;
}

CountMatrix ChainSystem::count_matrix(std::int64_t i) const {
  if (const auto* m = cached(i)) return *m;
  return build_counts(i);
}

RationalMatrix ChainSystem::transition_matrix(std::int64_t i) const {
  return to_rational(count_matrix(i), power(k_, static_cast<std::uint64_t>(p_)));
}

std::vector<Word> ChainSystem::extension_set(std::int64_t i, const ResidueVector& b, int from, int to) const {
  if (i < 1) throw DomainError("extension sets are indexed from 1");
  const auto& g = cover_.graph;
  const std::size_t target = family_.moduli().index(b);
  std::vector<Word> out;
  Word w;
  w.base = g.base();
  std::function<void(int)> rec = [&](int v) {
    if (static_cast<std::int64_t>(w.size()) == p_) {
      if (v == to && family_.eval_index(w, static_cast<std::uint64_t>(i)) == target) out.push_back(w);
      return;
    }
    for (int id : g.out_edges(v)) {
      const auto& e = g.edges()[static_cast<std::size_t>(id)];
      w.digits.push_back(e.label);
      rec(e.to);
      w.digits.pop_back();
    }
  };
  rec(from);
  return out;
}

std::vector<BigInt> ChainSystem::initial_counts(std::int64_t i) const {
  if (i < ell_) throw PreconditionError("initial distribution needs i >= ell");
  const auto& tr = cover_.tracker;
  const auto& mv = family_.moduli();
  const std::size_t A = mv.size();
  const std::size_t T = static_cast<std::size_t>(tr.dfa.size());
  std::vector<BigInt> dp(T * A, 0), next;
  dp[static_cast<std::size_t>(tr.start) * A] = 1;
  for (std::int64_t j = 0; j < ell_; ++j) {
    next.assign(T * A, 0);
    for (std::size_t s = 0; s < T; ++s)
      for (std::size_t r = 0; r < A; ++r) {
        const auto& c = dp[s * A + r];
        if (c == 0) continue;
        for (int d = 0; d < tr.dfa.base; ++d) {
          int t = tr.dfa.next[s][static_cast<std::size_t>(d)];
          if (t < 0) continue;
          next[static_cast<std::size_t>(t) * A + mv.add(r, family_.contribution_index(d, static_cast<std::uint64_t>(j)))] += c;
        }
      }
    dp.swap(next);
  }
  const auto& g = cover_.graph;
  const std::size_t V = static_cast<std::size_t>(g.size());
  std::vector<BigInt> nodes(V * A, 0);
  for (std::size_t s = 0; s < T; ++s) {
    int v = tr.node_of[s];
    if (v < 0) continue;
    for (std::size_t r = 0; r < A; ++r) nodes[static_cast<std::size_t>(v) * A + r] += dp[s * A + r];
  }
  for (std::int64_t j = ell_; j < i; ++j) {
    next.assign(V * A, 0);
    for (std::size_t v = 0; v < V; ++v)
      for (std::size_t r = 0; r < A; ++r) {
        const auto& c = nodes[v * A + r];
        if (c == 0) continue;
        for (int id : g.out_edges(static_cast<int>(v))) {
          const auto& e = g.edges()[static_cast<std::size_t>(id)];
          next[static_cast<std::size_t>(e.to) * A + mv.add(r, family_.contribution_index(e.label, static_cast<std::uint64_t>(j)))] += c;
        }
      }
    nodes.swap(next);
  }
  std::vector<BigInt> out(states_.size(), 0);
  for (std::size_t v = 0; v < V; ++v)
    for (std::size_t r = 0; r < A; ++r) out[states_.index(r, static_cast<int>(v))] = nodes[v * A + r];
  return out;
}

RationalDistribution ChainSystem::initial_distribution(std::int64_t i) const { return normalize(initial_counts(i)); }

std::vector<BigInt> ChainSystem::evolve_counts(std::int64_t i, std::uint64_t n) const {
  if (n > kMaxEvolveSteps) throw DomainError("evolve exponent above the 2^16 cap");
  auto v = initial_counts(i);
  if (n == 0) return v;
  CountMatrix p = count_matrix(i);
  while (true) {
    if (n & 1) v = multiply(v, p);
    n >>= 1;
    if (!n) break;
    p = multiply(p, p);
  }
  return v;
}

RationalDistribution ChainSystem::evolve(std::int64_t i, std::uint64_t n) const { return normalize(evolve_counts(i, n)); }

Adjacency ChainSystem::support_graph(std::int64_t i) const {
  const auto m = count_matrix(i);
  Adjacency adj(m.size());
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c)
      if (m[r][c] != 0) adj[r].push_back(static_cast<int>(c));
  return adj;
}

MarkovVerdict ChainSystem::markov_verdict(std::int64_t i) const {
  MarkovVerdict v;
  v.i = i;
  const auto adj = support_graph(i);
  v.sccs = strongly_connected_components(adj);
  v.irreducible = v.sccs.size() == 1;
  v.period = cyclic_period(adj, v.sccs.front());
  v.aperiodic = v.period == 1;
  return v;
}

std::vector<MarkovVerdict> ChainSystem::markov_condition() const {
  std::vector<MarkovVerdict> out;
  for (auto i : window()) out.push_back(markov_verdict(i));
  return out;
}

bool ChainSystem::markov_condition_holds() const {
  for (const auto& v : markov_condition())
    if (!v.irreducible || !v.aperiodic) return false;
  return true;
}

namespace {

struct SupportClasses {
  std::vector<int> support;
  std::vector<std::vector<int>> classes;
  std::vector<int> periods;
};

SupportClasses visited_classes(const Adjacency& adj, const RationalDistribution& mu) {
  SupportClasses out;
  std::vector<int> seeds;
  for (std::size_t s = 0; s < mu.size(); ++s)
    if (mu[s] != 0) seeds.push_back(static_cast<int>(s));
  out.support = forward_closure(adj, seeds);
  std::vector<char> in_support(adj.size(), 0);
  for (int s : out.support) in_support[static_cast<std::size_t>(s)] = 1;
  std::vector<int> class_of(adj.size(), -1);
  for (auto& comp : strongly_connected_components(adj)) {
    if (!in_support[static_cast<std::size_t>(comp.front())]) continue;
    for (int s : comp) class_of[static_cast<std::size_t>(s)] = static_cast<int>(out.classes.size());
    out.classes.push_back(std::move(comp));
  }
  for (std::size_t c = 0; c < out.classes.size(); ++c) {
    for (int s : out.classes[c])
      for (int t : adj[static_cast<std::size_t>(s)])
        if (class_of[static_cast<std::size_t>(t)] != static_cast<int>(c)) throw std::logic_error("visited class is not closed");
    out.periods.push_back(cyclic_period(adj, out.classes[c]));
  }
  return out;
}

}  // namespace

LimitDistribution ChainSystem::limit_distribution(std::int64_t i) const {
  const auto adj = support_graph(i);
  const auto mu = initial_distribution(i);
  const auto vc = visited_classes(adj, mu);
  LimitDistribution ld;
  ld.support = vc.support;
  ld.period = 1;
  for (std::size_t c = 0; c < vc.classes.size(); ++c) {
    const int q = vc.periods[c];
    ld.period = std::lcm(ld.period, q);
    if (q > 1) {
      auto cyc = cyclic_classes(adj, vc.classes[c], q);
      ld.cyclic_classes.insert(ld.cyclic_classes.end(), cyc.begin(), cyc.end());
    }
  }
  ld.exists = ld.period == 1;
  if (!ld.exists) return ld;
  ld.limit.assign(mu.size(), Rational(0));
  std::optional<Rational> common;
  bool constant = true;
  for (const auto& cls : vc.classes) {
    Rational weight = 0;
    for (int s : cls) weight += mu[static_cast<std::size_t>(s)];
    Rational value = weight / static_cast<long>(cls.size());
    for (int s : cls) ld.limit[static_cast<std::size_t>(s)] = value;
    if (common && *common != value) constant = false;
    common = value;
  }
  if (constant) ld.uniform_value = common;
  return ld;
}

std::vector<ChainClass> ChainSystem::decompose_classes(std::int64_t i) const {
  const auto counts = count_matrix(i);
  const BigInt kp = power(k_, static_cast<std::uint64_t>(p_));
  Adjacency adj(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r)
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (counts[r][c] != 0) adj[r].push_back(static_cast<int>(c));
  const auto mu = initial_distribution(i);
  const auto vc = visited_classes(adj, mu);
  std::vector<ChainClass> out;
  for (const auto& cls : vc.classes) {
    ChainClass cc;
    cc.states = cls;
    cc.weight = 0;
    for (int s : cls) cc.weight += mu[static_cast<std::size_t>(s)];
    for (int s : cls) {
      cc.initial.push_back(mu[static_cast<std::size_t>(s)] / cc.weight);
      std::vector<Rational> row;
      for (int t : cls) {
        Rational q(counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)], kp);
        q.canonicalize();
        row.push_back(q);
      }
      cc.matrix.push_back(std::move(row));
    }
    out.push_back(std::move(cc));
  }
  return out;
}

SpectralEstimate ChainSystem::spectral_gap_estimate(std::int64_t i, int steps) const {
  SpectralEstimate est;
  const auto ld = limit_distribution(i);
  if (!ld.exists) {
    est.rho = std::nan("");
    return est;
  }
  const auto m = transition_matrix(i);
  const std::size_t n = m.size();
  std::vector<std::vector<double>> md(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) md[r][c] = m[r][c].get_d();
  auto step = [&](const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      if (x[r] != 0.0)
        for (std::size_t c = 0; c < n; ++c) y[c] += x[r] * md[r][c];
    return y;
  };

  std::vector<double> x(n), target(n);
  const auto mu = initial_distribution(i);
  for (std::size_t s = 0; s < n; ++s) {
    x[s] = mu[s].get_d();
    target[s] = ld.limit[s].get_d();
  }
  for (int t = 1; t <= steps; ++t) {
    x = step(x);
    double tv = 0;
    for (std::size_t s = 0; s < n; ++s) tv += std::abs(x[s] - target[s]);
    est.tv.push_back(tv / 2);
  }

  // Power iteration on the complement of the per-class constants.
  const auto classes = decompose_classes(i);
  auto deflate = [&](std::vector<double>& y) {
    for (const auto& cc : classes) {
      double mean = 0;
      for (int s : cc.states) mean += y[static_cast<std::size_t>(s)];
      mean /= static_cast<double>(cc.states.size());
      for (int s : cc.states) y[static_cast<std::size_t>(s)] -= mean;
    }
    std::vector<char> in(n, 0);
    for (int s : ld.support) in[static_cast<std::size_t>(s)] = 1;
    for (std::size_t s = 0; s < n; ++s)
      if (!in[s]) y[s] = 0;
  };
  auto norm = [](const std::vector<double>& y) {
    double s = 0;
    for (double v : y) s += v * v;
    return std::sqrt(s);
  };
  std::vector<double> y(n);
  for (std::size_t s = 0; s < n; ++s) y[s] = std::sin(1.0 + 1.7 * static_cast<double>(s));
  deflate(y);
  double log_growth = 0;
  const int burn = 200, measure = 200;
  for (int t = 0; t < burn + measure; ++t) {
    double before = norm(y);
    if (before < 1e-280) {
      est.rho = 0;
      return est;
    }
    for (double& v : y) v /= before;
    y = step(y);
    deflate(y);
    double after = norm(y);
    if (after == 0.0) {
      est.rho = 0;
      return est;
    }
    if (t >= burn) log_growth += std::log(after);
  }
  est.rho = std::exp(log_growth / measure);
  return est;
}

}  // namespace mdist
