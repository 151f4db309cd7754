#include "mdist/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

#include "mdist/chain.hpp"
#include "mdist/errors.hpp"
#include "mdist/graph.hpp"

namespace mdist {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::uniform: return "uniform";
    case Verdict::subgroup_uniform: return "subgroup-uniform";
    case Verdict::zero_or_nonexistent: return "zero-or-nonexistent";
    case Verdict::not_uniform_with_witness: return "not-uniform-with-witness";
    case Verdict::unsupported: return "unsupported";
  }
  return "unsupported";
}

std::string method_name(Method m) {
  switch (m) {
    case Method::missing_digits: return "missing-digits";
    case Method::general_pair: return "general-pair";
    case Method::gelfond: return "gelfond";
    case Method::sft: return "sft";
    case Method::chain_direct: return "chain-direct";
  }
  return "chain-direct";
}

LimitValue AnalysisReport::at(const ResidueVector& b) const {
  const auto mv = modulus_vector();
  return table.at(mv.index(mv.reduce(b)));
}

GAdditiveFamily pair_family(int g, std::int64_t a, std::int64_t a2) {
  if (a2 <= 1) return GAdditiveFamily({GAdditiveFunction::identity(g, a)});
  return GAdditiveFamily::id_and_sum(g, a, a2);
}

namespace {

std::string join_ints(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t j = 0; j < xs.size(); ++j) s += (j ? "," : "") + std::to_string(xs[j]);
  return s;
}

}  // namespace

std::string describe(const ShiftSpec& spec) {
  std::ostringstream os;
  os << kind_name(spec.kind) << " g=" << spec.base;
  switch (spec.kind) {
    case ShiftSpec::Kind::full: os << " D={" << join_ints(spec.digits) << "}"; break;
    case ShiftSpec::Kind::sft1: os << " D={" << join_ints(spec.digits) << "} pairs=" << spec.allowed.size(); break;
    case ShiftSpec::Kind::sofic: os << " nodes=" << spec.nodes.size() << " edges=" << spec.edges.size(); break;
    case ShiftSpec::Kind::sgap: os << " S={" << join_ints(spec.gaps) << "}"; break;
    case ShiftSpec::Kind::union_of:
      os << " of [";
      for (std::size_t j = 0; j < spec.parts.size(); ++j) os << (j ? "; " : "") << describe(spec.parts[j]);
      os << "]";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Horizon profile

const std::vector<Rational>& HorizonProfile::at_horizon(std::int64_t m) const {
  std::int64_t r = ((m - offset) % period + period) % period;
  return tables.at(static_cast<std::size_t>(r));
}

bool HorizonProfile::constant() const {
  for (const auto& t : tables)
    if (t != tables.front()) return false;
  return true;
}

namespace {

using RationalRows = std::vector<std::vector<Rational>>;

// x with x * z = rhs, by elimination on the transpose.
std::vector<Rational> solve_left(const RationalRows& z, const std::vector<Rational>& rhs) {
  const std::size_t n = z.size();
  RationalRows m(n, std::vector<Rational>(n + 1));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m[r][c] = z[c][r];
    m[r][n] = rhs[r];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) throw std::logic_error("singular system in the transient projection");
    std::swap(m[piv], m[col]);
    const Rational inv = 1 / m[col][col];
    for (std::size_t c = col; c <= n; ++c) m[col][c] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t r = 0; r < n; ++r) x[r] = m[r][n];
  return x;
}

double growth_rate(const std::vector<std::vector<double>>& b) {
  const std::size_t n = b.size();
  std::vector<double> x(n, 1.0);
  double log_sum = 0;
  const int burn = 2000, window = 2000;
  for (int t = 0; t < burn + window; ++t) {
    std::vector<double> y(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) y[c] += x[r] * b[r][c];
    double norm = 0;
    for (double v : y) norm += v;
    if (norm == 0.0) return 0.0;
    for (double& v : y) v /= norm;
    if (t >= burn) log_sum += std::log(norm);
    x.swap(y);
  }
  return std::exp(log_sum / window);
}

}  // namespace

HorizonProfile horizon_profile(const FischerCover& fc, const GAdditiveFamily& family) {
  if (!fc.k) throw PreconditionError("regularity required: limit profiles need a k-regular presentation");
  const auto& g = fc.graph;
  if (g.base() != family.base()) throw DomainError("cover and family use different bases");
  const int k = *fc.k;
  const int base = g.base();
  const auto& mv = family.moduli();
  const std::size_t A = mv.size();
  const auto& tr = fc.tracker;

  // Units: tracker states outside the node set, then cover nodes.
  std::vector<int> unit_of(static_cast<std::size_t>(tr.dfa.size()));
  int T = 0;
  for (int s = 0; s < tr.dfa.size(); ++s)
    if (tr.node_of[static_cast<std::size_t>(s)] < 0) unit_of[static_cast<std::size_t>(s)] = T++;
  for (int s = 0; s < tr.dfa.size(); ++s)
    if (tr.node_of[static_cast<std::size_t>(s)] >= 0) unit_of[static_cast<std::size_t>(s)] = T + tr.node_of[static_cast<std::size_t>(s)];
  const int V = g.size();
  const std::size_t U = static_cast<std::size_t>(T + V);
  std::vector<std::vector<int>> succ(U, std::vector<int>(static_cast<std::size_t>(base), -1));
  for (int s = 0; s < tr.dfa.size(); ++s) {
    if (tr.node_of[static_cast<std::size_t>(s)] >= 0) continue;
    for (int d = 0; d < base; ++d) {
      int t = tr.dfa.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
      if (t >= 0) succ[static_cast<std::size_t>(unit_of[static_cast<std::size_t>(s)])][static_cast<std::size_t>(d)] = unit_of[static_cast<std::size_t>(t)];
    }
  }
  for (int v = 0; v < V; ++v)
    for (int d = 0; d < base; ++d) {
      int w = g.follow(v, d);
      if (w >= 0) succ[static_cast<std::size_t>(T + v)][static_cast<std::size_t>(d)] = T + w;
    }

  if (T > 0) {
    std::vector<std::vector<double>> b(static_cast<std::size_t>(T), std::vector<double>(static_cast<std::size_t>(T), 0.0));
    for (int u = 0; u < T; ++u)
      for (int d = 0; d < base; ++d) {
        int t = succ[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)];
        if (t >= 0 && t < T) b[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)] += 1.0;
      }
    if (growth_rate(b) > k - 1e-6) throw PreconditionError("non-synchronizing words grow as fast as the language");
  }

  const std::size_t S = U * A;
  auto step = [&](const std::vector<BigInt>& c, std::int64_t pos) {
    std::vector<std::size_t> contrib(static_cast<std::size_t>(base));
    for (int d = 0; d < base; ++d) contrib[static_cast<std::size_t>(d)] = family.contribution_index(d, static_cast<std::uint64_t>(pos));
    std::vector<BigInt> out(S, 0);
    for (std::size_t u = 0; u < U; ++u)
      for (std::size_t r = 0; r < A; ++r) {
        const auto& x = c[u * A + r];
        if (x == 0) continue;
        for (int d = 0; d < base; ++d) {
          int t = succ[u][static_cast<std::size_t>(d)];
          if (t >= 0) out[static_cast<std::size_t>(t) * A + mv.add(r, contrib[static_cast<std::size_t>(d)])] += x;
        }
      }
    return out;
  };
  auto block = [&](std::int64_t start, std::int64_t len) {
    CountMatrix h(S, std::vector<BigInt>(S, 0));
    for (std::size_t u = 0; u < U; ++u) {
      std::vector<BigInt> c(S, 0);
      c[u * A] = 1;
      for (std::int64_t j = 0; j < len; ++j) c = step(c, start + j);
      for (std::size_t r = 0; r < A; ++r)
        for (std::size_t u2 = 0; u2 < U; ++u2)
          for (std::size_t r2 = 0; r2 < A; ++r2) {
            const auto& x = c[u2 * A + r2];
            if (x != 0) h[u * A + r][u2 * A + mv.add(r, r2)] = x;
          }
    }
    return h;
  };
  const std::size_t node0 = static_cast<std::size_t>(T) * A;
  auto node_classes = [&](const CountMatrix& h) {
    Adjacency adj(S - node0);
    for (std::size_t r = node0; r < S; ++r)
      for (std::size_t c = node0; c < S; ++c)
        if (h[r][c] != 0) adj[r - node0].push_back(static_cast<int>(c - node0));
    auto comps = strongly_connected_components(adj);
    std::vector<int> periods;
    for (const auto& comp : comps) periods.push_back(cyclic_period(adj, comp));
    return std::make_pair(comps, periods);
  };

  const auto ep = find_eventual_period(family);
  HorizonProfile prof;
  prof.offset = ep.ell;
  std::int64_t P = ep.p;
  std::vector<CountMatrix> blocks;
  std::vector<std::vector<std::vector<int>>> classes;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 6 || P > 4096) throw DomainError("horizon period too large");
    blocks.clear();
    classes.clear();
    int q = 1;
    for (std::int64_t r = 0; r < P; ++r) {
      blocks.push_back(block(prof.offset + r, P));
      auto [comps, periods] = node_classes(blocks.back());
      for (int x : periods) q = std::lcm(q, std::max(x, 1));
      classes.push_back(std::move(comps));
    }
    if (q == 1) break;
    P *= q;
  }
  prof.period = P;

  std::vector<std::vector<BigInt>> counts{std::vector<BigInt>(S, 0)};
  counts[0][static_cast<std::size_t>(unit_of[static_cast<std::size_t>(tr.start)]) * A] = 1;
  for (std::int64_t t = 0; t + 1 < prof.offset + P; ++t) counts.push_back(step(counts.back(), t));

  BigInt kP = 1;
  for (std::int64_t j = 0; j < P; ++j) kP *= k;
  const std::size_t NA = S - node0;
  std::vector<std::vector<Rational>> node_limit(static_cast<std::size_t>(P));
  for (std::int64_t r = 0; r < P; ++r) {
    const auto& h = blocks[static_cast<std::size_t>(r)];
    const auto& c = counts[static_cast<std::size_t>(prof.offset + r)];
    std::vector<Rational> v(NA);
    for (std::size_t s = 0; s < NA; ++s) v[s] = c[node0 + s];
    if (T > 0) {
      RationalRows z(node0, std::vector<Rational>(node0));
      std::vector<Rational> u(node0);
      for (std::size_t r1 = 0; r1 < node0; ++r1) {
        u[r1] = c[r1];
        for (std::size_t c1 = 0; c1 < node0; ++c1) z[r1][c1] = Rational(-h[r1][c1]);
        z[r1][r1] += kP;
      }
      auto x = solve_left(z, u);
      for (std::size_t r1 = 0; r1 < node0; ++r1) {
        if (x[r1] == 0) continue;
        for (std::size_t s = 0; s < NA; ++s)
          if (h[r1][node0 + s] != 0) v[s] += x[r1] * h[r1][node0 + s];
      }
    }
    BigInt scale = 1;
    for (std::int64_t j = 0; j < prof.offset + r; ++j) scale *= k;
    std::vector<Rational> lim(NA, Rational(0));
    for (const auto& cls : classes[static_cast<std::size_t>(r)]) {
      Rational sum = 0;
      for (int s : cls) sum += v[static_cast<std::size_t>(s)];
      Rational each = sum / (Rational(scale) * static_cast<long>(cls.size()));
      for (int s : cls) lim[static_cast<std::size_t>(s)] = each;
    }
    node_limit[static_cast<std::size_t>(r)] = std::move(lim);
  }

  // Canonical integers of length t: words of length t minus those ending in a
  // most significant zero.
  std::vector<char> has_zero(static_cast<std::size_t>(V));
  for (int v = 0; v < V; ++v) has_zero[static_cast<std::size_t>(v)] = g.follow(v, 0) >= 0;
  std::vector<std::vector<Rational>> phi(static_cast<std::size_t>(P), std::vector<Rational>(A, Rational(0)));
  for (std::int64_t r = 0; r < P; ++r) {
    const auto& cur = node_limit[static_cast<std::size_t>(r)];
    const auto& prev = node_limit[static_cast<std::size_t>((r + P - 1) % P)];
    for (int v = 0; v < V; ++v)
      for (std::size_t b = 0; b < A; ++b) {
        const std::size_t s = static_cast<std::size_t>(v) * A + b;
        phi[static_cast<std::size_t>(r)][b] += cur[s];
        if (has_zero[static_cast<std::size_t>(v)]) phi[static_cast<std::size_t>(r)][b] -= prev[s] / k;
      }
  }
  for (std::int64_t r = 0; r < P; ++r) {
    std::vector<Rational> y(A, Rational(0));
    Rational weight = 1;
    for (std::int64_t s = 0; s < P; ++s) {
      const auto& f = phi[static_cast<std::size_t>(((r - s) % P + P) % P)];
      for (std::size_t b = 0; b < A; ++b) y[b] += weight * f[b];
      weight /= k;
    }
    Rational total = 0;
    for (const auto& x : y) total += x;
    if (total <= 0) throw std::logic_error("empty limiting census");
    for (auto& x : y) x /= total;
    prof.tables.push_back(std::move(y));
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

AnalysisReport blank(const std::string& shift, const GAdditiveFamily& fam, Method method) {
  AnalysisReport rep;
  rep.shift = shift;
  rep.base = fam.base();
  rep.moduli = fam.moduli().moduli();
  for (const auto& f : fam.functions()) rep.functions.push_back(f.name());
  rep.method = method;
  return rep;
}

void set_uniform(AnalysisReport& rep) {
  const auto n = rep.modulus_vector().size();
  rep.verdict = Verdict::uniform;
  rep.table.assign(n, Rational(1, static_cast<long>(n)));
}

AnalysisReport unsupported(AnalysisReport rep, const std::string& why) {
  rep.verdict = Verdict::unsupported;
  rep.table.clear();
  rep.notes.push_back(why);
  return rep;
}

// Support of a table as a product of subgroups <gen_j>, if it is one.
std::optional<std::vector<std::int64_t>> product_subgroup(const ModulusVector& mv, const std::vector<char>& support) {
  std::vector<std::int64_t> gen = mv.moduli();
  for (std::size_t i = 0; i < mv.size(); ++i) {
    if (!support[i]) continue;
    auto b = mv.residue(i);
    for (std::size_t j = 0; j < b.size(); ++j) gen[j] = std::gcd(gen[j], b[j]);
  }
  for (std::size_t i = 0; i < mv.size(); ++i) {
    auto b = mv.residue(i);
    bool in = true;
    for (std::size_t j = 0; j < b.size(); ++j) in = in && b[j] % gen[j] == 0;
    if (in != static_cast<bool>(support[i])) return std::nullopt;
  }
  return gen;
}

void classify_table(AnalysisReport& rep) {
  const auto mv = rep.modulus_vector();
  const Rational even(1, static_cast<long>(mv.size()));
  bool has_dne = false, all_even = true, nonzero_exists = false;
  std::optional<Rational> level;
  bool constant_on_support = true;
  std::vector<char> support(mv.size(), 0);
  for (std::size_t i = 0; i < rep.table.size(); ++i) {
    const auto& v = rep.table[i];
    if (!v) {
      has_dne = true;
      all_even = false;
      continue;
    }
    if (*v != even) all_even = false;
    if (*v != 0) {
      nonzero_exists = true;
      support[i] = 1;
      if (level && *level != *v) constant_on_support = false;
      level = *v;
    }
  }
  if (has_dne) {
    rep.verdict = nonzero_exists ? Verdict::not_uniform_with_witness : Verdict::zero_or_nonexistent;
    for (std::size_t i = 0; i < rep.table.size(); ++i)
      if (!rep.table[i]) {
        rep.witness_residues.push_back(mv.residue(i));
        break;
      }
    return;
  }
  if (all_even) {
    rep.verdict = Verdict::uniform;
    return;
  }
  if (constant_on_support) {
    if (auto gen = product_subgroup(mv, support)) {
      rep.verdict = Verdict::subgroup_uniform;
      rep.subgroup = gen;
      return;
    }
  }
  rep.verdict = Verdict::not_uniform_with_witness;
  std::size_t worst = 0;
  Rational dev = -1;
  for (std::size_t i = 0; i < rep.table.size(); ++i) {
    Rational d = abs(*rep.table[i] - even);
    if (d > dev) {
      dev = d;
      worst = i;
    }
  }
  rep.witness_residues.push_back(mv.residue(worst));
}

// Fills the table from the exact horizon profile and classifies it.
void apply_profile(AnalysisReport& rep, const HorizonProfile& hp) {
  const std::size_t n = hp.tables.front().size();
  rep.table.assign(n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    bool same = true;
    for (const auto& t : hp.tables) same = same && t[i] == hp.tables.front()[i];
    if (same) rep.table[i] = hp.tables.front()[i];
  }
  if (!hp.constant())
    for (std::int64_t r = 0; r < hp.period; ++r)
      rep.phases.push_back({(hp.offset + r) % hp.period, hp.period, hp.tables[static_cast<std::size_t>(r)]});
  classify_table(rep);
}

std::int64_t effective(std::int64_t a2) { return std::max<std::int64_t>(a2, 1); }

void require_digits(int g, std::vector<int>& digits) {
  std::sort(digits.begin(), digits.end());
  ShiftSpec::full(g, digits);  // validates
  if (digits.size() < 2) throw PreconditionError("at least two digits are required");
}

}  // namespace

AnalysisReport analyze_missing_digits(int g, std::vector<int> digits, std::int64_t a, std::int64_t a2) {
  require_digits(g, digits);
  const auto fam = pair_family(g, a, a2);
  auto rep = blank(describe(ShiftSpec::full(g, digits)), fam, Method::missing_digits);
  const std::int64_t b = effective(a2);
  if (std::gcd<std::int64_t>(g, a) != 1 || std::gcd(a, b) != 1)
    return unsupported(rep, "requires gcd(g,a) = gcd(a,a') = 1; use chain-direct or the oracle");

  const auto mv = fam.moduli();
  const std::int64_t delta = delta_gcd(a * b, digits);
  const std::int64_t da = std::gcd(delta, a), db = std::gcd(delta, b);
  const std::int64_t d1 = digits.front();
  rep.delta = delta;
  rep.subgroup = mv.rank() == 1 ? std::vector<std::int64_t>{da} : std::vector<std::int64_t>{da, db};
  auto in_subgroup = [&](const ResidueVector& r, std::int64_t sa, std::int64_t sb) {
    if ((r[0] - sa) % da != 0) return false;
    return mv.rank() == 1 || (r[1] - sb) % db == 0;
  };

  if (delta == 1) {
    set_uniform(rep);
    return rep;
  }
  if (d1 % da == 0 && d1 % db == 0) {
    rep.verdict = Verdict::subgroup_uniform;
    Rational value(delta, a * b);
    value.canonicalize();
    rep.table.assign(mv.size(), Rational(0));
    for (std::size_t i = 0; i < mv.size(); ++i)
      if (in_subgroup(mv.residue(i), 0, 0)) rep.table[i] = value;
    return rep;
  }

  // Integers of length i lie in the coset shifted by
  // (d1 * (1 + g + ... + g^(i-1)) mod da, i * d1 mod db).
  rep.verdict = Verdict::zero_or_nonexistent;
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen;
  std::int64_t geo = 1 % da, pw = g % da;
  for (std::int64_t i = 1;; ++i) {
    auto key = std::make_tuple(geo, pw, i % db);
    if (!seen.insert(key).second) {
      rep.coset_period = i - 1;
      break;
    }
    ResidueVector shift{(d1 % da) * geo % da};
    if (mv.rank() == 2) shift.push_back(i * d1 % db);
    rep.cosets.push_back({i, shift});
    geo = (geo + pw) % da;
    pw = pw * g % da;
  }
  rep.table.assign(mv.size(), Rational(0));
  for (std::size_t i = 0; i < mv.size(); ++i) {
    auto r = mv.residue(i);
    for (const auto& [len, shift] : rep.cosets)
      if (in_subgroup(r, shift[0], mv.rank() == 2 ? shift[1] : 0)) {
        rep.table[i] = std::nullopt;
        break;
      }
  }
  rep.notes.push_back("per-length cosets differ; limits on them oscillate with the length");
  return rep;
}

AnalysisReport analyze_general_pair(int g, std::vector<int> digits, std::int64_t a, std::int64_t a2) {
  require_digits(g, digits);
  const auto fam = pair_family(g, a, a2);
  const auto spec = ShiftSpec::full(g, digits);
  auto rep = blank(describe(spec), fam, Method::general_pair);
  if (std::gcd<std::int64_t>(g, a) != 1) return unsupported(rep, "requires gcd(g,a) = 1");
  const std::int64_t b = effective(a2);
  const std::int64_t p = euler_period(g, a, b);
  const std::int64_t da = delta_gcd(a, digits);
  rep.delta = da;

  std::vector<std::int64_t> pw(static_cast<std::size_t>(p));
  for (std::int64_t l = 0; l < p; ++l) pw[static_cast<std::size_t>(l)] = powmod(g, static_cast<std::uint64_t>(l), a);
  auto index = [&](std::int64_t v, std::int64_t s, std::int64_t l) {
    return static_cast<std::size_t>((v * b + s) * p + l);
  };
  const std::size_t states = static_cast<std::size_t>(a * b * p);
  std::vector<long long> parent(states, -2);
  std::vector<int> via(states, -1);
  std::deque<std::size_t> queue;
  const std::size_t goal = index(0, 1 % b, 0);
  auto expand = [&](std::int64_t v, std::int64_t s, std::int64_t l, long long from) {
    for (int d : digits) {
      std::int64_t v2 = (v + d * pw[static_cast<std::size_t>(l)]) % a, s2 = (s + d) % b, l2 = (l + 1) % p;
      std::size_t t = index(v2, s2, l2);
      if (parent[t] != -2) continue;
      parent[t] = from;
      via[t] = d;
      queue.push_back(t);
    }
  };
  expand(0, 0, 0, -1);
  bool found = parent[goal] != -2;
  while (!found && !queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    std::int64_t l = static_cast<std::int64_t>(cur) % p, rest = static_cast<std::int64_t>(cur) / p;
    expand(rest / b, rest % b, l, static_cast<long long>(cur));
    found = parent[goal] != -2;
  }
  if (found) {
    std::vector<int> w;
    for (long long cur = static_cast<long long>(goal); cur >= 0; cur = parent[static_cast<std::size_t>(cur)])
      w.push_back(via[static_cast<std::size_t>(cur)]);
    std::reverse(w.begin(), w.end());
    Word word(g, w);
    const auto ev = GAdditiveFamily::id_and_sum(g, a, b).eval(word);
    if (ev[0] != 0 || ev[1] != 1 % b || static_cast<std::int64_t>(w.size()) % p != 0)
      throw std::logic_error("witness word does not re-evaluate");
    rep.witness_words.push_back(word);
  } else {
    std::size_t reached = 0;
    for (auto x : parent) reached += x != -2;
    rep.certificate_states = reached;
    rep.notes.push_back("no word with (w) = 0 mod a, S(w) = 1 mod a', |w| = 0 mod " + std::to_string(p) +
                        "; closure exhausted");
  }
  if (da == 1 && found) {
    set_uniform(rep);
    return rep;
  }
  if (da != 1) rep.notes.push_back("gcd(a, d_j - d_1) = " + std::to_string(da));
  apply_profile(rep, horizon_profile(fischer_cover(build_cover(spec)), fam));
  if (rep.verdict == Verdict::uniform) throw std::logic_error("limit profile contradicts the witness criterion");
  if (rep.verdict != Verdict::zero_or_nonexistent) rep.verdict = Verdict::not_uniform_with_witness;
  return rep;
}

AnalysisReport analyze_naturals(int g, std::int64_t a, std::int64_t a2) {
  if (g < 2) throw DomainError("base must be at least 2");
  if (a < 1) throw DomainError("modulus must be positive");
  std::vector<int> all(static_cast<std::size_t>(g));
  std::iota(all.begin(), all.end(), 0);
  const auto spec = ShiftSpec::full(g, all);
  const auto fam = pair_family(g, a, a2);
  auto rep = blank(describe(spec), fam, Method::gelfond);
  const std::int64_t b = effective(a2);

  // (n mod a, S mod a', g^i mod a, nonzero)
  auto index = [&](std::int64_t n, std::int64_t s, std::int64_t w, int nz) {
    return static_cast<std::size_t>((((n * b + s) * a + w) * 2) + nz);
  };
  const std::size_t states = static_cast<std::size_t>(a * b * a * 2);
  std::vector<long long> parent(states, -2);
  std::vector<int> via(states, -1);
  std::deque<std::size_t> queue;
  const std::size_t start = index(0, 0, 1 % a, 0);
  parent[start] = -1;
  queue.push_back(start);
  std::optional<std::size_t> goal;
  while (!queue.empty() && !goal) {
    std::size_t cur = queue.front();
    queue.pop_front();
    std::int64_t x = static_cast<std::int64_t>(cur);
    const int nz = static_cast<int>(x % 2);
    x /= 2;
    const std::int64_t w = x % a;
    x /= a;
    const std::int64_t s = x % b, n = x / b;
    for (int d = 0; d < g && !goal; ++d) {
      std::size_t t = index((n + d * w) % a, (s + d) % b, w * g % a, nz || d != 0);
      if (parent[t] != -2) continue;
      parent[t] = static_cast<long long>(cur);
      via[t] = d;
      queue.push_back(t);
      if ((n + d * w) % a == 0 && (s + d) % b == 1 % b && (nz || d != 0)) goal = t;
    }
  }
  const bool classical = std::gcd<std::int64_t>(g - 1, b) == 1;
  rep.notes.push_back(std::string("gcd(g-1,a') = 1: ") + (classical ? "yes" : "no"));
  if (goal) {
    std::vector<int> w;
    for (long long cur = static_cast<long long>(*goal); cur != static_cast<long long>(start); cur = parent[static_cast<std::size_t>(cur)])
      w.push_back(via[static_cast<std::size_t>(cur)]);
    std::reverse(w.begin(), w.end());
    while (w.size() > 1 && w.back() == 0) w.pop_back();
    Word word(g, w);
    BigInt n = word_to_integer(word);
    long long sum = std::accumulate(w.begin(), w.end(), 0LL);
    if (BigInt(n % a) != 0 || sum % b != 1 % b || n == 0) throw std::logic_error("witness integer does not re-evaluate");
    rep.witness_integers.push_back(n);
    rep.witness_words.push_back(word);
    set_uniform(rep);
    return rep;
  }
  if (classical) throw std::logic_error("classical condition holds but no witness was found");
  std::set<ResidueVector> reach;
  std::size_t reached = 0;
  for (std::size_t t = 0; t < states; ++t) {
    if (parent[t] == -2) continue;
    ++reached;
    if (t % 2 == 1) {
      std::int64_t x = static_cast<std::int64_t>(t) / 2 / a;
      reach.insert({x / b, x % b});
    }
  }
  rep.certificate_states = reached;
  rep.certificate_reachable.assign(reach.begin(), reach.end());
  rep.notes.push_back("closure exhausted: no n > 0 with n = 0 mod a and S(n) = 1 mod a'");
  rep.witness_residues.push_back(fam.moduli().rank() == 2 ? ResidueVector{0, 1 % b} : ResidueVector{0});
  apply_profile(rep, horizon_profile(fischer_cover(build_cover(spec)), fam));
  rep.witness_residues.resize(1);
  rep.verdict = Verdict::not_uniform_with_witness;
  return rep;
}

AnalysisReport analyze_sft(const ShiftSpec& spec, std::int64_t a, std::int64_t a2) {
  if (spec.kind != ShiftSpec::Kind::sft1) throw PreconditionError("digit-pair criterion needs a 1-step SFT");
  spec.validate();
  const int g = spec.base;
  const auto fam = pair_family(g, a, a2);
  auto rep = blank(describe(spec), fam, Method::sft);
  rep.sft_shortcut = true;
  const std::int64_t b = effective(a2);
  if (std::gcd<std::int64_t>(g, a) != 1 || std::gcd(a, b) != 1)
    return unsupported(rep, "requires gcd(g,a) = gcd(a,a') = 1");
  auto sc = sft_shortcut_cover(spec);
  if (!sc.k || !is_transitive(sc.graph)) return unsupported(rep, "digit matrix must be k-regular (k >= 2) and irreducible");
  std::set<std::pair<int, int>> allowed(spec.allowed.begin(), spec.allowed.end());
  auto t = [&](int x, int y) { return allowed.count({x, y}) > 0; };
  for (int d : spec.digits)
    for (int e : spec.digits) {
      if (d == e || !t(d, d) || !t(d, e) || !t(e, d)) continue;
      if (std::gcd<std::int64_t>(std::abs(e - d), a * b) != 1) continue;
      set_uniform(rep);
      rep.witness_words.push_back(Word(g, {e, d}));
      rep.notes.push_back("digit pair (" + std::to_string(d) + "," + std::to_string(e) + ")");
      return rep;
    }
  auto fallback = chain_direct(spec, fam);
  fallback.notes.push_back("no qualifying digit pair; chain-direct fallback");
  return fallback;
}

AnalysisReport chain_direct(const ShiftSpec& spec, const GAdditiveFamily& family) {
  spec.validate();
  if (spec.base != family.base()) throw DomainError("shift and family use different bases");
  auto rep = blank(describe(spec), family, Method::chain_direct);
  const int g = spec.base;

  bool coprime = true;
  std::vector<std::int64_t> id_moduli;
  for (const auto& f : family.functions())
    if (f.kind() == GAdditiveFunction::Kind::identity) {
      id_moduli.push_back(f.modulus());
      coprime = coprime && std::gcd<std::int64_t>(g, f.modulus()) == 1;
    }
  std::optional<std::int64_t> tail_digits;
  if (!coprime) {
    if (spec.kind == ShiftSpec::Kind::full && spec.is_all_digits()) {
      rep.notes.push_back("gcd(g,a) != 1 over all digits: class decomposition");
    } else if (spec.kind == ShiftSpec::Kind::full) {
      for (std::int64_t i = 1; i <= 64 && !tail_digits; ++i) {
        bool divides = true;
        for (auto m : id_moduli) divides = divides && powmod(g, static_cast<std::uint64_t>(i), m) == 0;
        if (divides) tail_digits = i;
      }
      if (!tail_digits) return unsupported(rep, "gcd(g,a) != 1 and a divides no power of g");
      rep.notes.push_back("a divides g^" + std::to_string(*tail_digits) + ": residues set by the last digits");
    } else {
      return unsupported(rep, "gcd(g,a) != 1 outside full shifts");
    }
  }

  FischerCover fc;
  try {
    if (spec.kind == ShiftSpec::Kind::sft1) {
      auto sc = sft_shortcut_cover(spec);
      if (sc.k && is_transitive(sc.graph)) {
        fc = std::move(sc);
        rep.sft_shortcut = true;
      } else {
        fc = fischer_cover(build_cover(spec));
      }
    } else {
      fc = fischer_cover(build_cover(spec));
    }
  } catch (const NotTransitiveError& e) {
    return unsupported(rep, std::string("not transitive: ") + std::to_string(e.components().size()) + " components");
  }
  if (!fc.k) return unsupported(rep, "presentation is not k-regular with k >= 2");

  try {
    ChainSystem sys(fc, family);
    bool holds = true;
    for (const auto& v : sys.markov_condition()) {
      holds = holds && v.irreducible && v.aperiodic;
      rep.notes.push_back("i=" + std::to_string(v.i) + ": " + (v.irreducible ? "irreducible" : "reducible") +
                          ", period " + std::to_string(v.period));
    }
    rep.markov_condition = holds;
    if (holds) {
      set_uniform(rep);
      return rep;
    }
    if (!coprime && !tail_digits) {
      auto classes = sys.decompose_classes(sys.ell());
      std::string w;
      for (const auto& c : classes) w += (w.empty() ? "" : ",") + to_string(c.weight);
      rep.notes.push_back(std::to_string(classes.size()) + " classes at i=" + std::to_string(sys.ell()) + ", weights " + w);
    }
    apply_profile(rep, horizon_profile(fc, family));
  } catch (const PreconditionError& e) {
    return unsupported(rep, e.what());
  } catch (const DomainError& e) {
    return unsupported(rep, e.what());
  }

  if (tail_digits && family.functions().size() == 1) {
    // Every long integer's residue is that of its last digits, which range
    // over all digit tuples equally often.
    const auto& mv = family.moduli();
    std::vector<BigInt> counts(mv.size(), 0);
    BigInt total = 0;
    visit_words(build_cover(spec), static_cast<std::size_t>(*tail_digits), [&](const Word& w) {
      counts[family.eval_index(w)] += 1;
      total += 1;
    });
    for (std::size_t i = 0; i < mv.size(); ++i) {
      Rational q(counts[i], total);
      q.canonicalize();
      if (!rep.table[i] || *rep.table[i] != q) throw std::logic_error("last-digits reduction disagrees with the limit profile");
    }
  }
  return rep;
}

AnalysisReport analyze(const ShiftSpec& spec, const GAdditiveFamily& family) {
  spec.validate();
  std::optional<std::pair<std::int64_t, std::int64_t>> pair;
  const auto& fs = family.functions();
  if (fs.size() == 1 && fs[0].kind() == GAdditiveFunction::Kind::identity) pair = {fs[0].modulus(), 1};
  if (fs.size() == 2 && fs[0].kind() == GAdditiveFunction::Kind::identity && fs[1].kind() == GAdditiveFunction::Kind::sum_digits)
    pair = {fs[0].modulus(), fs[1].modulus()};
  const int g = spec.base;
  if (pair && spec.kind == ShiftSpec::Kind::full) {
    auto [a, a2] = *pair;
    if (spec.is_all_digits()) return analyze_naturals(g, a, a2);
    if (spec.digits.size() >= 2) {
      auto rep = analyze_missing_digits(g, spec.digits, a, a2);
      if (rep.verdict != Verdict::unsupported) return rep;
      if (std::gcd<std::int64_t>(g, a) == 1) return analyze_general_pair(g, spec.digits, a, a2);
    }
  }
  if (pair && spec.kind == ShiftSpec::Kind::sft1) {
    auto rep = analyze_sft(spec, pair->first, pair->second);
    if (rep.verdict != Verdict::unsupported) return rep;
  }
  return chain_direct(spec, family);
}

}  // namespace mdist
