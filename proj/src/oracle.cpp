#include "mdist/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "mdist/errors.hpp"

namespace mdist {

std::uint64_t horizon(int g, int m) {
  if (g < 2 || m < 0) throw DomainError("horizon needs g >= 2 and m >= 0");
  std::uint64_t h = 1;
  for (int j = 0; j < m; ++j) {
    if (h > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(g))
      throw DomainError("horizon g^m exceeds 64 bits");
    h *= static_cast<std::uint64_t>(g);
  }
  return h;
}

namespace {

// Automaton reading words most significant digit first.
struct ReverseReader {
  SubsetAutomaton dfa;
  int base;
};

ReverseReader reverse_reader(const ShiftSpec& spec) {
  const Cover c = build_cover(spec).reversed();
  std::vector<int> all(static_cast<std::size_t>(c.size()));
  for (int v = 0; v < c.size(); ++v) all[static_cast<std::size_t>(v)] = v;
  return {determinize(c, {all}), c.base()};
}

// Number of digits of the largest value below limit.
int max_length(std::uint64_t limit, int g) {
  if (limit <= 1) return 1;
  std::uint64_t x = limit - 1;
  int t = 0;
  while (x > 0) {
    x /= static_cast<std::uint64_t>(g);
    ++t;
  }
  return t;
}

// Smallest t-digit integer with the given leading digits, saturating.
std::uint64_t saturating_mul_add(std::uint64_t v, std::uint64_t g, std::uint64_t d) {
  const auto max = std::numeric_limits<std::uint64_t>::max();
  if (v > (max - d) / g) return max;
  return v * g + d;
}

struct Task {
  int length;
  std::vector<int> prefix;  // most significant first
};

// Depth-first enumeration of t-digit integers below limit with a fixed prefix.
template <class Visit>
void run_task(const ReverseReader& rr, const Task& task, std::uint64_t limit, Visit&& visit) {
  const int t = task.length;
  const auto g = static_cast<std::uint64_t>(rr.base);
  std::vector<std::uint64_t> pow(static_cast<std::size_t>(t) + 1, 1);
  for (int j = 1; j <= t; ++j) pow[static_cast<std::size_t>(j)] = saturating_mul_add(pow[static_cast<std::size_t>(j - 1)], g, 0);

  std::vector<int> digits;  // most significant first
  int state = rr.dfa.starts.front();
  std::uint64_t value = 0;
  for (int d : task.prefix) {
    state = rr.dfa.next[static_cast<std::size_t>(state)][static_cast<std::size_t>(d)];
    if (state < 0) return;
    value = saturating_mul_add(value, g, static_cast<std::uint64_t>(d));
    digits.push_back(d);
  }
  // The smallest completion must stay below limit.
  auto below = [&](std::uint64_t v, int depth) {
    const auto rem = pow[static_cast<std::size_t>(t - depth)];
    if (v != 0 && v > std::numeric_limits<std::uint64_t>::max() / rem) return false;
    return v * rem < limit;
  };
  if (!below(value, static_cast<int>(digits.size()))) return;

  auto rec = [&](auto&& self, int st, std::uint64_t v, int depth) -> void {
    if (depth == t) {
      visit(v, digits);
      return;
    }
    for (int d = 0; d < rr.base; ++d) {
      const int s = rr.dfa.next[static_cast<std::size_t>(st)][static_cast<std::size_t>(d)];
      if (s < 0) continue;
      const std::uint64_t v2 = saturating_mul_add(v, g, static_cast<std::uint64_t>(d));
      if (!below(v2, depth + 1)) break;
      digits.push_back(d);
      self(self, s, v2, depth + 1);
      digits.pop_back();
    }
  };
  rec(rec, state, value, static_cast<int>(digits.size()));
}

std::vector<Task> make_tasks(const ReverseReader& rr, std::uint64_t limit) {
  std::vector<Task> tasks;
  const int tmax = max_length(limit, rr.base);
  for (int t = 1; t <= tmax; ++t) {
    if (t == 1) {
      tasks.push_back({1, {}});
      continue;
    }
    const int start = rr.dfa.starts.front();
    for (int d = 1; d < rr.base; ++d) {
      int s = rr.dfa.next[static_cast<std::size_t>(start)][static_cast<std::size_t>(d)];
      if (s < 0) continue;
      if (t == 2) {
        tasks.push_back({t, {d}});
        continue;
      }
      for (int e = 0; e < rr.base; ++e)
        if (rr.dfa.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] >= 0) tasks.push_back({t, {d, e}});
    }
  }
  return tasks;
}

bool canonical(const std::vector<int>& msb_digits) { return msb_digits.size() == 1 || msb_digits.front() != 0; }

}  // namespace

void visit_set(const ShiftSpec& spec, std::uint64_t limit, const std::function<void(std::uint64_t, const Word&)>& fn) {
  const auto rr = reverse_reader(spec);
  for (const auto& task : make_tasks(rr, limit))
    run_task(rr, task, limit, [&](std::uint64_t v, const std::vector<int>& msb) {
      if (!canonical(msb)) return;
      Word w(rr.base, std::vector<int>(msb.rbegin(), msb.rend()));
      fn(v, w);
    });
}

std::vector<std::uint64_t> enumerate_set(const ShiftSpec& spec, std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  const auto rr = reverse_reader(spec);
  for (const auto& task : make_tasks(rr, limit))
    run_task(rr, task, limit, [&](std::uint64_t v, const std::vector<int>& msb) {
      if (canonical(msb)) out.push_back(v);
    });
  return out;
}

std::vector<Rational> CensusTable::frequencies() const {
  std::vector<Rational> f;
  for (auto c : counts) {
    Rational q = total == 0 ? Rational(0) : Rational(BigInt(std::to_string(c)), BigInt(std::to_string(total)));
    q.canonicalize();
    f.push_back(q);
  }
  return f;
}

std::vector<std::uint64_t> CensusTable::counts_below_power(int m) const {
  if (m < 1 || m >= static_cast<int>(by_length.size())) throw DomainError("length outside the census");
  std::vector<std::uint64_t> out(moduli.size(), 0);
  for (int t = 1; t <= m; ++t)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += by_length[static_cast<std::size_t>(t)][i];
  return out;
}

CensusTable census(const ShiftSpec& spec, const GAdditiveFamily& family, std::uint64_t limit, unsigned threads) {
  if (spec.base != family.base()) throw DomainError("shift and family use different bases");
  const auto rr = reverse_reader(spec);
  const auto tasks = make_tasks(rr, limit);
  const auto& mv = family.moduli();
  const int tmax = max_length(limit, rr.base);
  // contrib[pos][d]
  std::vector<std::vector<std::size_t>> contrib(static_cast<std::size_t>(tmax));
  for (int pos = 0; pos < tmax; ++pos)
    for (int d = 0; d < rr.base; ++d) contrib[static_cast<std::size_t>(pos)].push_back(family.contribution_index(d, static_cast<std::uint64_t>(pos)));

  CensusTable table;
  table.limit = limit;
  table.base = rr.base;
  table.moduli = mv;
  table.counts.assign(mv.size(), 0);
  table.by_length.assign(static_cast<std::size_t>(tmax) + 1, std::vector<std::uint64_t>(mv.size(), 0));

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, tasks.size())));
  std::atomic<std::size_t> next{0};
  std::mutex merge;
  auto worker = [&]() {
    std::vector<std::vector<std::uint64_t>> local(static_cast<std::size_t>(tmax) + 1, std::vector<std::uint64_t>(mv.size(), 0));
    for (std::size_t j = next++; j < tasks.size(); j = next++) {
      const auto& task = tasks[j];
      const int t = task.length;
      auto& row = local[static_cast<std::size_t>(t)];
      run_task(rr, task, limit, [&](std::uint64_t, const std::vector<int>& msb) {
        if (!canonical(msb)) return;
        std::size_t r = 0;
        for (int k = 0; k < t; ++k)
          r = mv.add(r, contrib[static_cast<std::size_t>(t - 1 - k)][static_cast<std::size_t>(msb[static_cast<std::size_t>(k)])]);
        ++row[r];
      });
    }
    std::lock_guard<std::mutex> lock(merge);
    for (std::size_t t = 0; t < local.size(); ++t)
      for (std::size_t i = 0; i < mv.size(); ++i) table.by_length[t][i] += local[t][i];
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < threads; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (const auto& row : table.by_length)
    for (std::size_t i = 0; i < mv.size(); ++i) {
      table.counts[i] += row[i];
      table.total += row[i];
    }
  return table;
}

CensusTable census_horizon(const ShiftSpec& spec, const GAdditiveFamily& family, int m, unsigned threads) {
  return census(spec, family, horizon(spec.base, m), threads);
}

std::vector<double> predicted_frequencies(const AnalysisReport& report) {
  if (report.verdict == Verdict::unsupported || report.table.empty()) throw PreconditionError("report carries no prediction");
  std::vector<double> p(report.table.size(), 0.0);
  double known = 0;
  std::size_t missing = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (report.table[i]) {
      p[i] = report.table[i]->get_d();
      known += p[i];
    } else {
      ++missing;
    }
  }
  if (missing)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!report.table[i]) p[i] = std::max(0.0, 1.0 - known) / static_cast<double>(missing);
  return p;
}

Comparison compare(const AnalysisReport& report, const CensusTable& table, double tolerance) {
  if (!(report.modulus_vector() == table.moduli)) throw PreconditionError("report and census use different moduli");
  Comparison cmp;
  cmp.tolerance = tolerance;
  if (table.total == 0) throw DomainError("empty census");
  const double total = static_cast<double>(table.total);
  if (report.verdict == Verdict::zero_or_nonexistent) {
    if (report.table.empty()) throw PreconditionError("report carries no prediction");
    bool exact = true;
    for (std::size_t i = 0; i < report.table.size(); ++i) {
      if (!report.table[i]) {
        cmp.oscillating.push_back(table.moduli.residue(i));
        continue;
      }
      const double f = static_cast<double>(table.counts[i]) / total;
      cmp.tv += f;
      cmp.max_cell_error = std::max(cmp.max_cell_error, f);
      exact = exact && table.counts[i] == 0;
    }
    cmp.pass = exact;
    return cmp;
  }
  const auto p = predicted_frequencies(report);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = std::abs(static_cast<double>(table.counts[i]) / total - p[i]);
    cmp.tv += e;
    cmp.max_cell_error = std::max(cmp.max_cell_error, e);
    if (!report.table[i]) cmp.oscillating.push_back(table.moduli.residue(i));
  }
  cmp.tv /= 2;
  cmp.pass = cmp.tv <= tolerance;
  return cmp;
}

std::vector<ConvergenceRow> convergence_table(const ShiftSpec& spec, const GAdditiveFamily& family,
                                              const AnalysisReport& report, int m_max, unsigned threads) {
  const auto table = census_horizon(spec, family, m_max, threads);
  const auto p = predicted_frequencies(report);
  std::vector<ConvergenceRow> rows;
  for (int m = 1; m <= m_max; ++m) {
    const auto counts = table.counts_below_power(m);
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    double tv = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
      tv += std::abs((total ? static_cast<double>(counts[i]) / static_cast<double>(total) : 0.0) - p[i]);
    rows.push_back({m, tv / 2});
  }
  return rows;
}

}  // namespace mdist
