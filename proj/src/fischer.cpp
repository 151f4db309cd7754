#include <algorithm>
#include <deque>
#include <map>

#include "mdist/errors.hpp"
#include "mdist/shift.hpp"

namespace mdist {

SubsetAutomaton determinize(const Cover& cover, const std::vector<std::vector<int>>& start_sets) {
  SubsetAutomaton dfa;
  dfa.base = cover.base();
  std::map<std::vector<int>, int> index;
  std::deque<int> queue;
  auto intern = [&](std::vector<int> subset) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    auto [it, fresh] = index.emplace(subset, dfa.size());
    if (fresh) {
      dfa.subsets.push_back(std::move(subset));
      dfa.next.emplace_back(static_cast<std::size_t>(dfa.base), -1);
      queue.push_back(it->second);
    }
    return it->second;
  };
  for (const auto& s : start_sets) dfa.starts.push_back(intern(s));
  std::vector<std::vector<int>> targets(static_cast<std::size_t>(dfa.base));
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (auto& t : targets) t.clear();
    for (int v : dfa.subsets[static_cast<std::size_t>(s)])
      for (int id : cover.out_edges(v)) {
        const auto& e = cover.edges()[static_cast<std::size_t>(id)];
        targets[static_cast<std::size_t>(e.label)].push_back(e.to);
      }
    for (int d = 0; d < dfa.base; ++d)
      if (!targets[static_cast<std::size_t>(d)].empty()) {
        int t = intern(targets[static_cast<std::size_t>(d)]);
        dfa.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] = t;
      }
  }
  return dfa;
}

std::vector<int> language_classes(const SubsetAutomaton& dfa) {
  const int n = dfa.size();
  std::vector<int> cls(static_cast<std::size_t>(n), 0);
  int count = n > 0 ? 1 : 0;
  while (true) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> fresh(static_cast<std::size_t>(n));
    std::vector<int> sig;
    for (int s = 0; s < n; ++s) {
      sig.assign(1, cls[static_cast<std::size_t>(s)]);
      for (int t : dfa.next[static_cast<std::size_t>(s)]) sig.push_back(t < 0 ? -1 : cls[static_cast<std::size_t>(t)]);
      auto [it, _] = ids.emplace(sig, static_cast<int>(ids.size()));
      fresh[static_cast<std::size_t>(s)] = it->second;
    }
    const int next_count = static_cast<int>(ids.size());
    cls = std::move(fresh);
    if (next_count == count) break;
    count = next_count;
  }
  return cls;
}

bool is_transitive(const Cover& c) { return is_strongly_connected(c.adjacency()); }

bool is_mixing(const Cover& c) {
  if (!is_transitive(c)) return false;
  std::vector<int> all(static_cast<std::size_t>(c.size()));
  for (int v = 0; v < c.size(); ++v) all[static_cast<std::size_t>(v)] = v;
  return cyclic_period(c.adjacency(), all) == 1;
}

std::optional<int> regularity_k(const Cover& c) {
  if (c.size() == 0) return std::nullopt;
  const auto k = c.out_edges(0).size();
  for (int v = 0; v < c.size(); ++v)
    if (c.out_edges(v).size() != k || c.in_edges(v).size() != k) return std::nullopt;
  if (k < 2) return std::nullopt;
  return static_cast<int>(k);
}

namespace {

std::vector<int> iota_nodes(int n) {
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
  return all;
}

PrefixTracker build_tracker(const Cover& graph) {
  std::vector<std::vector<int>> starts{iota_nodes(graph.size())};
  for (int v = 0; v < graph.size(); ++v) starts.push_back({v});
  PrefixTracker tr;
  tr.dfa = determinize(graph, starts);
  tr.start = tr.dfa.starts[0];
  auto cls = language_classes(tr.dfa);
  tr.node_of.assign(static_cast<std::size_t>(tr.dfa.size()), -1);
  for (int s = 0; s < tr.dfa.size(); ++s)
    for (int v = 0; v < graph.size(); ++v)
      if (cls[static_cast<std::size_t>(s)] == cls[static_cast<std::size_t>(tr.dfa.starts[static_cast<std::size_t>(v + 1)])]) {
        tr.node_of[static_cast<std::size_t>(s)] = v;
        break;
      }
  return tr;
}

// BFS from the tracker start to singleton subsets (words all of whose
// paths end at one node); fills the sync length and one witness per node.
void find_sync_words(FischerCover& fc) {
  const auto& dfa = fc.tracker.dfa;
  const int bound = 10 * fc.size() * fc.size() + 1;
  std::vector<int> depth(static_cast<std::size_t>(dfa.size()), -1), parent(static_cast<std::size_t>(dfa.size()), -1),
      via(static_cast<std::size_t>(dfa.size()), -1);
  std::deque<int> queue{fc.tracker.start};
  depth[static_cast<std::size_t>(fc.tracker.start)] = 0;
  fc.sync_words.assign(static_cast<std::size_t>(fc.size()), Word{});
  std::vector<char> found(static_cast<std::size_t>(fc.size()), 0);
  int remaining = fc.size();
  fc.sync_length = -1;
  while (!queue.empty() && remaining > 0) {
    int s = queue.front();
    queue.pop_front();
    const auto& subset = dfa.subsets[static_cast<std::size_t>(s)];
    int v = subset.size() == 1 ? subset.front() : -1;
    if (v >= 0 && !found[static_cast<std::size_t>(v)]) {
      if (fc.sync_length < 0) fc.sync_length = depth[static_cast<std::size_t>(s)];
      std::vector<int> digits;
      for (int x = s; parent[static_cast<std::size_t>(x)] >= 0; x = parent[static_cast<std::size_t>(x)]) digits.push_back(via[static_cast<std::size_t>(x)]);
      std::reverse(digits.begin(), digits.end());
      fc.sync_words[static_cast<std::size_t>(v)] = Word(fc.graph.base(), std::move(digits));
      found[static_cast<std::size_t>(v)] = 1;
      --remaining;
    }
    if (depth[static_cast<std::size_t>(s)] >= bound) continue;
    for (int d = 0; d < dfa.base; ++d) {
      int t = dfa.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
      if (t >= 0 && depth[static_cast<std::size_t>(t)] < 0) {
        depth[static_cast<std::size_t>(t)] = depth[static_cast<std::size_t>(s)] + 1;
        parent[static_cast<std::size_t>(t)] = s;
        via[static_cast<std::size_t>(t)] = d;
        queue.push_back(t);
      }
    }
  }
  if (fc.sync_length < 0) throw DomainError("no synchronizing word within the search bound 10*|V|^2");
  if (remaining > 0) throw std::logic_error("presentation node without a synchronizing witness");
}

void find_distinguishing_words(FischerCover& fc) {
  const auto& g = fc.graph;
  const int base = g.base();
  for (int u = 0; u < g.size(); ++u)
    for (int v = u + 1; v < g.size(); ++v) {
      std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> parent;
      std::deque<std::pair<int, int>> queue{{u, v}};
      parent[{u, v}] = {{-1, -1}, -1};
      std::optional<std::vector<int>> word;
      while (!queue.empty() && !word) {
        auto cur = queue.front();
        queue.pop_front();
        for (int d = 0; d < base && !word; ++d) {
          int x = g.follow(cur.first, d), y = g.follow(cur.second, d);
          if ((x < 0) == (y < 0)) {
            if (x >= 0 && !parent.count({x, y})) {
              parent[{x, y}] = {cur, d};
              queue.push_back({x, y});
            }
            continue;
          }
          std::vector<int> digits{d};
          for (auto p = cur; parent[p].second >= 0; p = parent[p].first) digits.push_back(parent[p].second);
          std::reverse(digits.begin(), digits.end());
          word = std::move(digits);
        }
      }
      if (word) fc.distinguishing[{u, v}] = Word(base, std::move(*word));
    }
}

std::string subset_name(const Cover& c, const std::vector<int>& subset) {
  if (subset.size() == 1) return c.names()[static_cast<std::size_t>(subset[0])];
  std::string name = "{";
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (j) name += ",";
    name += c.names()[static_cast<std::size_t>(subset[j])];
  }
  return name + "}";
}

}  // namespace

FischerCover fischer_cover(const Cover& input) {
  const Cover cover = input.trimmed();
  const int base = cover.base();
  const auto det = determinize(cover, {iota_nodes(cover.size())});
  const auto cls = language_classes(det);
  const int q = *std::max_element(cls.begin(), cls.end()) + 1;

  std::vector<std::vector<int>> qnext(static_cast<std::size_t>(q), std::vector<int>(static_cast<std::size_t>(base), -1));
  std::vector<int> representative(static_cast<std::size_t>(q), -1);
  for (int s = 0; s < det.size(); ++s) {
    auto c = static_cast<std::size_t>(cls[static_cast<std::size_t>(s)]);
    if (representative[c] < 0) representative[c] = s;
    for (int d = 0; d < base; ++d) {
      int t = det.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
      if (t >= 0) qnext[c][static_cast<std::size_t>(d)] = cls[static_cast<std::size_t>(t)];
    }
  }
  Adjacency qadj(static_cast<std::size_t>(q));
  for (int c = 0; c < q; ++c)
    for (int t : qnext[static_cast<std::size_t>(c)])
      if (t >= 0) qadj[static_cast<std::size_t>(c)].push_back(t);
  auto comps = strongly_connected_components(qadj);
  std::vector<int> comp_of(static_cast<std::size_t>(q));
  for (std::size_t j = 0; j < comps.size(); ++j)
    for (int c : comps[j]) comp_of[static_cast<std::size_t>(c)] = static_cast<int>(j);
  std::vector<std::size_t> terminal;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    bool closed = true;
    for (int c : comps[j])
      for (int t : qadj[static_cast<std::size_t>(c)]) closed = closed && comp_of[static_cast<std::size_t>(t)] == static_cast<int>(j);
    if (closed) terminal.push_back(j);
  }
  auto not_transitive = [&] {
    return NotTransitiveError("presentation is not transitive", strongly_connected_components(cover.adjacency()));
  };
  if (terminal.size() != 1) throw not_transitive();

  const auto& comp = comps[terminal[0]];
  std::vector<int> node_of_class(static_cast<std::size_t>(q), -1);
  std::vector<std::string> names;
  for (int c : comp) {
    node_of_class[static_cast<std::size_t>(c)] = static_cast<int>(names.size());
    names.push_back(subset_name(cover, det.subsets[static_cast<std::size_t>(representative[static_cast<std::size_t>(c)])]));
  }
  std::vector<Edge> edges;
  for (int c : comp)
    for (int d = 0; d < base; ++d) {
      int t = qnext[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
      if (t >= 0) edges.push_back({node_of_class[static_cast<std::size_t>(c)], node_of_class[static_cast<std::size_t>(t)], d});
    }
  FischerCover fc;
  fc.graph = Cover(base, std::move(names), std::move(edges));

  // The terminal component presents the whole language only when the shift
  // is transitive.
  {
    std::vector<std::string> names2 = cover.names();
    std::vector<Edge> edges2 = cover.edges();
    const int offset = cover.size();
    for (const auto& n : fc.graph.names()) names2.push_back("#" + n);
    for (const auto& e : fc.graph.edges()) edges2.push_back({e.from + offset, e.to + offset, e.label});
    Cover both(base, std::move(names2), std::move(edges2));
    std::vector<int> fischer_nodes;
    for (int v = 0; v < fc.graph.size(); ++v) fischer_nodes.push_back(v + offset);
    auto joint = determinize(both, {iota_nodes(cover.size()), fischer_nodes});
    auto jcls = language_classes(joint);
    if (jcls[static_cast<std::size_t>(joint.starts[0])] != jcls[static_cast<std::size_t>(joint.starts[1])]) throw not_transitive();
  }

  fc.k = regularity_k(fc.graph);
  fc.tracker = build_tracker(fc.graph);
  find_sync_words(fc);
  find_distinguishing_words(fc);
  return fc;
}

FischerCover sft_shortcut_cover(const ShiftSpec& spec) {
  if (spec.kind != ShiftSpec::Kind::sft1) throw PreconditionError("digit-graph cover needs an sft1 spec");
  FischerCover fc;
  fc.graph = build_cover(spec);
  if (!is_transitive(fc.graph)) throw NotTransitiveError("sft1 digit graph is not irreducible", strongly_connected_components(fc.graph.adjacency()));
  fc.sft_shortcut = true;
  fc.k = regularity_k(fc.graph);
  const int n = fc.graph.size(), base = fc.graph.base();
  auto& dfa = fc.tracker.dfa;
  dfa.base = base;
  dfa.subsets.push_back(iota_nodes(n));
  dfa.next.emplace_back(static_cast<std::size_t>(base), -1);
  for (int v = 0; v < n; ++v) {
    dfa.subsets.push_back({v});
    dfa.next.emplace_back(static_cast<std::size_t>(base), -1);
  }
  for (int v = 0; v < n; ++v) {
    int d = std::stoi(fc.graph.names()[static_cast<std::size_t>(v)]);
    dfa.next[0][static_cast<std::size_t>(d)] = v + 1;
    for (int id : fc.graph.out_edges(v)) {
      const auto& e = fc.graph.edges()[static_cast<std::size_t>(id)];
      dfa.next[static_cast<std::size_t>(v + 1)][static_cast<std::size_t>(e.label)] = e.to + 1;
    }
  }
  dfa.starts = {0};
  fc.tracker.start = 0;
  fc.tracker.node_of.assign(static_cast<std::size_t>(n + 1), -1);
  for (int v = 0; v < n; ++v) fc.tracker.node_of[static_cast<std::size_t>(v + 1)] = v;
  fc.sync_length = 1;
  for (int v = 0; v < n; ++v) fc.sync_words.push_back(Word(base, {std::stoi(fc.graph.names()[static_cast<std::size_t>(v)])}));
  find_distinguishing_words(fc);
  return fc;
}

FollowerClass follower_class(const FischerCover& fc, const Word& w) {
  int s = fc.tracker.start;
  for (int d : w.digits) {
    if (d < 0 || d >= fc.tracker.dfa.base) throw DomainError("digit outside the base");
    s = fc.tracker.dfa.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
    if (s < 0) throw DomainError("word " + w.str() + " is not in the language");
  }
  FollowerClass fcl;
  fcl.subset = fc.tracker.dfa.subsets[static_cast<std::size_t>(s)];
  if (int v = fc.tracker.node_of[static_cast<std::size_t>(s)]; v >= 0) fcl.node = v;
  return fcl;
}

int shortest_synchronizing_length(const FischerCover& fc) { return fc.sync_length; }

BigInt language_count(const Cover& cover, std::size_t n) {
  const Cover t = cover.trimmed();
  const auto det = determinize(t, {iota_nodes(t.size())});
  std::vector<BigInt> counts(static_cast<std::size_t>(det.size()), 0), fresh;
  counts[static_cast<std::size_t>(det.starts[0])] = 1;
  for (std::size_t step = 0; step < n; ++step) {
    fresh.assign(counts.size(), 0);
    for (int s = 0; s < det.size(); ++s) {
      if (counts[static_cast<std::size_t>(s)] == 0) continue;
      for (int nxt : det.next[static_cast<std::size_t>(s)])
        if (nxt >= 0) fresh[static_cast<std::size_t>(nxt)] += counts[static_cast<std::size_t>(s)];
    }
    counts.swap(fresh);
  }
  BigInt total = 0;
  for (const auto& c : counts) total += c;
  return total;
}

void visit_words(const Cover& cover, std::size_t n, const std::function<void(const Word&)>& fn) {
  const Cover t = cover.trimmed();
  const auto det = determinize(t, {iota_nodes(t.size())});
  Word w;
  w.base = t.base();
  w.digits.reserve(n);
  std::function<void(int)> rec = [&](int s) {
    if (w.size() == n) {
      fn(w);
      return;
    }
    for (int d = 0; d < det.base; ++d) {
      int nxt = det.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
      if (nxt < 0) continue;
      w.digits.push_back(d);
      rec(nxt);
      w.digits.pop_back();
    }
  };
  rec(det.starts[0]);
}

std::vector<Word> enumerate_words(const Cover& cover, std::size_t n) {
  std::vector<Word> out;
  visit_words(cover, n, [&](const Word& w) { out.push_back(w); });
  return out;
}

namespace {

void require_sync(const FischerCover& fc, int ell, int i) {
  if (ell < 0 || i < ell) throw PreconditionError("restricted language needs 0 <= ell <= i");
  if (ell < fc.sync_length)
    throw PreconditionError("no synchronizing word of length " + std::to_string(ell) + "; shortest is " +
                            std::to_string(fc.sync_length));
}

}  // namespace

BigInt restricted_count(const FischerCover& fc, int ell, int i) {
  require_sync(fc, ell, i);
  const auto& dfa = fc.tracker.dfa;
  std::vector<BigInt> counts(static_cast<std::size_t>(dfa.size()), 0), fresh;
  counts[static_cast<std::size_t>(fc.tracker.start)] = 1;
  for (int step = 0; step < ell; ++step) {
    fresh.assign(counts.size(), 0);
    for (int s = 0; s < dfa.size(); ++s) {
      if (counts[static_cast<std::size_t>(s)] == 0) continue;
      for (int nxt : dfa.next[static_cast<std::size_t>(s)])
        if (nxt >= 0) fresh[static_cast<std::size_t>(nxt)] += counts[static_cast<std::size_t>(s)];
    }
    counts.swap(fresh);
  }
  std::vector<BigInt> nodes(static_cast<std::size_t>(fc.size()), 0);
  for (int s = 0; s < dfa.size(); ++s)
    if (int v = fc.tracker.node_of[static_cast<std::size_t>(s)]; v >= 0) nodes[static_cast<std::size_t>(v)] += counts[static_cast<std::size_t>(s)];
  for (int step = ell; step < i; ++step) {
    std::vector<BigInt> next(nodes.size(), 0);
    for (const auto& e : fc.graph.edges()) next[static_cast<std::size_t>(e.to)] += nodes[static_cast<std::size_t>(e.from)];
    nodes.swap(next);
  }
  BigInt total = 0;
  for (const auto& c : nodes) total += c;
  return total;
}

std::vector<Word> restricted_enumerate(const FischerCover& fc, int ell, int i) {
  require_sync(fc, ell, i);
  std::vector<Word> out;
  Word w;
  w.base = fc.graph.base();
  const auto& dfa = fc.tracker.dfa;
  std::function<void(int)> on_graph = [&](int v) {
    if (static_cast<int>(w.size()) == i) {
      out.push_back(w);
      return;
    }
    for (int id : fc.graph.out_edges(v)) {
      const auto& e = fc.graph.edges()[static_cast<std::size_t>(id)];
      w.digits.push_back(e.label);
      on_graph(e.to);
      w.digits.pop_back();
    }
  };
  std::function<void(int)> on_prefix = [&](int s) {
    if (static_cast<int>(w.size()) == ell) {
      if (int v = fc.tracker.node_of[static_cast<std::size_t>(s)]; v >= 0) on_graph(v);
      return;
    }
    for (int d = 0; d < dfa.base; ++d) {
      int nxt = dfa.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
      if (nxt < 0) continue;
      w.digits.push_back(d);
      on_prefix(nxt);
      w.digits.pop_back();
    }
  };
  on_prefix(fc.tracker.start);
  return out;
}

}  // namespace mdist
