#include "mdist/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace mdist {

std::vector<std::vector<int>> strongly_connected_components(const Adjacency& adj) {
  // Iterative Tarjan.
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<int>> comps;
  int counter = 0;
  struct Frame {
    int v;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> calls{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!calls.empty()) {
      auto& fr = calls.back();
      if (fr.next < adj[fr.v].size()) {
        int w = adj[fr.v][fr.next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          calls.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
        continue;
      }
      int v = fr.v;
      calls.pop_back();
      if (!calls.empty()) low[calls.back().v] = std::min(low[calls.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  std::sort(comps.begin(), comps.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return comps;
}

namespace {

std::vector<int> bfs_levels(const Adjacency& adj, const std::vector<int>& component, std::vector<char>& member) {
  std::vector<int> level(adj.size(), -1);
  for (int v : component) member[v] = 1;
  std::deque<int> queue{component.front()};
  level[component.front()] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int w : adj[v])
      if (member[w] && level[w] == -1) {
        level[w] = level[v] + 1;
        queue.push_back(w);
      }
  }
  return level;
}

}  // namespace

int cyclic_period(const Adjacency& adj, const std::vector<int>& component) {
  if (component.empty()) return 0;
  std::vector<char> member(adj.size(), 0);
  auto level = bfs_levels(adj, component, member);
  int g = 0;
  for (int v : component)
    for (int w : adj[v])
      if (member[w]) g = std::gcd(g, std::abs(level[v] + 1 - level[w]));
  return g;
}

std::vector<std::vector<int>> cyclic_classes(const Adjacency& adj, const std::vector<int>& component, int period) {
  if (period <= 0) return {component};
  std::vector<char> member(adj.size(), 0);
  auto level = bfs_levels(adj, component, member);
  std::vector<std::vector<int>> classes(static_cast<std::size_t>(period));
  for (int v : component) classes[static_cast<std::size_t>(level[v] % period)].push_back(v);
  return classes;
}

std::vector<int> forward_closure(const Adjacency& adj, const std::vector<int>& seeds) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> todo;
  for (int s : seeds)
    if (!seen[s]) {
      seen[s] = 1;
      todo.push_back(s);
    }
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        todo.push_back(w);
      }
  }
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

bool is_strongly_connected(const Adjacency& adj) {
  return !adj.empty() && strongly_connected_components(adj).size() == 1;
}

}  // namespace mdist
