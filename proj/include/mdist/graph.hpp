#pragma once

#include <vector>

namespace mdist {

using Adjacency = std::vector<std::vector<int>>;

// Components are sorted internally and listed by smallest member.
std::vector<std::vector<int>> strongly_connected_components(const Adjacency& adj);

// gcd of cycle lengths inside a strongly connected component, 0 when the
// component carries no cycle at all.
int cyclic_period(const Adjacency& adj, const std::vector<int>& component);

// Cyclic classes of a strongly connected component with the given period:
// class c holds the states at BFS level c mod period from the first member.
std::vector<std::vector<int>> cyclic_classes(const Adjacency& adj, const std::vector<int>& component, int period);

std::vector<int> forward_closure(const Adjacency& adj, const std::vector<int>& seeds);

bool is_strongly_connected(const Adjacency& adj);

}  // namespace mdist
