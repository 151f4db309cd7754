#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdist/graph.hpp"
#include "mdist/numeral.hpp"

namespace mdist {

struct ShiftSpec {
  enum class Kind { full, sft1, sofic, sgap, union_of };

  struct SpecEdge {
    std::string from;
    std::string to;
    int label;
  };

  int base = 10;
  Kind kind = Kind::full;
  std::vector<int> digits;                     // full, sft1
  std::vector<std::pair<int, int>> allowed;    // sft1
  std::vector<std::string> nodes;              // sofic
  std::vector<SpecEdge> edges;                 // sofic
  std::vector<int> gaps;                       // sgap
  std::vector<ShiftSpec> parts;                // union

  static ShiftSpec full(int base, std::vector<int> digits);
  static ShiftSpec sft1(int base, std::vector<int> digits, std::vector<std::pair<int, int>> allowed);
  static ShiftSpec sofic(int base, std::vector<std::string> nodes, std::vector<SpecEdge> edges);
  static ShiftSpec sgap(int base, std::vector<int> gaps);
  static ShiftSpec union_of(int base, std::vector<ShiftSpec> parts);

  // A full shift over a proper subset of the digits.
  bool is_missing_digits() const;
  bool is_all_digits() const;
  // Throws SpecError on invalid payloads.
  void validate() const;
};

std::string kind_name(ShiftSpec::Kind kind);

struct Edge {
  int from;
  int to;
  int label;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Labelled multigraph presentation.
class Cover {
 public:
  Cover() = default;
  Cover(int base, std::vector<std::string> names, std::vector<Edge> edges);

  int base() const { return base_; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Edge ids leaving v, sorted by (label, target).
  const std::vector<int>& out_edges(int v) const { return out_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& in_edges(int v) const { return in_[static_cast<std::size_t>(v)]; }
  int find_node(const std::string& name) const;

  Adjacency adjacency() const;
  // Essential part: iteratively drop nodes without in- or out-edges.
  Cover trimmed() const;
  Cover reversed() const;
  Cover induced(const std::vector<int>& nodes) const;
  bool is_essential() const;
  bool is_right_resolving() const;
  // Successor of v along label, or -1; meaningful for right-resolving covers.
  int follow(int v, int label) const;

 private:
  int base_ = 10;
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_, in_;
};

Cover build_cover(const ShiftSpec& spec);

// Deterministic automaton whose states are node subsets of a cover. Every
// state accepts (languages are factorial); next[s][d] = -1 when undefined.
struct SubsetAutomaton {
  int base = 10;
  std::vector<std::vector<int>> next;
  std::vector<std::vector<int>> subsets;
  std::vector<int> starts;
  int size() const { return static_cast<int>(next.size()); }
};

// States reachable from the given start subsets, in BFS order.
SubsetAutomaton determinize(const Cover& cover, const std::vector<std::vector<int>>& start_sets);

// Moore partition refinement: equal ids iff equal accepted languages.
// Ids are numbered by first appearance in state order.
std::vector<int> language_classes(const SubsetAutomaton& dfa);

// Follower-class tracker: deterministic automaton over prefixes whose
// states map to a presentation node when their follower set is that node's.
struct PrefixTracker {
  SubsetAutomaton dfa;
  int start = 0;
  std::vector<int> node_of;  // -1: follower set outside the node set
};

// Right-resolving irreducible presentation used by the chain machinery.
// Normally the Fischer cover; for 1-step SFTs optionally the digit graph.
struct FischerCover {
  Cover graph;
  std::optional<int> k;  // regularity, k >= 2
  PrefixTracker tracker;
  int sync_length = 0;
  std::vector<Word> sync_words;                        // per node
  std::map<std::pair<int, int>, Word> distinguishing;  // u < v
  bool sft_shortcut = false;

  int size() const { return graph.size(); }
};

FischerCover fischer_cover(const Cover& cover);
// Node per digit of an sft1 spec with tracker "first digit d lands in d".
FischerCover sft_shortcut_cover(const ShiftSpec& spec);

bool is_transitive(const Cover& c);
bool is_mixing(const Cover& c);
// k when every node has in-degree = out-degree = k >= 2.
std::optional<int> regularity_k(const Cover& c);

struct FollowerClass {
  std::optional<int> node;
  std::vector<int> subset;  // nodes terminal for paths labelled by the word
};

FollowerClass follower_class(const FischerCover& fc, const Word& w);
int shortest_synchronizing_length(const FischerCover& fc);

BigInt language_count(const Cover& cover, std::size_t n);
// Lexicographic (index 0 first), each word once.
std::vector<Word> enumerate_words(const Cover& cover, std::size_t n);
void visit_words(const Cover& cover, std::size_t n, const std::function<void(const Word&)>& fn);

BigInt restricted_count(const FischerCover& fc, int ell, int i);
std::vector<Word> restricted_enumerate(const FischerCover& fc, int ell, int i);

}  // namespace mdist
