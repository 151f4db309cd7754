#include <algorithm>
#include <set>

#include "mdist/errors.hpp"
#include "mdist/shift.hpp"

namespace mdist {

ShiftSpec ShiftSpec::full(int base, std::vector<int> digits) {
  ShiftSpec s;
  s.base = base;
  s.kind = Kind::full;
  s.digits = std::move(digits);
  std::sort(s.digits.begin(), s.digits.end());
  s.validate();
  return s;
}

ShiftSpec ShiftSpec::sft1(int base, std::vector<int> digits, std::vector<std::pair<int, int>> allowed) {
  ShiftSpec s;
  s.base = base;
  s.kind = Kind::sft1;
  s.digits = std::move(digits);
  std::sort(s.digits.begin(), s.digits.end());
  s.allowed = std::move(allowed);
  s.validate();
  return s;
}

ShiftSpec ShiftSpec::sofic(int base, std::vector<std::string> nodes, std::vector<SpecEdge> edges) {
  ShiftSpec s;
  s.base = base;
  s.kind = Kind::sofic;
  s.nodes = std::move(nodes);
  s.edges = std::move(edges);
  s.validate();
  return s;
}

ShiftSpec ShiftSpec::sgap(int base, std::vector<int> gaps) {
  ShiftSpec s;
  s.base = base;
  s.kind = Kind::sgap;
  s.gaps = std::move(gaps);
  s.validate();
  return s;
}

ShiftSpec ShiftSpec::union_of(int base, std::vector<ShiftSpec> parts) {
  ShiftSpec s;
  s.base = base;
  s.kind = Kind::union_of;
  s.parts = std::move(parts);
  s.validate();
  return s;
}

bool ShiftSpec::is_missing_digits() const {
  return kind == Kind::full && static_cast<int>(digits.size()) < base;
}

bool ShiftSpec::is_all_digits() const {
  return kind == Kind::full && static_cast<int>(digits.size()) == base;
}

namespace {

void check_digit(int d, int base) {
  if (d < 0 || d >= base) throw SpecError("digit " + std::to_string(d) + " outside [0, " + std::to_string(base) + ")");
}

void check_distinct_digits(const std::vector<int>& digits, int base) {
  if (digits.empty()) throw SpecError("digit set is empty");
  std::set<int> seen;
  for (int d : digits) {
    check_digit(d, base);
    if (!seen.insert(d).second) throw SpecError("repeated digit " + std::to_string(d));
  }
}

}  // namespace

void ShiftSpec::validate() const {
  if (base < 2) throw SpecError("base must be at least 2");
  switch (kind) {
    case Kind::full:
      check_distinct_digits(digits, base);
      break;
    case Kind::sft1: {
      check_distinct_digits(digits, base);
      std::set<int> ds(digits.begin(), digits.end());
      for (auto [d, e] : allowed)
        if (!ds.count(d) || !ds.count(e)) throw SpecError("allowed pair uses a digit outside the digit set");
      break;
    }
    case Kind::sofic: {
      if (nodes.empty()) throw SpecError("sofic spec without nodes");
      std::set<std::string> names;
      for (const auto& n : nodes)
        if (!names.insert(n).second) throw SpecError("repeated node name " + n);
      for (const auto& e : edges) {
        if (!names.count(e.from) || !names.count(e.to)) throw SpecError("edge refers to an unknown node");
        check_digit(e.label, base);
      }
      break;
    }
    case Kind::sgap: {
      if (base < 2) throw SpecError("sgap needs labels 0 and 1");
      if (gaps.empty()) throw SpecError("sgap needs a nonempty finite gap set");
      std::set<int> seen;
      for (int s : gaps) {
        if (s < 0) throw SpecError("gaps must be nonnegative");
        if (!seen.insert(s).second) throw SpecError("repeated gap");
      }
      break;
    }
    case Kind::union_of:
      if (parts.empty()) throw SpecError("union without parts");
      for (const auto& p : parts) {
        if (p.base != base) throw SpecError("union parts must share the base");
        p.validate();
      }
      break;
  }
}

std::string kind_name(ShiftSpec::Kind kind) {
  switch (kind) {
    case ShiftSpec::Kind::full: return "full";
    case ShiftSpec::Kind::sft1: return "sft1";
    case ShiftSpec::Kind::sofic: return "sofic";
    case ShiftSpec::Kind::sgap: return "sgap";
    case ShiftSpec::Kind::union_of: return "union";
  }
  return "?";
}

Cover::Cover(int base, std::vector<std::string> names, std::vector<Edge> edges)
    : base_(base), names_(std::move(names)), edges_(std::move(edges)) {
  const int n = size();
  out_.assign(static_cast<std::size_t>(n), {});
  in_.assign(static_cast<std::size_t>(n), {});
  for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
    const auto& e = edges_[static_cast<std::size_t>(id)];
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) throw SpecError("edge endpoint out of range");
    if (e.label < 0 || e.label >= base_) throw SpecError("edge label outside the base");
    out_[static_cast<std::size_t>(e.from)].push_back(id);
    in_[static_cast<std::size_t>(e.to)].push_back(id);
  }
  auto by_label = [this](int x, int y) {
    const auto &ex = edges_[static_cast<std::size_t>(x)], &ey = edges_[static_cast<std::size_t>(y)];
    return std::tie(ex.label, ex.to, x) < std::tie(ey.label, ey.to, y);
  };
  for (auto& list : out_) std::sort(list.begin(), list.end(), by_label);
  for (auto& list : in_) std::sort(list.begin(), list.end());
}

int Cover::find_node(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

Adjacency Cover::adjacency() const {
  Adjacency adj(static_cast<std::size_t>(size()));
  for (const auto& e : edges_) adj[static_cast<std::size_t>(e.from)].push_back(e.to);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

Cover Cover::induced(const std::vector<int>& nodes) const {
  std::vector<int> remap(static_cast<std::size_t>(size()), -1);
  std::vector<std::string> names;
  for (int v : nodes) {
    remap[static_cast<std::size_t>(v)] = static_cast<int>(names.size());
    names.push_back(names_[static_cast<std::size_t>(v)]);
  }
  std::vector<Edge> edges;
  for (const auto& e : edges_) {
    int s = remap[static_cast<std::size_t>(e.from)], t = remap[static_cast<std::size_t>(e.to)];
    if (s >= 0 && t >= 0) edges.push_back({s, t, e.label});
  }
  return Cover(base_, std::move(names), std::move(edges));
}

Cover Cover::trimmed() const {
  std::vector<char> alive(static_cast<std::size_t>(size()), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> indeg(static_cast<std::size_t>(size()), 0), outdeg(static_cast<std::size_t>(size()), 0);
    for (const auto& e : edges_)
      if (alive[static_cast<std::size_t>(e.from)] && alive[static_cast<std::size_t>(e.to)]) {
        ++outdeg[static_cast<std::size_t>(e.from)];
        ++indeg[static_cast<std::size_t>(e.to)];
      }
    for (int v = 0; v < size(); ++v)
      if (alive[static_cast<std::size_t>(v)] && (indeg[static_cast<std::size_t>(v)] == 0 || outdeg[static_cast<std::size_t>(v)] == 0)) {
        alive[static_cast<std::size_t>(v)] = 0;
        changed = true;
      }
  }
  std::vector<int> keep;
  for (int v = 0; v < size(); ++v)
    if (alive[static_cast<std::size_t>(v)]) keep.push_back(v);
  if (keep.empty()) throw EmptyShiftError();
  return keep.size() == static_cast<std::size_t>(size()) ? *this : induced(keep);
}

Cover Cover::reversed() const {
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (const auto& e : edges_) edges.push_back({e.to, e.from, e.label});
  return Cover(base_, names_, std::move(edges));
}

bool Cover::is_essential() const {
  for (int v = 0; v < size(); ++v)
    if (out_edges(v).empty() || in_edges(v).empty()) return false;
  return size() > 0;
}

bool Cover::is_right_resolving() const {
  for (int v = 0; v < size(); ++v) {
    const auto& out = out_edges(v);
    for (std::size_t j = 1; j < out.size(); ++j)
      if (edges_[static_cast<std::size_t>(out[j])].label == edges_[static_cast<std::size_t>(out[j - 1])].label) return false;
  }
  return true;
}

int Cover::follow(int v, int label) const {
  for (int id : out_edges(v))
    if (edges_[static_cast<std::size_t>(id)].label == label) return edges_[static_cast<std::size_t>(id)].to;
  return -1;
}

namespace {

Cover build_untrimmed(const ShiftSpec& spec) {
  using Kind = ShiftSpec::Kind;
  switch (spec.kind) {
    case Kind::full: {
      std::vector<Edge> edges;
      for (int d : spec.digits) edges.push_back({0, 0, d});
      return Cover(spec.base, {"q"}, std::move(edges));
    }
    case Kind::sft1: {
      std::vector<std::string> names;
      for (int d : spec.digits) names.push_back(std::to_string(d));
      auto pos = [&](int d) {
        return static_cast<int>(std::find(spec.digits.begin(), spec.digits.end(), d) - spec.digits.begin());
      };
      std::set<std::pair<int, int>> allowed(spec.allowed.begin(), spec.allowed.end());
      std::vector<Edge> edges;
      for (auto [d, e] : allowed) edges.push_back({pos(d), pos(e), e});
      return Cover(spec.base, std::move(names), std::move(edges));
    }
    case Kind::sofic: {
      auto index = [&](const std::string& n) {
        return static_cast<int>(std::find(spec.nodes.begin(), spec.nodes.end(), n) - spec.nodes.begin());
      };
      std::vector<Edge> edges;
      for (const auto& e : spec.edges) edges.push_back({index(e.from), index(e.to), e.label});
      return Cover(spec.base, spec.nodes, std::move(edges));
    }
    case Kind::sgap: {
      std::vector<std::string> names{"hub"};
      std::vector<Edge> edges;
      auto gaps = spec.gaps;
      std::sort(gaps.begin(), gaps.end());
      for (int s : gaps) {
        if (s == 0) {
          edges.push_back({0, 0, 1});
          continue;
        }
        int prev = 0;
        for (int j = 1; j <= s; ++j) {
          int node = static_cast<int>(names.size());
          names.push_back("g" + std::to_string(s) + "." + std::to_string(j));
          edges.push_back({prev, node, 0});
          prev = node;
        }
        edges.push_back({prev, 0, 1});
      }
      return Cover(spec.base, std::move(names), std::move(edges));
    }
    case Kind::union_of: {
      std::vector<std::string> names;
      std::vector<Edge> edges;
      for (std::size_t j = 0; j < spec.parts.size(); ++j) {
        Cover part = build_cover(spec.parts[j]);
        int offset = static_cast<int>(names.size());
        for (const auto& n : part.names()) names.push_back("p" + std::to_string(j) + "." + n);
        for (const auto& e : part.edges()) edges.push_back({e.from + offset, e.to + offset, e.label});
      }
      return Cover(spec.base, std::move(names), std::move(edges));
    }
  }
  throw SpecError("unknown shift kind");
}

}  // namespace

Cover build_cover(const ShiftSpec& spec) {
  spec.validate();
  return build_untrimmed(spec).trimmed();
}

}  // namespace mdist
