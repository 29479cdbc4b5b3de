#pragma once

// Cutnode sets and their structural-equivalence closure.
//
// Cutnodes of one category are equated; equated nodes have their children
// under equal arc labels equated in turn (congruence), and every class that
// contains a cutnode is cut as a whole.

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "cutgram/andor_index.hpp"
#include "cutgram/grammar.hpp"
#include "cutgram/union_find.hpp"

namespace cutgram {

struct EquivalenceClass {
  std::vector<NodeId> members;  // ascending
  Category category;
  NodeId representative = kNoNode;  // smallest member

  friend bool operator==(const EquivalenceClass&, const EquivalenceClass&) = default;
};

class CutnodeSet {
 public:
  CutnodeSet() = default;

  /// The empty cutnode set over `aot`: every node is its own class.
  static CutnodeSet none(const AndOrTree& aot) {
    CutnodeSet set;
    set.rep_.resize(aot.size());
    set.cut_.assign(aot.size(), false);
    set.members_.resize(aot.size());
    for (NodeId i = 0; i < aot.size(); ++i) {
      set.rep_[i] = i;
      set.members_[i] = {i};
    }
    return set;
  }

  bool is_cut(NodeId id) const { return id < cut_.size() && cut_[id]; }

  /// Representative of the class containing `id` (cut or not).
  NodeId class_of(NodeId id) const { return id < rep_.size() ? rep_[id] : id; }

  /// Members of the class whose representative is `rep`.
  std::vector<NodeId> members(NodeId rep) const {
    if (rep < members_.size()) return members_[rep];
    return {rep};
  }

  const std::vector<EquivalenceClass>& cut_classes() const noexcept { return cut_classes_; }

  const EquivalenceClass* cut_class_of(NodeId id) const {
    if (!is_cut(id)) return nullptr;
    NodeId rep = class_of(id);
    for (const EquivalenceClass& c : cut_classes_) {
      if (c.representative == rep) return &c;
    }
    return nullptr;
  }

  std::vector<NodeId> cut_nodes() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < cut_.size(); ++i) {
      if (cut_[i]) out.push_back(i);
    }
    return out;
  }

  std::size_t cut_node_count() const {
    return static_cast<std::size_t>(std::count(cut_.begin(), cut_.end(), true));
  }

  bool empty() const noexcept { return cut_classes_.empty(); }

  std::size_t universe_size() const noexcept { return rep_.size(); }

  /// Same cut nodes; the partition of uncut nodes is a function of them.
  friend bool operator==(const CutnodeSet& a, const CutnodeSet& b) {
    return a.cut_nodes() == b.cut_nodes();
  }

 private:
  friend CutnodeSet closure(const std::vector<NodeId>&, const AndOrTree&);

  std::vector<NodeId> rep_;
  std::vector<bool> cut_;
  std::vector<std::vector<NodeId>> members_;
  std::vector<EquivalenceClass> cut_classes_;
};

/// Least set closed under category equating and downward congruence that
/// contains `seed`. Terminates because classes only merge.
inline CutnodeSet closure(const std::vector<NodeId>& seed, const AndOrTree& aot) {
  const std::size_t n = aot.size();
  UnionFind uf(n);
  // Per class root: one member holding each arc label seen in the class.
  std::vector<std::map<RuleId, NodeId>> arc_owner(n);
  for (NodeId i = 0; i < n; ++i) {
    for (const auto& [rule, arc] : aot.node(i).arcs) arc_owner[i].emplace(rule, i);
  }
  std::vector<bool> seeded(n, false);
  std::vector<std::pair<NodeId, NodeId>> pending;
  std::map<Category, NodeId> first_of_category;
  for (NodeId s : seed) {
    if (s >= n) throw Error(ErrorKind::InvalidArgument, "seed node out of range");
    seeded[s] = true;
    auto [it, inserted] = first_of_category.emplace(aot.node(s).category, s);
    if (!inserted) pending.emplace_back(it->second, s);
  }
  while (!pending.empty()) {
    auto [x, y] = pending.back();
    pending.pop_back();
    std::size_t rx = uf.find(x), ry = uf.find(y);
    if (rx == ry) continue;
    std::size_t survivor = uf.unite(rx, ry);
    std::size_t absorbed = survivor == rx ? ry : rx;
    auto& into = arc_owner[survivor];
    for (const auto& [rule, owner] : arc_owner[absorbed]) {
      auto [it, inserted] = into.emplace(rule, owner);
      if (inserted) continue;
      const AndNode& a = aot.node(it->second).arcs.at(rule);
      const AndNode& b = aot.node(owner).arcs.at(rule);
      for (std::size_t k = 0; k < a.children.size(); ++k) {
        pending.emplace_back(a.children[k], b.children[k]);
      }
    }
    arc_owner[absorbed].clear();
  }

  CutnodeSet out;
  out.rep_.resize(n);
  out.cut_.assign(n, false);
  out.members_.assign(n, {});
  std::vector<bool> class_cut(n, false);
  for (NodeId i = 0; i < n; ++i) {
    NodeId r = static_cast<NodeId>(uf.find(i));
    out.rep_[i] = r;
    out.members_[r].push_back(i);
    if (seeded[i]) class_cut[r] = true;
  }
  for (NodeId i = 0; i < n; ++i) {
    out.cut_[i] = class_cut[out.rep_[i]];
    if (out.rep_[i] == i && class_cut[i]) {
      out.cut_classes_.push_back(EquivalenceClass{out.members_[i], aot.node(i).category, i});
    }
  }
  return out;
}

/// Symmetric-difference size of the cut node sets.
inline std::size_t symmetric_difference_size(const CutnodeSet& a, const CutnodeSet& b) {
  std::vector<NodeId> x = a.cut_nodes(), y = b.cut_nodes(), diff;
  std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(diff));
  return diff.size();
}

}  // namespace cutgram
