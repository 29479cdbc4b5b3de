#pragma once

// And-or tree index of a training treebank.
//
// Or-nodes choose a rule (an arc); each arc leads to an and-node holding one
// or-node per RHS slot. `lex` arcs lead to and-nodes without children.
// Node ids follow a DFS that visits arcs in rule-id order and slots left to
// right, so they do not depend on the order of the training trees. Phrasal
// or-nodes are numbered first, lex-only slot nodes after them.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cutgram/error.hpp"
#include "cutgram/grammar.hpp"

namespace cutgram {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct AndNode {
  RuleId rule;
  long count = 0;
  std::vector<NodeId> children;
};

struct OrNode {
  NodeId id = kNoNode;
  Category category;
  std::map<RuleId, AndNode> arcs;
  long visit_count = 0;
  bool has_lexical_yield = false;
  NodeId parent = kNoNode;
  RuleId parent_rule;
  std::size_t parent_position = 0;  // 1-based slot under parent_rule

  bool is_root() const noexcept { return parent == kNoNode; }

  long arc_count(const RuleId& rule) const {
    auto it = arcs.find(rule);
    return it == arcs.end() ? 0 : it->second.count;
  }
};

class AndOrTree {
 public:
  NodeId root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const OrNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<OrNode>& nodes() const noexcept { return nodes_; }

  /// Or-node at slot `position` (1-based) below arc `rule` of `id`.
  std::optional<NodeId> child(NodeId id, const RuleId& rule, std::size_t position) const {
    const OrNode& n = nodes_.at(id);
    auto it = n.arcs.find(rule);
    if (it == n.arcs.end() || position == 0 || position > it->second.children.size()) {
      return std::nullopt;
    }
    return it->second.children[position - 1];
  }

  std::string label(NodeId id) const { return "n" + std::to_string(id); }

 private:
  friend AndOrTree index_treebank(const std::vector<ParseTree>&, const RuleInventory&);
  std::vector<OrNode> nodes_;
};

namespace detail {

struct BuildNode {
  Category category;
  struct Arc {
    long count = 0;
    std::vector<std::size_t> children;
  };
  std::map<RuleId, Arc> arcs;
  long visits = 0;
  bool lexical = false;
};

inline std::size_t insert_tree(std::vector<BuildNode>& pool, std::size_t at,
                               const ParseTree& tree, const RuleInventory& inv) {
  pool[at].visits += 1;
  auto found = pool[at].arcs.find(tree.rule);
  if (found == pool[at].arcs.end()) {
    BuildNode::Arc arc;
    if (!tree.is_lexical()) {
      for (const Category& cat : inv.at(tree.rule).rhs) {
        arc.children.push_back(pool.size());
        pool.push_back(BuildNode{cat, {}, 0, false});
      }
    }
    found = pool[at].arcs.emplace(tree.rule, std::move(arc)).first;
  }
  found->second.count += 1;
  std::vector<std::size_t> children = found->second.children;
  std::size_t yield = tree.is_lexical() ? 1 : 0;
  for (std::size_t k = 0; k < tree.children.size(); ++k) {
    yield += insert_tree(pool, children[k], tree.children[k], inv);
  }
  if (yield > 0) pool[at].lexical = true;
  return yield;
}

}  // namespace detail

inline AndOrTree index_treebank(const std::vector<ParseTree>& training, const RuleInventory& inv) {
  std::vector<detail::BuildNode> pool;
  pool.push_back(detail::BuildNode{inv.top(), {}, 0, false});
  for (const ParseTree& tree : training) detail::insert_tree(pool, 0, tree, inv);

  AndOrTree aot;
  // DFS order; each pool node is reached exactly once.
  struct Frame {
    std::size_t pool_index;
    std::size_t parent;  // pool index
    RuleId parent_rule;
    std::size_t position;
  };
  std::vector<Frame> order;
  std::vector<Frame> stack{{0, pool.size(), RuleId{}, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    order.push_back(f);
    std::vector<Frame> pending;
    for (const auto& [rule, arc] : pool[f.pool_index].arcs) {
      for (std::size_t k = 0; k < arc.children.size(); ++k) {
        pending.push_back(Frame{arc.children[k], f.pool_index, rule, k + 1});
      }
    }
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) stack.push_back(*it);
  }
  // Phrasal nodes (some non-lex arc) take the low ids, lex-only slot nodes follow.
  auto phrasal = [&](const Frame& f) {
    for (const auto& [rule, arc] : pool[f.pool_index].arcs) {
      if (rule != lex_rule()) return true;
    }
    return false;
  };
  std::stable_partition(order.begin(), order.end(), phrasal);
  std::vector<NodeId> new_id(pool.size(), kNoNode);
  for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i].pool_index] = static_cast<NodeId>(i);
  for (const Frame& f : order) {
    const detail::BuildNode& b = pool[f.pool_index];
    OrNode n;
    n.id = new_id[f.pool_index];
    n.category = b.category;
    n.visit_count = b.visits;
    n.has_lexical_yield = b.lexical;
    n.parent = f.parent == pool.size() ? kNoNode : new_id[f.parent];
    n.parent_rule = f.parent_rule;
    n.parent_position = f.position;
    aot.nodes_.push_back(std::move(n));
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    OrNode& n = aot.nodes_[new_id[i]];
    for (const auto& [rule, arc] : pool[i].arcs) {
      AndNode and_node{rule, arc.count, {}};
      for (std::size_t c : arc.children) and_node.children.push_back(new_id[c]);
      n.arcs.emplace(rule, std::move(and_node));
    }
  }
  return aot;
}

/// Follows `path` (1-based child positions) from the root of `tree` through
/// the index. nullopt when the rule-id path is absent from the index.
inline std::optional<NodeId> match_path(const ParseTree& tree, std::span<const std::size_t> path,
                                        const AndOrTree& aot) {
  if (aot.empty() || !aot.node(aot.root()).arcs.count(tree.rule)) return std::nullopt;
  NodeId at = aot.root();
  const ParseTree* node = &tree;
  for (std::size_t position : path) {
    if (position == 0 || position > node->children.size()) return std::nullopt;
    auto next = aot.child(at, node->rule, position);
    if (!next) return std::nullopt;
    node = &node->children[position - 1];
    if (!aot.node(*next).arcs.count(node->rule)) return std::nullopt;
    at = *next;
  }
  return at;
}

/// Node reached by a sequence of (arc rule, slot) steps from the root.
inline std::optional<NodeId> find_by_arcs(
    const AndOrTree& aot, std::span<const std::pair<std::string, std::size_t>> steps) {
  if (aot.empty()) return std::nullopt;
  NodeId at = aot.root();
  for (const auto& [rule, position] : steps) {
    auto next = aot.child(at, RuleId{rule}, position);
    if (!next) return std::nullopt;
    at = *next;
  }
  return at;
}

/// Indented text rendering: one line per or-node with id, category and visit
/// count, one line per arc with its count.
inline std::string dump_index(const AndOrTree& aot) {
  std::string out;
  auto emit = [&](auto&& self, NodeId id, std::size_t depth, const std::string& prefix) -> void {
    const OrNode& n = aot.node(id);
    out += std::string(depth * 2, ' ') + prefix + aot.label(id) + " " + n.category.str() +
           " visits=" + std::to_string(n.visit_count);
    if (!n.has_lexical_yield) out += " empty-yield";
    out += "\n";
    for (const auto& [rule, arc] : n.arcs) {
      out += std::string(depth * 2 + 2, ' ') + "-" + rule.str() + " x" +
             std::to_string(arc.count) + "\n";
      for (std::size_t k = 0; k < arc.children.size(); ++k) {
        self(self, arc.children[k], depth + 2, std::to_string(k + 1) + ": ");
      }
    }
  };
  if (!aot.empty()) emit(emit, aot.root(), 0, "");
  return out;
}

}  // namespace cutgram
