#pragma once

// Specialized rules: chunks of original rules cut out of training trees at
// cutnodes, or enumerated from the and-or tree.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cutgram/andor_index.hpp"
#include "cutgram/cutnodes.hpp"
#include "cutgram/error.hpp"
#include "cutgram/grammar.hpp"
#include "cutgram/sexpr.hpp"

namespace cutgram {

struct ChunkNode {
  enum class Kind { Apply, LexSlot, Frontier };

  Kind kind = Kind::Apply;
  RuleId rule;        // Apply only
  Category category;  // slot category for leaves, lhs for Apply
  std::vector<ChunkNode> children;

  static ChunkNode apply(RuleId rule, Category lhs, std::vector<ChunkNode> children) {
    return ChunkNode{Kind::Apply, std::move(rule), std::move(lhs), std::move(children)};
  }
  static ChunkNode lex_slot(Category slot) { return ChunkNode{Kind::LexSlot, {}, std::move(slot), {}}; }
  static ChunkNode frontier(Category slot) { return ChunkNode{Kind::Frontier, {}, std::move(slot), {}}; }

  bool is_apply() const noexcept { return kind == Kind::Apply; }

  friend bool operator==(const ChunkNode&, const ChunkNode&) = default;
};

/// Canonical S-expression: `(rule child ...)`, `lex` for lexical slots and the
/// bare category name for frontier slots.
inline void render_chunk(const ChunkNode& chunk, std::string& out) {
  switch (chunk.kind) {
    case ChunkNode::Kind::LexSlot: out += kLexName; return;
    case ChunkNode::Kind::Frontier: out += chunk.category.str(); return;
    case ChunkNode::Kind::Apply:
      out.push_back('(');
      out += chunk.rule.str();
      for (const ChunkNode& child : chunk.children) {
        out.push_back(' ');
        render_chunk(child, out);
      }
      out.push_back(')');
      return;
  }
}

inline std::string render_chunk(const ChunkNode& chunk) {
  std::string out;
  render_chunk(chunk, out);
  return out;
}

inline void flat_leaves(const ChunkNode& chunk, std::vector<Category>& out) {
  if (!chunk.is_apply()) {
    out.push_back(chunk.category);
    return;
  }
  for (const ChunkNode& child : chunk.children) flat_leaves(child, out);
}

inline std::size_t leaf_count(const ChunkNode& chunk) {
  if (!chunk.is_apply()) return 1;
  std::size_t n = 0;
  for (const ChunkNode& child : chunk.children) n += leaf_count(child);
  return n;
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct SpecializedRule {
  ChunkNode chunk;
  Category lhs;
  std::vector<Category> flat_rhs;
  std::size_t reduction_length = 0;
  long support = 0;
  std::string name;
  std::string key;  // canonical chunk rendering

  static SpecializedRule from_chunk(ChunkNode chunk, long support = 0) {
    SpecializedRule r;
    r.lhs = chunk.category;
    flat_leaves(chunk, r.flat_rhs);
    r.reduction_length = r.flat_rhs.size();
    r.support = support;
    r.key = render_chunk(chunk);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(r.key)));
    r.name = r.lhs.str() + "_" + std::string(hex, 12);
    r.chunk = std::move(chunk);
    return r;
  }
};

/// (lhs, flat rhs) of a rule.
inline std::pair<Category, std::vector<Category>> flatten(const SpecializedRule& rule) {
  return {rule.lhs, rule.flat_rhs};
}

/// Phrasal categories print upper-case (NP), lexical ones capitalised (Det).
inline std::string display_category(const Category& cat, const RuleInventory& inv) {
  std::string out = cat.str();
  if (out.empty()) return out;
  if (inv.is_phrasal(cat)) {
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

/// `LHS => SYM SYM ...`
inline std::string flat_form(const SpecializedRule& rule, const RuleInventory& inv) {
  std::string out = display_category(rule.lhs, inv) + " =>";
  for (const Category& c : rule.flat_rhs) out += " " + display_category(c, inv);
  return out;
}

enum class RuleOrigin { TrainingCut, AndOrEnum };

inline std::string_view to_string(RuleOrigin origin) {
  return origin == RuleOrigin::TrainingCut ? "training-cut" : "andor-enum";
}

/// Specialized rules deduplicated by chunk, ordered by canonical rendering.
class RuleSet {
 public:
  explicit RuleSet(RuleOrigin origin = RuleOrigin::TrainingCut) : origin_(origin) {}

  RuleOrigin origin() const noexcept { return origin_; }

  /// Adds the chunk, or bumps the support of an identical one already present.
  void add(ChunkNode chunk, long support = 1) {
    std::string key = render_chunk(chunk);
    auto it = index_.find(key);
    if (it != index_.end()) {
      rules_[it->second].support += support;
      return;
    }
    SpecializedRule rule = SpecializedRule::from_chunk(std::move(chunk), support);
    auto pos = std::lower_bound(rules_.begin(), rules_.end(), rule.key,
                                [](const SpecializedRule& r, const std::string& k) { return r.key < k; });
    rules_.insert(pos, std::move(rule));
    reindex();
  }

  void add_rule(SpecializedRule rule) {
    if (index_.count(rule.key)) {
      rules_[index_.at(rule.key)].support += rule.support;
      return;
    }
    auto pos = std::lower_bound(rules_.begin(), rules_.end(), rule.key,
                                [](const SpecializedRule& r, const std::string& k) { return r.key < k; });
    rules_.insert(pos, std::move(rule));
    reindex();
  }

  const std::vector<SpecializedRule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }

  const SpecializedRule* find(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &rules_[it->second];
  }
  const SpecializedRule* find(const ChunkNode& chunk) const { return find(render_chunk(chunk)); }
  bool contains(const ChunkNode& chunk) const { return find(chunk) != nullptr; }

  /// Copies support counts from `other` for chunks both sets share.
  void take_support_from(const RuleSet& other) {
    for (SpecializedRule& r : rules_) {
      const SpecializedRule* o = other.find(r.key);
      r.support = o ? o->support : 0;
    }
  }

 private:
  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < rules_.size(); ++i) index_.emplace(rules_[i].key, i);
  }

  RuleOrigin origin_;
  std::vector<SpecializedRule> rules_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

class TreeCutter {
 public:
  TreeCutter(const CutnodeSet& cutnodes, const AndOrTree& aot, const RuleInventory& inv)
      : cutnodes_(cutnodes), aot_(aot), inv_(inv) {}

  std::vector<ChunkNode> cut(const ParseTree& tree) {
    chunks_.clear();
    if (aot_.empty() || tree.is_lexical() || !aot_.node(aot_.root()).arcs.count(tree.rule)) {
      throw Error(ErrorKind::PathNotInIndex, "tree root is not in the index");
    }
    ChunkNode root = build(tree, aot_.root());
    chunks_.insert(chunks_.begin(), std::move(root));
    return std::exchange(chunks_, {});
  }

 private:
  ChunkNode build(const ParseTree& tree, NodeId at) {
    const GrammarRule& rule = inv_.at(tree.rule);
    ChunkNode out = ChunkNode::apply(rule.id, rule.lhs, {});
    out.children.reserve(tree.children.size());
    for (std::size_t k = 0; k < tree.children.size(); ++k) {
      const ParseTree& child = tree.children[k];
      const Category& slot = rule.rhs[k];
      auto child_node = aot_.child(at, tree.rule, k + 1);
      if (!child_node || !aot_.node(*child_node).arcs.count(child.rule)) {
        throw Error(ErrorKind::PathNotInIndex,
                    "subtree '" + child.rule.str() + "' under '" + tree.rule.str() +
                        "' is not in the index");
      }
      if (child.is_lexical()) {
        out.children.push_back(cutnodes_.is_cut(*child_node) ? ChunkNode::frontier(slot)
                                                             : ChunkNode::lex_slot(slot));
      } else if (cutnodes_.is_cut(*child_node) && yield_length(child) > 0) {
        out.children.push_back(ChunkNode::frontier(slot));
        std::size_t index = chunks_.size();
        chunks_.emplace_back();
        ChunkNode sub = build(child, *child_node);
        chunks_[index] = std::move(sub);
      } else {
        out.children.push_back(build(child, *child_node));
      }
    }
    return out;
  }

  const CutnodeSet& cutnodes_;
  const AndOrTree& aot_;
  const RuleInventory& inv_;
  std::vector<ChunkNode> chunks_;
};

}  // namespace detail

/// Cuts a training tree at its cut positions. The first chunk is rooted at the
/// tree root; the rest are rooted at cut positions, in preorder. Lexical
/// leaves at cut positions become frontier slots; empty-yield subtrees are
/// never cut.
inline std::vector<ChunkNode> cut_tree(const ParseTree& tree, const CutnodeSet& cutnodes,
                                       const AndOrTree& aot, const RuleInventory& inv) {
  return detail::TreeCutter(cutnodes, aot, inv).cut(tree);
}

inline RuleSet extract_training(const std::vector<ParseTree>& training,
                                const CutnodeSet& cutnodes, const AndOrTree& aot,
                                const RuleInventory& inv) {
  RuleSet out(RuleOrigin::TrainingCut);
  detail::TreeCutter cutter(cutnodes, aot, inv);
  for (const ParseTree& tree : training) {
    for (ChunkNode& chunk : cutter.cut(tree)) {
      if (leaf_count(chunk) == 0) continue;  // empty right-hand sides are banned
      out.add(std::move(chunk));
    }
  }
  return out;
}

namespace detail {

class AndOrEnumerator {
 public:
  AndOrEnumerator(const AndOrTree& aot, const CutnodeSet& cutnodes, const RuleInventory& inv,
                  std::size_t cap)
      : aot_(aot), cutnodes_(cutnodes), inv_(inv), cap_(cap) {
    for (NodeId id = 0; id < aot.size(); ++id) {
      NodeId rep = cutnodes_.class_of(id);
      auto& arcs = arcs_[rep];
      for (const auto& [rule, arc] : aot.node(id).arcs) {
        if (arcs.count(rule)) continue;
        std::vector<NodeId> children;
        for (NodeId c : arc.children) children.push_back(cutnodes_.class_of(c));
        arcs.emplace(rule, std::move(children));
      }
      if (aot.node(id).has_lexical_yield) lexical_.insert(rep);
    }
    // Least fixpoint: classes with some arc whose slots can all be empty.
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [rep, arcs] : arcs_) {
        if (can_be_empty_.count(rep)) continue;
        for (const auto& [rule, children] : arcs) {
          if (rule != lex_rule() && all_can_be_empty(children)) {
            can_be_empty_.insert(rep);
            changed = true;
            break;
          }
        }
      }
    }
  }

  RuleSet run() {
    RuleSet out(RuleOrigin::AndOrEnum);
    std::set<NodeId> roots{cutnodes_.class_of(aot_.root())};
    for (const EquivalenceClass& c : cutnodes_.cut_classes()) roots.insert(c.representative);
    for (NodeId rep : roots) {
      for (const ChunkNode& chunk : expand(rep)) {
        if (!chunk.is_apply() || leaf_count(chunk) == 0) continue;
        out.add(chunk, 0);
      }
    }
    return out;
  }

 private:
  Category category(NodeId rep) const { return aot_.node(rep).category; }

  void check_cap(std::size_t n) const {
    if (n > cap_) {
      throw Error(ErrorKind::ChunkExplosion,
                  "more than " + std::to_string(cap_) + " chunk alternatives");
    }
  }

  bool all_can_be_empty(const std::vector<NodeId>& children) const {
    return std::all_of(children.begin(), children.end(),
                       [&](NodeId c) { return can_be_empty_.count(c) != 0; });
  }

  template <class ChildAlternatives>
  std::vector<ChunkNode> expansions(NodeId rep, ChildAlternatives&& child_alternatives,
                                    bool empty_only = false) {
    std::vector<ChunkNode> out;
    const Category cat = category(rep);
    for (const auto& [rule, children] : arcs_[rep]) {
      if (empty_only && (rule == lex_rule() || !all_can_be_empty(children))) continue;
      if (rule == lex_rule()) {
        out.push_back(ChunkNode::lex_slot(cat));
        continue;
      }
      std::vector<std::vector<ChunkNode>> options;
      std::size_t combos = 1;
      for (NodeId child : children) {
        options.push_back(child_alternatives(child));
        combos *= options.back().size();
        if (combos == 0) break;
        check_cap(combos);
      }
      if (combos == 0) continue;
      std::vector<std::size_t> pick(children.size(), 0);
      bool advanced = true;
      while (advanced) {
        ChunkNode node = ChunkNode::apply(rule, cat, {});
        for (std::size_t k = 0; k < children.size(); ++k) node.children.push_back(options[k][pick[k]]);
        out.push_back(std::move(node));
        check_cap(out.size());
        advanced = false;
        for (std::size_t k = children.size(); k > 0 && !advanced; --k) {
          if (++pick[k - 1] < options[k - 1].size()) {
            advanced = true;
          } else {
            pick[k - 1] = 0;
          }
        }
      }
    }
    return out;
  }

  /// Chunk bodies rooted at class `rep`, cutting at cut classes below it.
  const std::vector<ChunkNode>& expand(NodeId rep) {
    if (auto it = expand_memo_.find(rep); it != expand_memo_.end()) return it->second;
    if (!in_progress_.insert(rep).second) {
      throw Error(ErrorKind::ChunkExplosion, "unbounded chunks: uncut cycle through " +
                                                 aot_.label(rep));
    }
    std::vector<ChunkNode> out = expansions(rep, [this](NodeId child) { return slot_options(child); });
    in_progress_.erase(rep);
    return expand_memo_.emplace(rep, std::move(out)).first->second;
  }

  /// Expansions of `rep` that dominate no lexical material.
  const std::vector<ChunkNode>& empty_expansions(NodeId rep) {
    if (auto it = empty_memo_.find(rep); it != empty_memo_.end()) return it->second;
    if (!can_be_empty_.count(rep)) return empty_memo_[rep];
    if (!empty_in_progress_.insert(rep).second) {
      throw Error(ErrorKind::ChunkExplosion, "unbounded empty chunks through " + aot_.label(rep));
    }
    std::vector<ChunkNode> all =
        expansions(rep, [this](NodeId child) { return empty_expansions(child); }, true);
    std::vector<ChunkNode> out;
    for (ChunkNode& c : all) {
      if (c.is_apply() && leaf_count(c) == 0) out.push_back(std::move(c));
    }
    empty_in_progress_.erase(rep);
    return empty_memo_.emplace(rep, std::move(out)).first->second;
  }

  std::vector<ChunkNode> slot_options(NodeId rep) {
    if (!cutnodes_.is_cut(rep)) return expand(rep);
    std::vector<ChunkNode> out;
    if (lexical_.count(rep)) out.push_back(ChunkNode::frontier(category(rep)));
    for (const ChunkNode& c : empty_expansions(rep)) out.push_back(c);
    return out;
  }

  const AndOrTree& aot_;
  const CutnodeSet& cutnodes_;
  const RuleInventory& inv_;
  std::size_t cap_;
  std::map<NodeId, std::map<RuleId, std::vector<NodeId>>> arcs_;
  std::set<NodeId> lexical_;
  std::set<NodeId> can_be_empty_;
  std::map<NodeId, std::vector<ChunkNode>> expand_memo_;
  std::map<NodeId, std::vector<ChunkNode>> empty_memo_;
  std::set<NodeId> in_progress_;
  std::set<NodeId> empty_in_progress_;
};

}  // namespace detail

inline constexpr std::size_t kDefaultChunkCap = 100000;

/// Every chunk the and-or tree licenses: at each class on the way, every arc
/// is an independent choice. Equated nodes form one vertex of the graph.
inline RuleSet extract_andor(const AndOrTree& aot, const CutnodeSet& cutnodes,
                             const RuleInventory& inv, std::size_t cap = kDefaultChunkCap) {
  return detail::AndOrEnumerator(aot, cutnodes, inv, cap).run();
}

/// Checks arities and slot categories of `chunk` against the inventory.
inline bool validate_chunk(const ChunkNode& chunk, const RuleInventory& inv) {
  if (!chunk.is_apply()) return true;
  const GrammarRule* rule = inv.find(chunk.rule);
  if (!rule || rule->lhs != chunk.category || rule->rhs.size() != chunk.children.size()) {
    return false;
  }
  for (std::size_t k = 0; k < rule->rhs.size(); ++k) {
    if (chunk.children[k].category != rule->rhs[k]) return false;
    if (!validate_chunk(chunk.children[k], inv)) return false;
  }
  return true;
}

namespace detail {

inline ChunkNode chunk_from_sexpr(const sexpr::Node& node, const RuleInventory& inv) {
  if (node.is_atom || node.list.empty() || !node.list.front().is_atom) {
    throw Error(ErrorKind::MalformedLine, "chunk must be (rule child ...)", node.line);
  }
  RuleId id{node.list.front().atom};
  const GrammarRule* rule = inv.find(id);
  if (!rule) throw Error(ErrorKind::UnknownRuleId, "unknown rule id '" + id.str() + "'", node.line);
  if (node.list.size() - 1 != rule->rhs.size()) {
    throw Error(ErrorKind::ArityMismatch, "wrong child count for '" + id.str() + "'", node.line);
  }
  ChunkNode out = ChunkNode::apply(id, rule->lhs, {});
  for (std::size_t k = 0; k < rule->rhs.size(); ++k) {
    const sexpr::Node& child = node.list[k + 1];
    const Category& slot = rule->rhs[k];
    if (child.is_atom) {
      if (child.atom == kLexName) {
        out.children.push_back(ChunkNode::lex_slot(slot));
      } else if (child.atom == slot.str()) {
        out.children.push_back(ChunkNode::frontier(slot));
      } else {
        throw Error(ErrorKind::CategoryMismatch,
                    "frontier '" + child.atom + "' in a slot of category " + slot.str(), child.line);
      }
    } else {
      ChunkNode sub = chunk_from_sexpr(child, inv);
      if (sub.category != slot) {
        throw Error(ErrorKind::CategoryMismatch,
                    "rule '" + sub.rule.str() + "' in a slot of category " + slot.str(), child.line);
      }
      out.children.push_back(std::move(sub));
    }
  }
  return out;
}

}  // namespace detail

inline ChunkNode parse_chunk(std::string_view text, const RuleInventory& inv) {
  auto nodes = sexpr::read_all(text);
  if (nodes.size() != 1) throw Error(ErrorKind::MalformedLine, "expected one chunk expression");
  return detail::chunk_from_sexpr(nodes.front(), inv);
}

/// Rule file: a `#` header, then per rule a line `name: LHS => SYMBOLS`
/// followed by the chunk as an indented S-expression.
inline std::string write_rule_file(const RuleSet& rules, const RuleInventory& inv) {
  std::string out = "# origin=" + std::string(to_string(rules.origin())) +
                    " rules=" + std::to_string(rules.size()) + "\n";
  for (const SpecializedRule& r : rules.rules()) {
    out += r.name + ": " + flat_form(r, inv) + "\n";
    out += "    " + r.key + "\n";
  }
  return out;
}

inline RuleSet read_rule_file(std::string_view text, const RuleInventory& inv) {
  RuleOrigin origin = RuleOrigin::TrainingCut;
  if (text.find("origin=andor-enum") != std::string_view::npos) origin = RuleOrigin::AndOrEnum;
  RuleSet out(origin);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::string pending_name;
  int pending_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (first == 0) {
      if (!pending_name.empty()) {
        throw Error(ErrorKind::MalformedLine, "rule '" + pending_name + "' has no chunk", pending_line);
      }
      std::size_t colon = line.find(':');
      if (colon == std::string::npos || colon == 0) {
        throw Error(ErrorKind::MalformedLine, "expected 'name: LHS => SYMBOLS'", line_no);
      }
      pending_name = line.substr(0, colon);
      pending_line = line_no;
      continue;
    }
    if (pending_name.empty()) {
      throw Error(ErrorKind::MalformedLine, "chunk without a rule header", line_no);
    }
    ChunkNode chunk;
    try {
      chunk = parse_chunk(line, inv);
    } catch (const Error& e) {
      throw Error(e.kind(), e.message(), line_no);
    }
    SpecializedRule rule = SpecializedRule::from_chunk(std::move(chunk), 0);
    rule.name = pending_name;
    out.add_rule(std::move(rule));
    pending_name.clear();
  }
  if (!pending_name.empty()) {
    throw Error(ErrorKind::MalformedLine, "rule '" + pending_name + "' has no chunk", pending_line);
  }
  return out;
}

}  // namespace cutgram
