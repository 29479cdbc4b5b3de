#pragma once

// Rules, categories, implicit parse trees and their text formats.
//
// Grammar file: one rule per line, `<rule_id> <lhs> -> <rhs ...>`, with `#`
// comments and blank lines ignored. Treebank file: one S-expression per tree,
// `(rule child ...)` for internal nodes and `(lex word)` for lexical lookups.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cutgram/error.hpp"
#include "cutgram/sexpr.hpp"

namespace cutgram {

/// A named symbol; the tag keeps categories and rule ids from mixing.
template <class Tag>
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string name) : name_(std::move(name)) {}

  const std::string& str() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  friend auto operator<=>(const Symbol&, const Symbol&) = default;
  friend bool operator==(const Symbol&, const Symbol&) = default;

 private:
  std::string name_;
};

using Category = Symbol<struct CategoryTag>;
using RuleId = Symbol<struct RuleIdTag>;

inline constexpr std::string_view kLexName = "lex";

inline const RuleId& lex_rule() {
  static const RuleId id{std::string(kLexName)};
  return id;
}

struct GrammarRule {
  RuleId id;
  Category lhs;
  std::vector<Category> rhs;

  friend bool operator==(const GrammarRule&, const GrammarRule&) = default;
};

class RuleInventory {
 public:
  RuleInventory() = default;
  explicit RuleInventory(Category top) : top_(std::move(top)) {}

  const Category& top() const noexcept { return top_; }
  void set_top(Category top) { top_ = std::move(top); }

  void add(GrammarRule rule) {
    if (rule.id.str() == kLexName) {
      throw Error(ErrorKind::MalformedLine, "rule id 'lex' is reserved");
    }
    if (rules_.count(rule.id)) {
      throw Error(ErrorKind::DuplicateRuleId, "duplicate rule id '" + rule.id.str() + "'");
    }
    order_.push_back(rule.id);
    phrasal_.insert(rule.lhs);
    rules_.emplace(rule.id, std::move(rule));
  }

  const GrammarRule* find(const RuleId& id) const {
    auto it = rules_.find(id);
    return it == rules_.end() ? nullptr : &it->second;
  }

  const GrammarRule& at(const RuleId& id) const {
    const GrammarRule* rule = find(id);
    if (!rule) throw Error(ErrorKind::UnknownRuleId, "unknown rule id '" + id.str() + "'");
    return *rule;
  }

  bool contains(const RuleId& id) const { return rules_.count(id) != 0; }
  std::size_t size() const noexcept { return rules_.size(); }

  /// Rule ids in file order.
  const std::vector<RuleId>& ids() const noexcept { return order_; }

  /// True when some rule expands `cat`; false for purely lexical categories.
  bool is_phrasal(const Category& cat) const { return phrasal_.count(cat) != 0; }

 private:
  Category top_;
  std::map<RuleId, GrammarRule> rules_;
  std::vector<RuleId> order_;
  std::set<Category> phrasal_;
};

/// Implicit parse tree: internal nodes carry rule ids; a node whose rule is
/// `lex` is a lexical lookup holding `word` and no children.
struct ParseTree {
  RuleId rule;
  std::string word;
  std::vector<ParseTree> children;

  static ParseTree lexical(std::string word) {
    return ParseTree{lex_rule(), std::move(word), {}};
  }
  static ParseTree internal(RuleId rule, std::vector<ParseTree> children) {
    return ParseTree{std::move(rule), {}, std::move(children)};
  }

  bool is_lexical() const { return rule.str() == kLexName; }

  friend bool operator==(const ParseTree&, const ParseTree&) = default;
};

struct Treebank {
  std::vector<ParseTree> training;
  std::vector<ParseTree> test;
};

/// Number of lexical lookups dominated by `tree`.
inline std::size_t yield_length(const ParseTree& tree) {
  if (tree.is_lexical()) return 1;
  std::size_t total = 0;
  for (const ParseTree& child : tree.children) total += yield_length(child);
  return total;
}

inline std::size_t node_count(const ParseTree& tree) {
  std::size_t total = 1;
  for (const ParseTree& child : tree.children) total += node_count(child);
  return total;
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

}  // namespace detail

/// Derives `lhs -> rhs...` from a mnemonic id such as `vp_v_np`; nullopt when
/// the id has fewer than two underscore-separated parts.
inline std::optional<GrammarRule> infer_rule_from_name(const RuleId& id) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : id.str()) {
    if (c == '_') {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  if (parts.size() < 2) return std::nullopt;
  for (const auto& p : parts) {
    if (p.empty()) return std::nullopt;
  }
  GrammarRule rule{id, Category{parts[0]}, {}};
  for (std::size_t i = 1; i < parts.size(); ++i) rule.rhs.emplace_back(parts[i]);
  return rule;
}

/// Parses the grammar file format. In strict mode, every rule id that reads
/// as a mnemonic (`lhs_rhs1_rhs2`) must agree with its explicit definition.
inline RuleInventory parse_rule_inventory(std::string_view text, Category top,
                                          bool strict = false) {
  RuleInventory inv(std::move(top));
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 3 || tokens[2] != "->") {
      throw Error(ErrorKind::MalformedLine, "expected '<rule_id> <lhs> -> <rhs ...>'", line_no);
    }
    GrammarRule rule{RuleId{tokens[0]}, Category{tokens[1]}, {}};
    for (std::size_t i = 3; i < tokens.size(); ++i) rule.rhs.emplace_back(tokens[i]);
    if (rule.lhs.str() == kLexName ||
        std::any_of(rule.rhs.begin(), rule.rhs.end(),
                    [](const Category& c) { return c.str() == kLexName || c.str() == "->"; })) {
      throw Error(ErrorKind::MalformedLine, "'lex' and '->' are not categories", line_no);
    }
    if (rule.id.str() == kLexName) {
      throw Error(ErrorKind::MalformedLine, "rule id 'lex' is reserved", line_no);
    }
    if (inv.contains(rule.id)) {
      throw Error(ErrorKind::DuplicateRuleId, "duplicate rule id '" + rule.id.str() + "'",
                  line_no);
    }
    if (strict) {
      if (auto inferred = infer_rule_from_name(rule.id); inferred && *inferred != rule) {
        throw Error(ErrorKind::MalformedLine,
                    "rule '" + rule.id.str() + "' disagrees with its mnemonic name", line_no);
      }
    }
    inv.add(std::move(rule));
  }
  return inv;
}

namespace detail {

inline ParseTree tree_from_sexpr(const sexpr::Node& node, const RuleInventory& inv) {
  if (node.is_atom || node.list.empty() || !node.list.front().is_atom ||
      node.list.front().quoted) {
    throw Error(ErrorKind::MalformedLine, "expected (rule child ...) or (lex word)", node.line);
  }
  const std::string& head = node.list.front().atom;
  if (head == kLexName) {
    if (node.list.size() != 2 || !node.list[1].is_atom) {
      throw Error(ErrorKind::ArityMismatch, "(lex word) takes exactly one word", node.line);
    }
    return ParseTree::lexical(node.list[1].atom);
  }
  RuleId id{head};
  const GrammarRule* rule = inv.find(id);
  if (!rule) throw Error(ErrorKind::UnknownRuleId, "unknown rule id '" + head + "'", node.line);
  if (node.list.size() - 1 != rule->rhs.size()) {
    throw Error(ErrorKind::ArityMismatch,
                "rule '" + head + "' takes " + std::to_string(rule->rhs.size()) +
                    " children, got " + std::to_string(node.list.size() - 1),
                node.line);
  }
  ParseTree tree = ParseTree::internal(id, {});
  tree.children.reserve(rule->rhs.size());
  for (std::size_t i = 0; i < rule->rhs.size(); ++i) {
    const sexpr::Node& child_node = node.list[i + 1];
    ParseTree child = tree_from_sexpr(child_node, inv);
    if (!child.is_lexical() && inv.at(child.rule).lhs != rule->rhs[i]) {
      throw Error(ErrorKind::CategoryMismatch,
                  "slot " + std::to_string(i + 1) + " of '" + head + "' expects " +
                      rule->rhs[i].str() + ", got '" + child.rule.str() + "' of category " +
                      inv.at(child.rule).lhs.str(),
                  child_node.line);
    }
    tree.children.push_back(std::move(child));
  }
  return tree;
}

}  // namespace detail

/// Parses a treebank file. Every tree must be rooted in a rule whose lhs is
/// the inventory's top category.
inline std::vector<ParseTree> parse_treebank(std::string_view text, const RuleInventory& inv) {
  std::vector<ParseTree> trees;
  for (const sexpr::Node& node : sexpr::read_all(text)) {
    ParseTree tree = detail::tree_from_sexpr(node, inv);
    if (tree.is_lexical() || inv.at(tree.rule).lhs != inv.top()) {
      throw Error(ErrorKind::CategoryMismatch,
                  "tree root must have category " + inv.top().str(), node.line);
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

inline void render(const ParseTree& tree, std::string& out) {
  out.push_back('(');
  out += tree.rule.str();
  if (tree.is_lexical()) {
    out.push_back(' ');
    out += sexpr::quote_if_needed(tree.word);
  }
  for (const ParseTree& child : tree.children) {
    out.push_back(' ');
    render(child, out);
  }
  out.push_back(')');
}

inline std::string render(const ParseTree& tree) {
  std::string out;
  render(tree, out);
  return out;
}

inline std::string render_treebank(const std::vector<ParseTree>& trees) {
  std::string out;
  for (const ParseTree& tree : trees) {
    render(tree, out);
    out.push_back('\n');
  }
  return out;
}

/// Category occupied by the node: the lhs of its rule, or `slot` for lex leaves.
inline Category category_of(const ParseTree& tree, const RuleInventory& inv,
                            const Category& slot) {
  return tree.is_lexical() ? slot : inv.at(tree.rule).lhs;
}

}  // namespace cutgram
