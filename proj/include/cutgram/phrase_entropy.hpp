#pragma once

// Per-(rule, slot) phrase entropies estimated from a training treebank.
//
// The LHS slot of a rule is distributed over its attachment contexts
// (parent rule, parent position), with ROOT for tree roots. RHS slot k is
// distributed over the rule id found at child k, `lex` included.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdio>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cutgram/error.hpp"
#include "cutgram/grammar.hpp"

namespace cutgram {

/// Position 0 is the LHS; k >= 1 is the k-th RHS phrase.
struct Slot {
  RuleId rule;
  std::size_t position = 0;

  static Slot lhs(RuleId rule) { return Slot{std::move(rule), 0}; }
  static Slot rhs(RuleId rule, std::size_t k) { return Slot{std::move(rule), k}; }

  bool is_lhs() const noexcept { return position == 0; }

  friend auto operator<=>(const Slot&, const Slot&) = default;
  friend bool operator==(const Slot&, const Slot&) = default;
};

inline constexpr const char* kRootContext = "ROOT";

class CountDistribution {
 public:
  void add(const std::string& outcome, long count = 1) {
    if (count <= 0) throw Error(ErrorKind::InvalidArgument, "counts must be positive");
    counts_[outcome] += count;
    total_ += count;
  }

  const std::map<std::string, long>& counts() const noexcept { return counts_; }
  long total() const noexcept { return total_; }
  std::size_t outcomes() const noexcept { return counts_.size(); }

 private:
  std::map<std::string, long> counts_;
  long total_ = 0;
};

/// Natural-log entropy of the relative-frequency distribution of `counts`.
template <class Range>
double entropy_of_counts(const Range& counts) {
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total <= 0) return 0.0;
  double s = 0;
  for (auto c : counts) {
    if (c <= 0) continue;
    double p = static_cast<double>(c) / total;
    s -= p * std::log(p);
  }
  return s;
}

inline double entropy(const CountDistribution& dist) {
  std::vector<long> counts;
  counts.reserve(dist.outcomes());
  for (const auto& [key, count] : dist.counts()) counts.push_back(count);
  return entropy_of_counts(counts);
}

struct PhraseEntropy {
  double value = 0.0;
  bool seen = false;
};

class PhraseEntropyTable {
 public:
  void add_observation(const Slot& slot, const std::string& outcome) {
    distributions_[slot].add(outcome);
    entropies_.erase(slot);
  }

  /// Entropy of `slot`; unseen slots read as 0 with `seen` false.
  PhraseEntropy lookup(const Slot& slot) const {
    auto it = distributions_.find(slot);
    if (it == distributions_.end()) return {};
    auto cached = entropies_.find(slot);
    if (cached != entropies_.end()) return {cached->second, true};
    return {entropy(it->second), true};
  }

  double entropy_of(const Slot& slot) const { return lookup(slot).value; }

  const CountDistribution* distribution(const Slot& slot) const {
    auto it = distributions_.find(slot);
    return it == distributions_.end() ? nullptr : &it->second;
  }

  const std::map<Slot, CountDistribution>& distributions() const noexcept {
    return distributions_;
  }

  bool has_rule(const RuleId& rule) const { return distributions_.count(Slot::lhs(rule)) != 0; }

  void freeze() {
    for (const auto& [slot, dist] : distributions_) entropies_[slot] = entropy(dist);
  }

 private:
  std::map<Slot, CountDistribution> distributions_;
  std::map<Slot, double> entropies_;
};

namespace detail {

inline void collect_phrases(const ParseTree& tree, PhraseEntropyTable& table) {
  for (std::size_t k = 0; k < tree.children.size(); ++k) {
    const ParseTree& child = tree.children[k];
    table.add_observation(Slot::rhs(tree.rule, k + 1), child.rule.str());
    if (!child.is_lexical()) {
      table.add_observation(Slot::lhs(child.rule), tree.rule.str() + "#" + std::to_string(k + 1));
      collect_phrases(child, table);
    }
  }
}

}  // namespace detail

inline PhraseEntropyTable build_phrase_table(const std::vector<ParseTree>& training) {
  if (training.empty()) {
    throw Error(ErrorKind::InvalidArgument, "phrase table needs a nonempty training set");
  }
  PhraseEntropyTable table;
  for (const ParseTree& tree : training) {
    if (tree.is_lexical()) continue;
    table.add_observation(Slot::lhs(tree.rule), kRootContext);
    detail::collect_phrases(tree, table);
  }
  table.freeze();
  return table;
}

inline std::string ordinal(std::size_t k) {
  std::string suffix = "th";
  if (k % 100 < 11 || k % 100 > 13) {
    if (k % 10 == 1) suffix = "st";
    if (k % 10 == 2) suffix = "nd";
    if (k % 10 == 3) suffix = "rd";
  }
  return std::to_string(k) + suffix;
}

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out = buf;
  // -0.00 prints as 0.00
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

/// TSV rendering: one row per observed rule (inventory order), one column per
/// slot, `---` where the rule has no such RHS phrase.
inline std::string render_phrase_table(const PhraseEntropyTable& table, const RuleInventory& inv,
                                       int decimals = 2) {
  std::size_t width = 0;
  for (const RuleId& id : inv.ids()) {
    if (table.has_rule(id)) width = std::max(width, inv.at(id).rhs.size());
  }
  std::string out = "rule\tLHS";
  for (std::size_t k = 1; k <= width; ++k) out += "\t" + ordinal(k) + " RHS";
  out += "\n";
  for (const RuleId& id : inv.ids()) {
    if (!table.has_rule(id)) continue;
    const GrammarRule& rule = inv.at(id);
    out += id.str();
    for (std::size_t k = 0; k <= width; ++k) {
      out += "\t";
      if (k > rule.rhs.size()) {
        out += "---";
      } else {
        out += format_fixed(table.entropy_of(Slot{id, k}), decimals);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace cutgram
