#pragma once

// Derivability of test trees from a specialized rule set, coverage, and
// reduction-length statistics.
//
// A tree is covered when it can be tiled by rule chunks: each chunk matches
// the tree's rule ids and lexical leaves exactly, and each frontier slot is
// filled either by a lexical leaf or by a subtree that is itself tiled.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cutgram/grammar.hpp"
#include "cutgram/phrase_entropy.hpp"
#include "cutgram/rule_extraction.hpp"

namespace cutgram {

struct RuleApplication {
  std::vector<std::size_t> path;  // 1-based child positions from the tree root
  std::size_t rule_index = 0;     // into RuleSet::rules()
};

struct Tiling {
  std::vector<RuleApplication> applications;  // preorder
};

/// Memoized top-down tiler. Candidate rules at a node are tried longest
/// reduction first, then by name.
class Matcher {
 public:
  explicit Matcher(const RuleSet& rules) : rules_(rules) {
    for (std::size_t i = 0; i < rules.rules().size(); ++i) {
      by_root_[rules.rules()[i].chunk.rule].push_back(i);
    }
    for (auto& [root, candidates] : by_root_) {
      std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        const SpecializedRule& ra = rules.rules()[a];
        const SpecializedRule& rb = rules.rules()[b];
        if (ra.reduction_length != rb.reduction_length) {
          return ra.reduction_length > rb.reduction_length;
        }
        return ra.name < rb.name;
      });
    }
  }

  std::optional<Tiling> covers(const ParseTree& tree) {
    memo_.clear();
    if (tree.is_lexical() || !tile(tree)) return std::nullopt;
    Tiling tiling;
    std::vector<std::size_t> path;
    collect(tree, path, tiling);
    return tiling;
  }

 private:
  struct Obligation {
    const ParseTree* node;
    std::vector<std::size_t> path;  // relative to the chunk root
  };

  static bool match(const ChunkNode& chunk, const ParseTree& tree, std::vector<std::size_t>& path,
                    std::vector<Obligation>& out) {
    switch (chunk.kind) {
      case ChunkNode::Kind::LexSlot:
        return tree.is_lexical();
      case ChunkNode::Kind::Frontier:
        if (!tree.is_lexical()) out.push_back(Obligation{&tree, path});
        return true;
      case ChunkNode::Kind::Apply:
        if (tree.is_lexical() || tree.rule != chunk.rule ||
            tree.children.size() != chunk.children.size()) {
          return false;
        }
        for (std::size_t k = 0; k < chunk.children.size(); ++k) {
          path.push_back(k + 1);
          bool ok = match(chunk.children[k], tree.children[k], path, out);
          path.pop_back();
          if (!ok) return false;
        }
        return true;
    }
    return false;
  }

  bool tile(const ParseTree& tree) {
    if (auto it = memo_.find(&tree); it != memo_.end()) return it->second.has_value();
    std::optional<std::size_t> choice;
    auto candidates = by_root_.find(tree.rule);
    if (candidates != by_root_.end()) {
      for (std::size_t index : candidates->second) {
        std::vector<Obligation> obligations;
        std::vector<std::size_t> path;
        if (!match(rules_.rules()[index].chunk, tree, path, obligations)) continue;
        bool all = true;
        for (const Obligation& o : obligations) {
          if (!tile(*o.node)) {
            all = false;
            break;
          }
        }
        if (all) {
          choice = index;
          break;
        }
      }
    }
    memo_[&tree] = choice;
    return choice.has_value();
  }

  void collect(const ParseTree& tree, std::vector<std::size_t>& path, Tiling& tiling) {
    std::size_t index = *memo_.at(&tree);
    tiling.applications.push_back(RuleApplication{path, index});
    std::vector<Obligation> obligations;
    std::vector<std::size_t> rel;
    match(rules_.rules()[index].chunk, tree, rel, obligations);
    for (const Obligation& o : obligations) {
      std::size_t base = path.size();
      path.insert(path.end(), o.path.begin(), o.path.end());
      collect(*o.node, path, tiling);
      path.resize(base);
    }
  }

  const RuleSet& rules_;
  std::map<RuleId, std::vector<std::size_t>> by_root_;
  std::unordered_map<const ParseTree*, std::optional<std::size_t>> memo_;
};

inline std::optional<Tiling> covers(const RuleSet& rules, const ParseTree& tree) {
  return Matcher(rules).covers(tree);
}

/// Re-checks a tiling against the tree: every application matches at its
/// position, every non-lexical frontier is the root of exactly one further
/// application, and the root is covered.
inline bool verify_tiling(const RuleSet& rules, const ParseTree& tree, const Tiling& tiling) {
  auto at = [&](const std::vector<std::size_t>& path) -> const ParseTree* {
    const ParseTree* node = &tree;
    for (std::size_t p : path) {
      if (p == 0 || p > node->children.size()) return nullptr;
      node = &node->children[p - 1];
    }
    return node;
  };
  std::map<std::vector<std::size_t>, int> roots;
  for (const RuleApplication& a : tiling.applications) {
    if (a.rule_index >= rules.size() || !roots.emplace(a.path, 0).second) return false;
  }
  if (!roots.count({})) return false;
  std::map<std::vector<std::size_t>, int> required;
  for (const RuleApplication& a : tiling.applications) {
    const ParseTree* node = at(a.path);
    if (!node) return false;
    // walk chunk and tree together
    std::vector<std::pair<const ChunkNode*, std::vector<std::size_t>>> stack{
        {&rules.rules()[a.rule_index].chunk, a.path}};
    while (!stack.empty()) {
      auto [chunk, path] = stack.back();
      stack.pop_back();
      const ParseTree* t = at(path);
      if (!t) return false;
      if (chunk->kind == ChunkNode::Kind::LexSlot) {
        if (!t->is_lexical()) return false;
      } else if (chunk->kind == ChunkNode::Kind::Frontier) {
        if (!t->is_lexical()) required[path] += 1;
      } else {
        if (t->is_lexical() || t->rule != chunk->rule || t->children.size() != chunk->children.size()) {
          return false;
        }
        for (std::size_t k = 0; k < chunk->children.size(); ++k) {
          auto child_path = path;
          child_path.push_back(k + 1);
          stack.emplace_back(&chunk->children[k], std::move(child_path));
        }
      }
    }
  }
  for (const auto& [path, count] : roots) {
    if (path.empty()) continue;
    if (!required.count(path)) return false;
  }
  for (const auto& [path, count] : required) {
    if (count != 1 || !roots.count(path)) return false;
  }
  return true;
}

struct CoverageReport {
  double coverage = 1.0;
  std::size_t covered = 0;
  std::size_t total = 0;
  bool vacuous = false;  // empty test set
  std::vector<bool> verdicts;
};

inline CoverageReport evaluate_coverage(const RuleSet& rules, const std::vector<ParseTree>& testset) {
  CoverageReport report;
  report.total = testset.size();
  Matcher matcher(rules);
  for (const ParseTree& tree : testset) {
    bool ok = matcher.covers(tree).has_value();
    report.verdicts.push_back(ok);
    if (ok) ++report.covered;
  }
  if (testset.empty()) {
    report.vacuous = true;
    report.coverage = 1.0;
  } else {
    report.coverage = static_cast<double>(report.covered) / static_cast<double>(report.total);
  }
  return report;
}

inline double coverage(const RuleSet& rules, const std::vector<ParseTree>& testset) {
  return evaluate_coverage(rules, testset).coverage;
}

/// Histogram over reduction lengths 1, 2, 3 and >= 4.
struct ReductionStats {
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> percent{};
  std::size_t total = 0;
  bool weighted = false;
  std::size_t skipped_trees = 0;  // weighted mode: trees without a tiling
};

inline std::size_t length_bucket(std::size_t length) {
  return length >= 4 ? 3 : (length == 0 ? 0 : length - 1);
}

/// Unweighted: over distinct rules. Weighted: over rule applications in the
/// preferred tiling of each test tree.
inline ReductionStats reduction_stats(const RuleSet& rules, const std::vector<ParseTree>& testset,
                                      bool weighted) {
  ReductionStats stats;
  stats.weighted = weighted;
  if (!weighted) {
    for (const SpecializedRule& r : rules.rules()) {
      stats.counts[length_bucket(r.reduction_length)] += 1;
    }
  } else {
    Matcher matcher(rules);
    for (const ParseTree& tree : testset) {
      auto tiling = matcher.covers(tree);
      if (!tiling) {
        ++stats.skipped_trees;
        continue;
      }
      for (const RuleApplication& a : tiling->applications) {
        stats.counts[length_bucket(rules.rules()[a.rule_index].reduction_length)] += 1;
      }
    }
  }
  for (std::size_t c : stats.counts) stats.total += c;
  for (std::size_t i = 0; i < 4; ++i) {
    stats.percent[i] = stats.total ? 100.0 * static_cast<double>(stats.counts[i]) /
                                         static_cast<double>(stats.total)
                                   : 0.0;
  }
  return stats;
}

inline std::string render_stats(const ReductionStats& stats) {
  std::string out = std::string("# reduction lengths (%), ") +
                    (stats.weighted ? "weighted by use" : "over rules") + ", n=" +
                    std::to_string(stats.total);
  if (stats.weighted) out += ", untiled trees=" + std::to_string(stats.skipped_trees);
  out += "\n1\t2\t3\t>=4\n";
  for (std::size_t i = 0; i < 4; ++i) {
    if (i) out += "\t";
    out += format_fixed(stats.percent[i], 1);
  }
  out += "\n";
  return out;
}

}  // namespace cutgram
