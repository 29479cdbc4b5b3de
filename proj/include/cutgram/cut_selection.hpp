#pragma once

// Cutnode selection: threshold filtering with closure, neighbour
// restrictions, and the iterated selection used with arc-frequency entropies.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cutgram/andor_index.hpp"
#include "cutgram/cutnodes.hpp"
#include "cutgram/error.hpp"
#include "cutgram/node_entropy.hpp"
#include "cutgram/phrase_entropy.hpp"

namespace cutgram {

struct SelectionConfig {
  EntropyScheme scheme = EntropyScheme::Mixed;
  bool neighbor_restrictions = false;
  int max_iterations = 50;
  double cycle_rho_delta_fraction = 0.10;
};

/// Nodes strictly above `s_min` that dominate some lexical material.
inline std::vector<NodeId> nodes_above(double s_min, const AndOrTree& aot,
                                       const NodeEntropyMap& entropies) {
  std::vector<NodeId> out;
  for (NodeId id = 0; id < aot.size(); ++id) {
    if (entropies[id] > s_min && aot.node(id).has_lexical_yield) out.push_back(id);
  }
  return out;
}

/// For rule `r` with a nonempty RHS: the RHS slot of least phrase entropy,
/// lowest index on ties.
inline std::size_t least_entropy_slot(const GrammarRule& rule, const PhraseEntropyTable& table) {
  std::size_t best = 1;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= rule.rhs.size(); ++k) {
    double v = table.entropy_of(Slot::rhs(rule.id, k));
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  return best;
}

/// Largest member entropy of the class represented by `rep`.
inline double class_entropy(const CutnodeSet& cutnodes, NodeId rep,
                            const NodeEntropyMap& entropies) {
  double best = 0;
  for (NodeId m : cutnodes.members(rep)) best = std::max(best, entropies[m]);
  return best;
}

struct NeighborConflict {
  RuleId rule;
  std::size_t slot = 0;
  NodeId lhs_node = kNoNode;   // node whose arc is `rule`
  NodeId slot_node = kNoNode;  // that arc's child at `slot`
};

/// Neighbouring cut pairs that violate the restriction: an or-node taking
/// arc r is cut and so is its child in r's least-entropy RHS slot.
inline std::vector<NeighborConflict> find_neighbor_conflicts(const CutnodeSet& cutnodes,
                                                             const AndOrTree& aot,
                                                             const PhraseEntropyTable& table,
                                                             const RuleInventory& inv) {
  std::vector<NeighborConflict> out;
  for (const RuleId& id : inv.ids()) {
    const GrammarRule& rule = inv.at(id);
    if (rule.rhs.empty()) continue;
    std::size_t k = least_entropy_slot(rule, table);
    for (NodeId n = 0; n < aot.size(); ++n) {
      if (!cutnodes.is_cut(n)) continue;
      auto child = aot.child(n, id, k);
      if (child && cutnodes.is_cut(*child)) out.push_back(NeighborConflict{id, k, n, *child});
    }
  }
  return out;
}

/// B(N): representatives of the cut classes to remove. Conflicts are handled
/// in (rule, class representative) order; the class with lower entropy (max
/// over members) loses, the slot side on ties, and a conflict inside one
/// class removes that class.
inline std::vector<NodeId> neighbor_conflicts(const CutnodeSet& cutnodes, const AndOrTree& aot,
                                              const PhraseEntropyTable& table,
                                              const RuleInventory& inv,
                                              const NodeEntropyMap& entropies) {
  std::vector<NeighborConflict> conflicts = find_neighbor_conflicts(cutnodes, aot, table, inv);
  std::stable_sort(conflicts.begin(), conflicts.end(), [&](const auto& a, const auto& b) {
    if (a.rule != b.rule) return a.rule < b.rule;
    return cutnodes.class_of(a.lhs_node) < cutnodes.class_of(b.lhs_node);
  });
  std::set<NodeId> removed;
  std::vector<NodeId> order;
  for (const NeighborConflict& c : conflicts) {
    NodeId a = cutnodes.class_of(c.lhs_node);
    NodeId b = cutnodes.class_of(c.slot_node);
    if (removed.count(a) || removed.count(b)) continue;
    NodeId loser = b;
    if (a != b && class_entropy(cutnodes, a, entropies) < class_entropy(cutnodes, b, entropies)) {
      loser = a;
    }
    removed.insert(loser);
    order.push_back(loser);
  }
  return order;
}

/// Closure of `seed`, then repeated removal of neighbour-conflict classes.
/// A removed class bans its seed members, so each round shrinks the seed.
inline CutnodeSet close_with_restrictions(std::vector<NodeId> seed, const AndOrTree& aot,
                                          const PhraseEntropyTable& table,
                                          const RuleInventory& inv,
                                          const NodeEntropyMap& entropies) {
  while (true) {
    CutnodeSet current = closure(seed, aot);
    std::vector<NodeId> losers = neighbor_conflicts(current, aot, table, inv, entropies);
    if (losers.empty()) return current;
    std::set<NodeId> banned_reps(losers.begin(), losers.end());
    std::size_t before = seed.size();
    std::erase_if(seed, [&](NodeId s) { return banned_reps.count(current.class_of(s)) != 0; });
    if (seed.size() == before) {
      throw Error(ErrorKind::InvalidArgument, "conflict class without seed members");
    }
  }
}

/// N(S_min) for the cutnode-independent schemes.
inline CutnodeSet select_by_threshold(double s_min, const AndOrTree& aot,
                                      const PhraseEntropyTable& table, const RuleInventory& inv,
                                      const NodeEntropyMap& entropies,
                                      const SelectionConfig& cfg) {
  std::vector<NodeId> seed = nodes_above(s_min, aot, entropies);
  if (cfg.neighbor_restrictions) {
    return close_with_restrictions(std::move(seed), aot, table, inv, entropies);
  }
  return closure(seed, aot);
}

inline CutnodeSet select_by_threshold(double s_min, const AndOrTree& aot,
                                      const PhraseEntropyTable& table, const RuleInventory& inv,
                                      const SelectionConfig& cfg) {
  if (cfg.scheme == EntropyScheme::ArcFrequency) {
    throw Error(ErrorKind::InvalidArgument, "use select_iterative for arc-frequency entropies");
  }
  return select_by_threshold(s_min, aot, table, inv, compute_node_entropies(aot, table, cfg.scheme),
                             cfg);
}

/// Near-cycle test between two iterates: |A xor B| < fraction * (|A| + |B|).
inline bool near_cycle(const CutnodeSet& a, const CutnodeSet& b, double fraction) {
  double rho = static_cast<double>(symmetric_difference_size(a, b));
  double delta = fraction * static_cast<double>(a.cut_node_count() + b.cut_node_count());
  return rho < delta;
}

struct IterativeSelection {
  CutnodeSet cutnodes;
  int iterations = 0;
  bool exact_fixpoint = false;
  std::vector<std::size_t> iterate_sizes;  // cut node count of N^1..N^i
};

/// Iterated N(S_min) with arc-frequency entropies: N^i is selected using
/// entropies given N^(i-1), starting from N^0 = {}. Stops on a repeated
/// iterate or on the near-cycle criterion, returning the earlier iterate of
/// the near-cycle pair.
inline IterativeSelection select_iterative(double s_min, const AndOrTree& aot,
                                           const PhraseEntropyTable& table,
                                           const RuleInventory& inv, const SelectionConfig& cfg) {
  if (cfg.max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be >= 1");
  std::vector<CutnodeSet> history{CutnodeSet::none(aot)};
  IterativeSelection result;
  for (int i = 1; i <= cfg.max_iterations; ++i) {
    NodeEntropyMap entropies =
        compute_node_entropies(aot, table, EntropyScheme::ArcFrequency, history.back());
    std::vector<NodeId> seed = nodes_above(s_min, aot, entropies);
    CutnodeSet next = cfg.neighbor_restrictions
                          ? close_with_restrictions(std::move(seed), aot, table, inv, entropies)
                          : closure(seed, aot);
    result.iterations = i;
    result.iterate_sizes.push_back(next.cut_node_count());
    for (const CutnodeSet& earlier : history) {
      if (earlier == next) {
        result.cutnodes = std::move(next);
        result.exact_fixpoint = (&earlier == &history.back());
        return result;
      }
    }
    for (const CutnodeSet& earlier : history) {
      if (near_cycle(next, earlier, cfg.cycle_rho_delta_fraction)) {
        result.cutnodes = earlier;
        return result;
      }
    }
    history.push_back(std::move(next));
  }
  const CutnodeSet& last = history.back();
  const CutnodeSet& prev = history[history.size() - 2];
  throw Error(ErrorKind::IterationLimitExceeded,
              "no fixpoint after " + std::to_string(cfg.max_iterations) +
                  " iterations; last two iterates have " + std::to_string(prev.cut_node_count()) +
                  " and " + std::to_string(last.cut_node_count()) + " cut nodes");
}

/// Cut classes as TSV: class representative, category, members with entropies.
inline std::string render_cut_classes(const CutnodeSet& cutnodes, const AndOrTree& aot,
                                      const NodeEntropyMap& entropies) {
  std::string out = "class\tcategory\tmembers\n";
  for (const EquivalenceClass& c : cutnodes.cut_classes()) {
    out += aot.label(c.representative) + "\t" + c.category.str() + "\t";
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      if (i) out += " ";
      out += aot.label(c.members[i]) + "(" + format_fixed(entropies[c.members[i]], 2) + ")";
    }
    out += "\n";
  }
  return out;
}

}  // namespace cutgram
