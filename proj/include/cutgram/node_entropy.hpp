#pragma once

// Entropy of and-or tree nodes under three schemes:
//   RHS_LOCAL      phrase entropy of the dominating RHS slot;
//   MIXED          that, plus the arc-frequency-weighted LHS phrase entropies
//                  of the rules chosen at the node (lex arcs weigh 0);
//   ARC_FREQUENCY  entropy of the arc distribution, pooled over the node's
//                  equivalence class under the current cutnode set.

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cutgram/andor_index.hpp"
#include "cutgram/cutnodes.hpp"
#include "cutgram/error.hpp"
#include "cutgram/phrase_entropy.hpp"

namespace cutgram {

enum class EntropyScheme { RhsLocal, Mixed, ArcFrequency };

inline std::string_view to_string(EntropyScheme scheme) {
  switch (scheme) {
    case EntropyScheme::RhsLocal: return "rhs-local";
    case EntropyScheme::Mixed: return "mixed";
    case EntropyScheme::ArcFrequency: return "arc-freq";
  }
  return "?";
}

inline EntropyScheme parse_scheme(std::string_view name) {
  if (name == "rhs-local") return EntropyScheme::RhsLocal;
  if (name == "mixed") return EntropyScheme::Mixed;
  if (name == "arc-freq") return EntropyScheme::ArcFrequency;
  throw Error(ErrorKind::InvalidArgument, "unknown entropy scheme '" + std::string(name) + "'");
}

struct NodeEntropyMap {
  std::vector<double> values;  // indexed by NodeId
  EntropyScheme scheme = EntropyScheme::Mixed;

  double operator[](NodeId id) const { return values.at(id); }
};

inline double node_entropy_rhs_local(const AndOrTree& aot, NodeId id,
                                     const PhraseEntropyTable& table) {
  const OrNode& n = aot.node(id);
  if (n.is_root()) throw Error(ErrorKind::RootHasNoParent, "the root has no dominating slot");
  return table.entropy_of(Slot::rhs(n.parent_rule, n.parent_position));
}

/// Weighted LHS part of the mixed entropy: sum over arcs of
/// (arc count / visit count) * entropy(LHS of arc rule).
inline double weighted_lhs_entropy(const OrNode& n, const PhraseEntropyTable& table) {
  double sum = 0;
  for (const auto& [rule, arc] : n.arcs) {
    if (rule == lex_rule()) continue;
    double weight = static_cast<double>(arc.count) / static_cast<double>(n.visit_count);
    sum += weight * table.entropy_of(Slot::lhs(rule));
  }
  return sum;
}

inline double node_entropy_mixed(const AndOrTree& aot, NodeId id,
                                 const PhraseEntropyTable& table) {
  return node_entropy_rhs_local(aot, id, table) + weighted_lhs_entropy(aot.node(id), table);
}

/// Arc counts pooled over every member of `id`'s class in `cutnodes`.
inline std::map<RuleId, long> pooled_arc_counts(const AndOrTree& aot, NodeId id,
                                                const CutnodeSet& cutnodes) {
  std::map<RuleId, long> counts;
  for (NodeId m : cutnodes.members(cutnodes.class_of(id))) {
    for (const auto& [rule, arc] : aot.node(m).arcs) counts[rule] += arc.count;
  }
  return counts;
}

inline double node_entropy_arc_frequency(const AndOrTree& aot, NodeId id,
                                         const CutnodeSet& cutnodes) {
  std::vector<long> counts;
  for (const auto& [rule, count] : pooled_arc_counts(aot, id, cutnodes)) counts.push_back(count);
  return entropy_of_counts(counts);
}

/// Entropy of every or-node. The root is 0 under RHS_LOCAL and MIXED.
/// `cutnodes` is only consulted for ARC_FREQUENCY.
inline NodeEntropyMap compute_node_entropies(const AndOrTree& aot, const PhraseEntropyTable& table,
                                             EntropyScheme scheme,
                                             const CutnodeSet& cutnodes = {}) {
  NodeEntropyMap out;
  out.scheme = scheme;
  out.values.resize(aot.size(), 0.0);
  for (NodeId id = 0; id < aot.size(); ++id) {
    switch (scheme) {
      case EntropyScheme::RhsLocal:
        if (!aot.node(id).is_root()) out.values[id] = node_entropy_rhs_local(aot, id, table);
        break;
      case EntropyScheme::Mixed:
        if (!aot.node(id).is_root()) out.values[id] = node_entropy_mixed(aot, id, table);
        break;
      case EntropyScheme::ArcFrequency:
        out.values[id] = node_entropy_arc_frequency(aot, id, cutnodes);
        break;
    }
  }
  return out;
}

/// Sum of the entropies of an RHS slot and the LHS of the rule unified into it.
inline double unified_node_entropy(const Slot& parent_slot, const RuleId& child_rule,
                                   const PhraseEntropyTable& table, const RuleInventory& inv) {
  if (parent_slot.is_lhs()) {
    throw Error(ErrorKind::InvalidArgument, "unified entropy needs an RHS slot");
  }
  const GrammarRule& parent = inv.at(parent_slot.rule);
  if (parent_slot.position > parent.rhs.size()) {
    throw Error(ErrorKind::InvalidArgument, "slot position beyond rule arity");
  }
  const Category& expected = parent.rhs[parent_slot.position - 1];
  if (inv.at(child_rule).lhs != expected) {
    throw Error(ErrorKind::CategoryMismatch, "rule '" + child_rule.str() +
                                                 "' cannot fill a slot of category " +
                                                 expected.str());
  }
  return table.entropy_of(parent_slot) + table.entropy_of(Slot::lhs(child_rule));
}

/// Generalised branching factor e^s.
inline double local_perplexity(double s) {
  if (s < 0) throw Error(ErrorKind::InvalidArgument, "entropy must be nonnegative");
  return std::exp(s);
}

inline std::string render_node_entropies(const AndOrTree& aot, const NodeEntropyMap& entropies) {
  std::string out = "node\tcategory\tentropy\n";
  for (NodeId id = 0; id < aot.size(); ++id) {
    out += aot.label(id) + "\t" + aot.node(id).category.str() + "\t" +
           format_fixed(entropies[id], 4) + "\n";
  }
  return out;
}

}  // namespace cutgram
