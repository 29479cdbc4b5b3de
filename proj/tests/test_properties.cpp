// Randomized properties over generated grammars and treebanks. Seeds are
// fixed so failures reproduce.

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "cutgram/cutgram.hpp"
#include "oracles.hpp"

using namespace cutgram;

namespace {

struct Sample {
  RuleInventory inv;
  std::vector<ParseTree> trees;
  AndOrTree aot;
  PhraseEntropyTable table;
};

Sample random_corpus(oracle::Generator& gen, bool with_empty, std::size_t max_trees,
                     std::size_t max_nodes) {
  Sample c;
  c.inv = gen.grammar(with_empty);
  c.trees = gen.treebank(c.inv, static_cast<std::size_t>(gen.uniform(1, static_cast<int>(max_trees))),
                         max_nodes);
  c.aot = index_treebank(c.trees, c.inv);
  c.table = build_phrase_table(c.trees);
  return c;
}

bool subset(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<double> thresholds(const NodeEntropyMap& e) {
  std::vector<double> out{0.0};
  for (double v : e.values) {
    out.push_back(v);
    out.push_back(v + 1e-9);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

// (a) closure idempotence and monotonicity

TEST(PropClosure, IdempotentAndMonotoneOn200Seeds) {
  oracle::Generator gen(1001);
  int checked_against_oracle = 0;
  for (int i = 0; i < 200; ++i) {
    Sample c = random_corpus(gen, i % 3 == 0, 50, 20);
    std::vector<NodeId> x = gen.seed(c.aot, 0.15);
    std::vector<NodeId> y = x;
    for (NodeId extra : gen.seed(c.aot, 0.15)) y.push_back(extra);
    CutnodeSet cx = closure(x, c.aot);
    CutnodeSet cy = closure(y, c.aot);
    CutnodeSet again = closure(cx.cut_nodes(), c.aot);
    ASSERT_EQ(again.cut_nodes(), cx.cut_nodes()) << "case " << i;
    for (NodeId a = 0; a < c.aot.size(); ++a) {
      ASSERT_EQ(again.class_of(a), cx.class_of(a)) << "case " << i;
    }
    ASSERT_TRUE(subset(cx.cut_nodes(), cy.cut_nodes())) << "case " << i;
    for (const EquivalenceClass& k : cx.cut_classes()) {
      for (NodeId m : k.members) ASSERT_EQ(c.aot.node(m).category, k.category);
    }
    if (c.aot.size() <= 80) {
      ASSERT_EQ(cx.cut_nodes(), oracle::naive_closure(x, c.aot).cut) << "case " << i;
      ++checked_against_oracle;
    }
  }
  EXPECT_GT(checked_against_oracle, 20);
}

// (b) selection is antitone in the threshold

TEST(PropAntitone, SelectByThreshold) {
  oracle::Generator gen(2002);
  for (int i = 0; i < 60; ++i) {
    Sample c = random_corpus(gen, i % 2 == 0, 30, 25);
    for (EntropyScheme scheme : {EntropyScheme::RhsLocal, EntropyScheme::Mixed}) {
      SelectionConfig cfg;
      cfg.scheme = scheme;
      NodeEntropyMap e = compute_node_entropies(c.aot, c.table, scheme);
      std::vector<NodeId> previous;
      bool first = true;
      for (double s : thresholds(e)) {
        std::vector<NodeId> now = select_by_threshold(s, c.aot, c.table, c.inv, e, cfg).cut_nodes();
        if (!first) {
          ASSERT_TRUE(subset(now, previous)) << "case " << i << " s=" << s;
        }
        previous = std::move(now);
        first = false;
      }
    }
  }
}

// (c) training self-coverage

TEST(PropSelfCoverage, EveryClosedCutnodeSet) {
  oracle::Generator gen(3003);
  int sets = 0;
  for (int i = 0; i < 120; ++i) {
    Sample c = random_corpus(gen, i % 2 == 1, 40, 25);
    std::vector<CutnodeSet> candidates{CutnodeSet::none(c.aot), closure(gen.seed(c.aot, 0.2), c.aot),
                                       closure(gen.seed(c.aot, 0.6), c.aot)};
    NodeEntropyMap e = compute_node_entropies(c.aot, c.table, EntropyScheme::Mixed);
    SelectionConfig cfg;
    for (double s : {0.0, 0.3, 0.7}) {
      candidates.push_back(select_by_threshold(s, c.aot, c.table, c.inv, e, cfg));
    }
    for (const CutnodeSet& n : candidates) {
      RuleSet rules = extract_training(c.trees, n, c.aot, c.inv);
      ASSERT_EQ(coverage(rules, c.trees), 1.0) << "case " << i;
      ++sets;
    }
  }
  EXPECT_EQ(sets, 720);
}

// (d) the tiler agrees with exhaustive search

TEST(PropBruteForceTiler, AgreesOn500SmallTrees) {
  oracle::Generator gen(4004);
  int covered = 0, uncovered = 0;
  for (int i = 0; i < 500; ++i) {
    RuleInventory inv = gen.grammar(i % 4 == 0);
    ParseTree tree = gen.tree(inv, 12);
    ASSERT_LE(node_count(tree), 12u);
    // rules: random cuts of this tree and of a few neighbours, some dropped
    RuleSet rules;
    std::vector<ParseTree> sources{tree};
    for (int k = 0; k < 3; ++k) sources.push_back(gen.tree(inv, 12));
    for (const ParseTree& src : sources) {
      for (int draw = 0; draw < 2; ++draw) {
        std::vector<bool> mark(node_count(src) - 1);
        for (std::size_t m = 0; m < mark.size(); ++m) mark[m] = gen.chance(0.4);
        for (const std::string& key : oracle::chunk_keys(src, inv, mark)) {
          if (gen.chance(0.25)) continue;
          rules.add(parse_chunk(key, inv));
        }
      }
    }
    auto tiling = covers(rules, tree);
    bool expected = oracle::brute_force_covers(rules, tree, inv);
    ASSERT_EQ(tiling.has_value(), expected) << "case " << i << " tree " << render(tree);
    if (tiling) {
      ASSERT_TRUE(verify_tiling(rules, tree, *tiling)) << "case " << i;
      ++covered;
    } else {
      ++uncovered;
    }
  }
  // both outcomes are exercised
  EXPECT_GT(covered, 50);
  EXPECT_GT(uncovered, 10);
}

// (e) no empty right-hand sides

TEST(PropNoEmptyRhs, CorporaWithEmptyProductions) {
  oracle::Generator gen(5005);
  int with_empty_nodes = 0;
  for (int i = 0; i < 150; ++i) {
    Sample c = random_corpus(gen, true, 30, 25);
    bool has_empty = std::any_of(c.aot.nodes().begin(), c.aot.nodes().end(),
                                 [](const OrNode& n) { return !n.has_lexical_yield; });
    with_empty_nodes += has_empty;
    NodeEntropyMap e = compute_node_entropies(c.aot, c.table, EntropyScheme::Mixed);
    SelectionConfig cfg;
    for (double s : {0.0, 0.2, 0.5}) {
      CutnodeSet n = select_by_threshold(s, c.aot, c.table, c.inv, e, cfg);
      for (const EquivalenceClass& k : n.cut_classes()) {
        ASSERT_TRUE(std::any_of(k.members.begin(), k.members.end(),
                                [&](NodeId m) { return c.aot.node(m).has_lexical_yield; }));
      }
      for (const auto& r : extract_training(c.trees, n, c.aot, c.inv).rules()) {
        ASSERT_GE(r.reduction_length, 1u) << r.key;
      }
      try {
        for (const auto& r : extract_andor(c.aot, n, c.inv, 20000).rules()) {
          ASSERT_GE(r.reduction_length, 1u) << r.key;
        }
      } catch (const Error& err) {
        ASSERT_EQ(err.kind(), ErrorKind::ChunkExplosion);
      }
    }
    // a cut set forced onto every node still never emits an empty rule
    std::vector<NodeId> all;
    for (NodeId id = 1; id < c.aot.size(); ++id) all.push_back(id);
    for (const auto& r : extract_training(c.trees, closure(all, c.aot), c.aot, c.inv).rules()) {
      ASSERT_GE(r.reduction_length, 1u) << r.key;
    }
  }
  EXPECT_GT(with_empty_nodes, 10);
}

// (f) training rules are a subset of the and-or rules

TEST(PropTrainingInAndOr, EveryTestedConfiguration) {
  oracle::Generator gen(6006);
  int compared = 0, exploded = 0;
  for (int i = 0; i < 150; ++i) {
    Sample c = random_corpus(gen, i % 3 == 0, 20, 20);
    std::vector<CutnodeSet> sets{CutnodeSet::none(c.aot), closure(gen.seed(c.aot, 0.3), c.aot)};
    NodeEntropyMap e = compute_node_entropies(c.aot, c.table, EntropyScheme::Mixed);
    SelectionConfig cfg;
    sets.push_back(select_by_threshold(0.5, c.aot, c.table, c.inv, e, cfg));
    for (const CutnodeSet& n : sets) {
      RuleSet training = extract_training(c.trees, n, c.aot, c.inv);
      try {
        RuleSet andor = extract_andor(c.aot, n, c.inv, 20000);
        for (const auto& r : training.rules()) ASSERT_TRUE(andor.contains(r.chunk)) << r.key;
        ++compared;
      } catch (const Error& err) {
        ASSERT_EQ(err.kind(), ErrorKind::ChunkExplosion);
        ++exploded;
      }
    }
  }
  EXPECT_GT(compared, 300);
}

// further invariants

TEST(PropMisc, RenderParseRoundTrip) {
  oracle::Generator gen(7007);
  for (int i = 0; i < 200; ++i) {
    RuleInventory inv = gen.grammar(i % 2 == 0);
    std::vector<ParseTree> trees = gen.treebank(inv, 5, 30);
    ASSERT_EQ(parse_treebank(render_treebank(trees), inv), trees);
  }
}

TEST(PropMisc, MutatedRuleIdIsRejected) {
  oracle::Generator gen(8008);
  int mutated = 0;
  for (int i = 0; i < 300 && mutated < 100; ++i) {
    RuleInventory inv = gen.grammar(false);
    ParseTree tree = gen.tree(inv, 20);
    // swap the first internal child for a rule with a different lhs and equal arity
    std::vector<ParseTree*> stack{&tree};
    while (!stack.empty()) {
      ParseTree* t = stack.back();
      stack.pop_back();
      bool done = false;
      for (ParseTree& child : t->children) {
        if (child.is_lexical()) continue;
        const GrammarRule& r = inv.at(child.rule);
        for (const RuleId& other : inv.ids()) {
          const GrammarRule& o = inv.at(other);
          if (o.lhs != r.lhs && o.rhs == r.rhs) {
            child.rule = other;
            done = true;
            break;
          }
        }
        if (done) break;
        stack.push_back(&child);
      }
      if (done) {
        try {
          parse_treebank(render(tree), inv);
          ADD_FAILURE() << "accepted " << render(tree);
        } catch (const Error& e) {
          ASSERT_EQ(e.kind(), ErrorKind::CategoryMismatch);
        }
        ++mutated;
        break;
      }
    }
  }
  EXPECT_GT(mutated, 20);
}

TEST(PropMisc, IndexAndRulesIgnoreTrainingOrder) {
  oracle::Generator gen(9009);
  for (int i = 0; i < 60; ++i) {
    Sample c = random_corpus(gen, i % 2 == 0, 30, 20);
    std::vector<ParseTree> shuffled = c.trees;
    std::shuffle(shuffled.begin(), shuffled.end(), gen.rng());
    AndOrTree other = index_treebank(shuffled, c.inv);
    ASSERT_EQ(dump_index(other), dump_index(c.aot));
    NodeEntropyMap e = compute_node_entropies(c.aot, c.table, EntropyScheme::Mixed);
    SelectionConfig cfg;
    CutnodeSet n = select_by_threshold(0.4, c.aot, c.table, c.inv, e, cfg);
    CutnodeSet m = select_by_threshold(0.4, other, build_phrase_table(shuffled), c.inv, cfg);
    ASSERT_EQ(write_rule_file(extract_training(c.trees, n, c.aot, c.inv), c.inv),
              write_rule_file(extract_training(shuffled, m, other, c.inv), c.inv));
  }
}

TEST(PropMisc, RestrictedSelectionLeavesNoConflict) {
  oracle::Generator gen(10010);
  for (int i = 0; i < 80; ++i) {
    Sample c = random_corpus(gen, i % 2 == 0, 30, 25);
    NodeEntropyMap e = compute_node_entropies(c.aot, c.table, EntropyScheme::Mixed);
    SelectionConfig cfg;
    cfg.neighbor_restrictions = true;
    for (double s : {0.0, 0.3, 0.6}) {
      CutnodeSet n = select_by_threshold(s, c.aot, c.table, c.inv, e, cfg);
      ASSERT_TRUE(oracle::conflict_pairs(n, c.aot, c.table, c.inv).empty()) << "case " << i;
    }
  }
}

TEST(PropMisc, EntropyBounds) {
  oracle::Generator gen(11011);
  for (int i = 0; i < 60; ++i) {
    Sample c = random_corpus(gen, false, 30, 25);
    NodeEntropyMap local = compute_node_entropies(c.aot, c.table, EntropyScheme::RhsLocal);
    NodeEntropyMap mixed = compute_node_entropies(c.aot, c.table, EntropyScheme::Mixed);
    CutnodeSet n = closure(gen.seed(c.aot, 0.3), c.aot);
    NodeEntropyMap arc = compute_node_entropies(c.aot, c.table, EntropyScheme::ArcFrequency, n);
    for (NodeId id = 0; id < c.aot.size(); ++id) {
      ASSERT_GE(mixed[id], local[id] - 1e-12);
      ASSERT_GE(local[id], 0.0);
      double arcs = static_cast<double>(pooled_arc_counts(c.aot, id, n).size());
      ASSERT_LE(arc[id], std::log(arcs) + 1e-12);
    }
  }
}
