#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "cutgram/cutgram.hpp"
#include "oracles.hpp"
#include "toy.hpp"

using namespace cutgram;

namespace {

const RuleSet& fig1_rules() {
  static const RuleSet rules = [] {
    const auto& t = toy::get();
    return extract_training(t.train, toy::fig1_cutnodes(), t.aot, t.inv);
  }();
  return rules;
}

std::map<std::string, int> uses(const RuleSet& rules, const Tiling& tiling) {
  std::map<std::string, int> out;
  for (const RuleApplication& a : tiling.applications) {
    out[flat_form(rules.rules()[a.rule_index], toy::get().inv)] += 1;
  }
  return out;
}

RuleSet only(const std::vector<std::string>& forms) {
  RuleSet out;
  for (const auto& r : fig1_rules().rules()) {
    for (const auto& f : forms) {
      if (flat_form(r, toy::get().inv) == f) out.add_rule(r);
    }
  }
  return out;
}

}  // namespace

TEST(Covers, ToyTestTree) {
  const auto& t = toy::get();
  auto tiling = covers(fig1_rules(), t.test[0]);
  ASSERT_TRUE(tiling.has_value());
  EXPECT_TRUE(verify_tiling(fig1_rules(), t.test[0], *tiling));
  std::map<std::string, int> expected{{"S => Pron V NP", 1}, {"NP => NP Prep NP", 2}, {"NP => Det N", 2}};
  EXPECT_EQ(uses(fig1_rules(), *tiling), expected);
  EXPECT_TRUE(oracle::brute_force_covers(fig1_rules(), t.test[0], t.inv));
}

TEST(Covers, EmptyRuleSet) {
  const auto& t = toy::get();
  RuleSet none;
  for (const ParseTree& tree : t.train) EXPECT_FALSE(covers(none, tree).has_value());
}

TEST(Covers, TrainingTreeThree) {
  const auto& t = toy::get();
  auto tiling = covers(fig1_rules(), t.train[2]);
  ASSERT_TRUE(tiling.has_value());
  std::map<std::string, int> expected{{"S => Pron V NP", 1}, {"NP => NP Prep NP", 1}, {"NP => Det N", 2}};
  EXPECT_EQ(uses(fig1_rules(), *tiling), expected);
  EXPECT_TRUE(verify_tiling(fig1_rules(), t.train[2], *tiling));
}

TEST(Covers, PreorderPaths) {
  const auto& t = toy::get();
  auto tiling = covers(fig1_rules(), t.test[0]);
  ASSERT_TRUE(tiling.has_value());
  ASSERT_EQ(tiling->applications.size(), 5u);
  EXPECT_TRUE(tiling->applications[0].path.empty());
  EXPECT_EQ(tiling->applications[1].path, (std::vector<std::size_t>{2, 2}));
}

TEST(VerifyTiling, RejectsBrokenTilings) {
  const auto& t = toy::get();
  Tiling tiling = *covers(fig1_rules(), t.test[0]);
  Tiling missing = tiling;
  missing.applications.pop_back();
  EXPECT_FALSE(verify_tiling(fig1_rules(), t.test[0], missing));
  Tiling wrong = tiling;
  wrong.applications[0].rule_index = (wrong.applications[0].rule_index + 1) % fig1_rules().size();
  EXPECT_FALSE(verify_tiling(fig1_rules(), t.test[0], wrong));
  Tiling duplicated = tiling;
  duplicated.applications.push_back(tiling.applications[1]);
  EXPECT_FALSE(verify_tiling(fig1_rules(), t.test[0], duplicated));
}

TEST(Coverage, ToyValues) {
  const auto& t = toy::get();
  EXPECT_EQ(coverage(fig1_rules(), t.test), 1.0);
  EXPECT_EQ(coverage(only({"S => Det N V Prep NP", "NP => Num"}), t.test), 0.0);
  EXPECT_EQ(coverage(fig1_rules(), t.train), 1.0);
}

TEST(Coverage, EmptyTestSetIsVacuous) {
  CoverageReport r = evaluate_coverage(fig1_rules(), {});
  EXPECT_TRUE(r.vacuous);
  EXPECT_EQ(r.coverage, 1.0);
}

TEST(Coverage, PartialCoverage) {
  const auto& t = toy::get();
  std::vector<ParseTree> trees = t.train;
  trees.push_back(t.test[0]);
  RuleSet rules = extract_training(t.train, CutnodeSet::none(t.aot), t.aot, t.inv);
  CoverageReport r = evaluate_coverage(rules, trees);
  EXPECT_EQ(r.covered, 4u);
  EXPECT_EQ(r.total, 5u);
  EXPECT_DOUBLE_EQ(r.coverage, 0.8);
  EXPECT_EQ(r.verdicts, (std::vector<bool>{true, true, true, true, false}));
}

TEST(Coverage, MonotoneInRuleSet) {
  const auto& t = toy::get();
  RuleSet rules;
  double last = 0;
  for (const auto& r : fig1_rules().rules()) {
    rules.add_rule(r);
    double now = coverage(rules, t.train);
    EXPECT_GE(now, last);
    last = now;
  }
}

TEST(Stats, Fig1Unweighted) {
  ReductionStats s = reduction_stats(fig1_rules(), {}, false);
  EXPECT_EQ(s.counts, (std::array<std::size_t, 4>{1, 1, 2, 1}));
  EXPECT_DOUBLE_EQ(s.percent[0], 20.0);
  EXPECT_DOUBLE_EQ(s.percent[1], 20.0);
  EXPECT_DOUBLE_EQ(s.percent[2], 40.0);
  EXPECT_DOUBLE_EQ(s.percent[3], 20.0);
}

TEST(Stats, SingleUnitRule) {
  ReductionStats s = reduction_stats(only({"NP => Num"}), {}, false);
  EXPECT_DOUBLE_EQ(s.percent[0], 100.0);
}

TEST(Stats, WeightedToyTiling) {
  const auto& t = toy::get();
  ReductionStats s = reduction_stats(fig1_rules(), t.test, true);
  EXPECT_EQ(s.total, 5u);
  EXPECT_DOUBLE_EQ(s.percent[0], 0.0);
  EXPECT_DOUBLE_EQ(s.percent[1], 40.0);
  EXPECT_DOUBLE_EQ(s.percent[2], 60.0);
  EXPECT_DOUBLE_EQ(s.percent[3], 0.0);
  EXPECT_EQ(s.skipped_trees, 0u);
  double sum = 0;
  for (double p : s.percent) sum += p;
  EXPECT_NEAR(sum, 100.0, 0.1);
}

TEST(Stats, WeightedSkipsUntiledTrees) {
  const auto& t = toy::get();
  ReductionStats s = reduction_stats(only({"NP => Num"}), t.test, true);
  EXPECT_EQ(s.skipped_trees, 1u);
  EXPECT_EQ(s.total, 0u);
}

TEST(Stats, Rendering) {
  std::string text = render_stats(reduction_stats(fig1_rules(), {}, false));
  EXPECT_NE(text.find("1\t2\t3\t>=4\n20.0\t20.0\t40.0\t20.0\n"), std::string::npos);
}

TEST(Buckets, Lengths) {
  EXPECT_EQ(length_bucket(1), 0u);
  EXPECT_EQ(length_bucket(3), 2u);
  EXPECT_EQ(length_bucket(4), 3u);
  EXPECT_EQ(length_bucket(9), 3u);
}
