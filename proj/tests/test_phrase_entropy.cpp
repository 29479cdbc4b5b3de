#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "cutgram/cutgram.hpp"
#include "toy.hpp"

using namespace cutgram;

namespace {

// -sum p ln p written out for explicit count lists.
double oracle_entropy(const std::vector<double>& counts) {
  double total = 0;
  for (double c : counts) total += c;
  double s = 0;
  for (double c : counts) s += -(c / total) * std::log(c / total);
  return s;
}

double cell(const char* rule, std::size_t k) {
  return toy::get().table.entropy_of(Slot{RuleId{rule}, k});
}

}  // namespace

TEST(Entropy, UniformIsLogOfStates) {
  CountDistribution d;
  d.add("a");
  d.add("b");
  d.add("c");
  EXPECT_NEAR(entropy(d), std::log(3.0), 1e-12);
}

TEST(Entropy, TwoToOne) {
  CountDistribution d;
  d.add("a", 2);
  d.add("b", 1);
  EXPECT_NEAR(entropy(d), 0.6365, 5e-5);
  EXPECT_NEAR(entropy(d), -2.0 / 3 * std::log(2.0 / 3) - 1.0 / 3 * std::log(1.0 / 3), 1e-12);
}

TEST(Entropy, SingleOutcomeIsZero) {
  CountDistribution d;
  d.add("a", 5);
  EXPECT_EQ(entropy(d), 0.0);
}

TEST(Entropy, RejectsNonPositiveCounts) {
  CountDistribution d;
  EXPECT_THROW(d.add("a", 0), Error);
}

TEST(Entropy, ScaleInvariant) {
  std::vector<long> base{3, 1, 4, 1, 5};
  for (long m : {2L, 7L, 100L}) {
    std::vector<long> scaled;
    for (long c : base) scaled.push_back(c * m);
    EXPECT_NEAR(entropy_of_counts(scaled), entropy_of_counts(base), 1e-12);
  }
}

TEST(PhraseTable, NamedCells) {
  // pp_prep_np LHS: np_np_pp#2 twice, vp_vp_pp#2 once
  EXPECT_NEAR(cell("pp_prep_np", 0), oracle_entropy({2, 1}), 1e-12);
  // pp_prep_np RHS 2: np_det_n, np_num, lex once each
  EXPECT_NEAR(cell("pp_prep_np", 2), oracle_entropy({1, 1, 1}), 1e-12);
  // np_det_n LHS: s_np_vp#1, vp_v_np#2, np_np_pp#1 twice, pp_prep_np#2
  EXPECT_NEAR(cell("np_det_n", 0), oracle_entropy({1, 1, 2, 1}), 1e-12);
  EXPECT_NEAR(cell("s_np_vp", 1), oracle_entropy({3, 1}), 1e-12);
  EXPECT_EQ(cell("np_pron", 1), 0.0);
}

TEST(PhraseTable, DistributionsAreKeyedByPosition) {
  const CountDistribution* d = toy::get().table.distribution(Slot::lhs(RuleId{"pp_prep_np"}));
  ASSERT_NE(d, nullptr);
  std::map<std::string, long> expected{{"np_np_pp#2", 2}, {"vp_vp_pp#2", 1}};
  EXPECT_EQ(d->counts(), expected);
  const CountDistribution* root = toy::get().table.distribution(Slot::lhs(RuleId{"s_np_vp"}));
  ASSERT_NE(root, nullptr);
  EXPECT_EQ(root->counts().at(kRootContext), 4);
}

TEST(PhraseTable, PaperTableToTwoDecimals) {
  struct Row {
    const char* rule;
    std::vector<double> cells;
  };
  const std::vector<Row> rows{
      {"s_np_vp", {0.00, 0.56, 0.56}},  {"np_np_pp", {0.00, 0.00, 0.00}},
      {"np_det_n", {1.33, 0.00, 0.00}}, {"np_pron", {0.00, 0.00}},
      {"np_num", {0.00, 0.00}},         {"vp_vp_pp", {0.00, 0.00, 0.00}},
      {"vp_v_np", {0.00, 0.00, 0.64}},  {"vp_v", {0.00, 0.00}},
      {"pp_prep_np", {0.64, 0.00, 1.10}}};
  int checked = 0;
  for (const Row& row : rows) {
    for (std::size_t k = 0; k < row.cells.size(); ++k) {
      double rounded = std::round(cell(row.rule, k) * 100) / 100;
      EXPECT_NEAR(rounded, row.cells[k], 0.005) << row.rule << " slot " << k;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 24);
}

TEST(PhraseTable, AlwaysLexSlotsAreZero) {
  const auto& t = toy::get();
  for (const auto& [slot, dist] : t.table.distributions()) {
    if (slot.is_lhs()) continue;
    if (dist.outcomes() == 1 && dist.counts().begin()->first == "lex") {
      EXPECT_EQ(t.table.entropy_of(slot), 0.0);
    }
  }
}

TEST(PhraseTable, BoundedByLogOfOutcomes) {
  for (const auto& [slot, dist] : toy::get().table.distributions()) {
    double s = toy::get().table.entropy_of(slot);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, std::log(static_cast<double>(dist.outcomes())) + 1e-12);
  }
}

TEST(PhraseTable, UnseenSlotsAreFlagged) {
  auto e = toy::get().table.lookup(Slot::rhs(RuleId{"np_pron"}, 2));
  EXPECT_FALSE(e.seen);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_TRUE(toy::get().table.lookup(Slot::lhs(RuleId{"np_pron"})).seen);
}

TEST(PhraseTable, EmptyTrainingSetIsRejected) {
  EXPECT_THROW(build_phrase_table({}), Error);
}

TEST(PhraseTable, RenderedLayout) {
  const auto& t = toy::get();
  std::string text = render_phrase_table(t.table, t.inv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "rule\tLHS\t1st RHS\t2nd RHS");
  EXPECT_NE(text.find("pp_prep_np\t0.64\t0.00\t1.10\n"), std::string::npos);
  EXPECT_NE(text.find("np_pron\t0.00\t0.00\t---\n"), std::string::npos);
}

TEST(Formatting, Ordinals) {
  EXPECT_EQ(ordinal(1), "1st");
  EXPECT_EQ(ordinal(2), "2nd");
  EXPECT_EQ(ordinal(3), "3rd");
  EXPECT_EQ(ordinal(11), "11th");
  EXPECT_EQ(ordinal(22), "22nd");
  EXPECT_EQ(format_fixed(-0.0001, 2), "0.00");
}
