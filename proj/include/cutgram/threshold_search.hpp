#pragma once

// Entropy-threshold search for a target coverage.
//
// The generic searches take an evaluator `threshold -> Probe<Payload>`; the
// `SpecializationProblem` overloads wire that to cut selection, rule
// extraction from the training set and coverage on the test set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "cutgram/andor_index.hpp"
#include "cutgram/coverage.hpp"
#include "cutgram/cut_selection.hpp"
#include "cutgram/error.hpp"
#include "cutgram/node_entropy.hpp"
#include "cutgram/phrase_entropy.hpp"
#include "cutgram/rule_extraction.hpp"

namespace cutgram {

enum class SearchMode { Monotone, Unimodal };

struct BisectionConfig {
  double target_coverage = 0.9;
  double delta_s = 0.01;
  std::optional<double> s_high_init;  // default: max node entropy + 1
  int max_steps = 200;
  SearchMode mode = SearchMode::Monotone;
};

template <class Payload>
struct Probe {
  double threshold = 0;
  Payload payload{};
  double coverage = 0;
};

template <class Payload>
struct SearchOutcome {
  Probe<Payload> best;
  bool attainable = false;
  double upper_threshold = std::numeric_limits<double>::quiet_NaN();
  double upper_coverage = std::numeric_limits<double>::quiet_NaN();  // NaN: never evaluated
  int evaluations = 0;
};

namespace detail {

inline void check_config(const BisectionConfig& cfg, double s_high) {
  if (!(cfg.delta_s > 0)) throw Error(ErrorKind::InvalidArgument, "delta_s must be positive");
  if (!(s_high > 0)) throw Error(ErrorKind::InvalidArgument, "s_high must be positive");
}

/// Bisects [low, high] where `low` already reaches the target.
template <class Payload, class Evaluate>
void bisect_interval(Evaluate& evaluate, double c0, double delta_s, int max_steps, double low,
                     double high, SearchOutcome<Payload>& outcome) {
  int steps = 0;
  while (high - low >= delta_s && steps < max_steps) {
    double mid = (low + high) / 2;
    Probe<Payload> p = evaluate(mid);
    ++outcome.evaluations;
    ++steps;
    if (p.coverage < c0) {
      high = mid;
      outcome.upper_threshold = mid;
      outcome.upper_coverage = p.coverage;
    } else {
      low = mid;
      outcome.best = std::move(p);
    }
  }
}

}  // namespace detail

/// Interval bisection assuming coverage falls as the threshold rises. If even
/// threshold 0 misses the target, reports the threshold-0 probe as
/// unattainable.
template <class Evaluate>
auto bisect_threshold(Evaluate&& evaluate, double s_high, const BisectionConfig& cfg) {
  using P = decltype(evaluate(0.0));
  using Payload = decltype(P::payload);
  detail::check_config(cfg, s_high);
  const double c0 = cfg.target_coverage;
  SearchOutcome<Payload> outcome;
  outcome.best = evaluate(0.0);
  outcome.evaluations = 1;
  if (outcome.best.coverage < c0) {
    outcome.attainable = false;
    return outcome;
  }
  outcome.attainable = true;
  detail::bisect_interval<Payload>(evaluate, c0, cfg.delta_s, cfg.max_steps, 0.0, s_high, outcome);
  return outcome;
}

/// Grid scan with step 16 * delta_s over [0, s_high] to find the coverage
/// maximum, then bisection on the falling flank for the largest threshold
/// that still reaches the target.
template <class Evaluate>
auto search_unimodal(Evaluate&& evaluate, double s_high, const BisectionConfig& cfg) {
  using P = decltype(evaluate(0.0));
  using Payload = decltype(P::payload);
  detail::check_config(cfg, s_high);
  const double c0 = cfg.target_coverage;
  const double step = cfg.delta_s * 16;
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    double t = static_cast<double>(i) * step;
    if (t >= s_high) break;
    grid.push_back(t);
  }
  grid.push_back(s_high);

  SearchOutcome<Payload> outcome;
  std::vector<Probe<Payload>> probes;
  probes.reserve(grid.size());
  for (double t : grid) {
    probes.push_back(evaluate(t));
    ++outcome.evaluations;
  }
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < probes.size(); ++i) {
    if (probes[i].coverage > probes[argmax].coverage) argmax = i;
  }
  if (probes[argmax].coverage < c0) {
    outcome.best = probes[argmax];
    outcome.attainable = false;
    return outcome;
  }
  std::size_t last = argmax;
  while (last + 1 < probes.size() && probes[last + 1].coverage >= c0) ++last;
  outcome.attainable = true;
  outcome.best = probes[last];
  if (last + 1 < probes.size()) {
    outcome.upper_threshold = grid[last + 1];
    outcome.upper_coverage = probes[last + 1].coverage;
    detail::bisect_interval<Payload>(evaluate, c0, cfg.delta_s, cfg.max_steps, grid[last],
                                     grid[last + 1], outcome);
  }
  return outcome;
}

/// Everything the threshold search needs about one corpus.
struct SpecializationProblem {
  const RuleInventory& inventory;
  const std::vector<ParseTree>& training;
  const std::vector<ParseTree>& test;
  const AndOrTree& aot;
  const PhraseEntropyTable& table;
  SelectionConfig selection;
  RuleOrigin origin = RuleOrigin::TrainingCut;

  RuleSet extract(const CutnodeSet& cutnodes) const {
    if (origin == RuleOrigin::AndOrEnum) return extract_andor(aot, cutnodes, inventory);
    return extract_training(training, cutnodes, aot, inventory);
  }

  CutnodeSet select(double threshold, const NodeEntropyMap& entropies) const {
    if (selection.scheme == EntropyScheme::ArcFrequency) {
      return select_iterative(threshold, aot, table, inventory, selection).cutnodes;
    }
    return select_by_threshold(threshold, aot, table, inventory, entropies, selection);
  }

  NodeEntropyMap initial_entropies() const {
    return compute_node_entropies(aot, table, selection.scheme, CutnodeSet::none(aot));
  }

  double coverage_of(const CutnodeSet& cutnodes) const {
    return coverage(extract(cutnodes), test);
  }
};

struct ThresholdResult {
  double threshold = 0;
  CutnodeSet cutnodes;
  double achieved_coverage = 0;
  bool attainable = false;
  double upper_threshold = std::numeric_limits<double>::quiet_NaN();
  double upper_coverage = std::numeric_limits<double>::quiet_NaN();
  int evaluations = 0;
};

namespace detail {

inline ThresholdResult to_result(SearchOutcome<CutnodeSet> outcome) {
  ThresholdResult r;
  r.threshold = outcome.best.threshold;
  r.cutnodes = std::move(outcome.best.payload);
  r.achieved_coverage = outcome.best.coverage;
  r.attainable = outcome.attainable;
  r.upper_threshold = outcome.upper_threshold;
  r.upper_coverage = outcome.upper_coverage;
  r.evaluations = outcome.evaluations;
  return r;
}

}  // namespace detail

inline double default_s_high(const NodeEntropyMap& entropies) {
  double max = 0;
  for (double v : entropies.values) max = std::max(max, v);
  return max + 1.0;
}

/// Monotone bisection for the target coverage (neighbour restrictions off).
inline ThresholdResult bisect(const SpecializationProblem& problem, const BisectionConfig& cfg) {
  NodeEntropyMap entropies = problem.initial_entropies();
  double s_high = cfg.s_high_init.value_or(default_s_high(entropies));
  auto evaluate = [&](double t) {
    CutnodeSet cut = problem.select(t, entropies);
    double cov = problem.coverage_of(cut);
    return Probe<CutnodeSet>{t, std::move(cut), cov};
  };
  return detail::to_result(bisect_threshold(evaluate, s_high, cfg));
}

/// Grid-then-bisect search for non-monotone coverage profiles.
inline ThresholdResult search_unimodal(const SpecializationProblem& problem,
                                       const BisectionConfig& cfg) {
  NodeEntropyMap entropies = problem.initial_entropies();
  double s_high = cfg.s_high_init.value_or(default_s_high(entropies));
  auto evaluate = [&](double t) {
    CutnodeSet cut = problem.select(t, entropies);
    double cov = problem.coverage_of(cut);
    return Probe<CutnodeSet>{t, std::move(cut), cov};
  };
  return detail::to_result(search_unimodal(evaluate, s_high, cfg));
}

inline ThresholdResult find_threshold(const SpecializationProblem& problem,
                                      const BisectionConfig& cfg) {
  return cfg.mode == SearchMode::Unimodal ? search_unimodal(problem, cfg) : bisect(problem, cfg);
}

}  // namespace cutgram
