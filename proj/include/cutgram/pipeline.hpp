#pragma once

// End-to-end specialization run: load, index, score, select, extract,
// evaluate, and render every report in memory before anything is written.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cutgram/andor_index.hpp"
#include "cutgram/coverage.hpp"
#include "cutgram/cut_selection.hpp"
#include "cutgram/error.hpp"
#include "cutgram/grammar.hpp"
#include "cutgram/node_entropy.hpp"
#include "cutgram/phrase_entropy.hpp"
#include "cutgram/rule_extraction.hpp"
#include "cutgram/threshold_search.hpp"

namespace cutgram {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Prefixes errors from parsing `path` with the file name.
template <class F>
auto with_file(const std::filesystem::path& path, F&& parse) {
  try {
    return parse(read_text_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.message(), e.line());
  }
}

struct Corpus {
  RuleInventory inventory;
  std::vector<ParseTree> training;
  std::vector<ParseTree> test;
};

/// Reads and validates all three inputs; `test` may be empty to skip it.
inline Corpus load_corpus(const std::filesystem::path& grammar, const std::filesystem::path& train,
                          const std::filesystem::path& test, const std::string& top,
                          bool strict = false) {
  Corpus c;
  c.inventory = with_file(grammar, [&](const std::string& text) {
    return parse_rule_inventory(text, Category{top}, strict);
  });
  c.training = with_file(train, [&](const std::string& text) {
    return parse_treebank(text, c.inventory);
  });
  if (!test.empty()) {
    c.test = with_file(test, [&](const std::string& text) {
      return parse_treebank(text, c.inventory);
    });
  }
  return c;
}

struct PipelineConfig {
  std::filesystem::path grammar;
  std::filesystem::path training;
  std::filesystem::path test;
  std::string top = "s";
  bool strict = false;
  EntropyScheme scheme = EntropyScheme::Mixed;
  bool neighbor_restrictions = false;
  double target_coverage = 0.9;
  double delta_s = 0.01;
  std::optional<double> threshold;  // fixed threshold: skip the search
  SearchMode search = SearchMode::Monotone;
  RuleOrigin mode = RuleOrigin::TrainingCut;
  std::filesystem::path out_dir;
};

struct PipelineResult {
  int status = 0;  // 0 ok, 2 target coverage unattainable
  std::map<std::string, std::string> reports;  // file name -> contents
  double threshold = 0;
  double coverage = 0;
  std::size_t rule_count = 0;
};

inline std::string provenance(const PipelineConfig& cfg) {
  std::string out = "# cutgram scheme=" + std::string(to_string(cfg.scheme)) +
                    " neighbor_restrictions=" + (cfg.neighbor_restrictions ? "on" : "off") +
                    " mode=" + std::string(to_string(cfg.mode));
  if (cfg.threshold) {
    out += " threshold=" + format_fixed(*cfg.threshold, 4);
  } else {
    out += " target_coverage=" + format_fixed(cfg.target_coverage, 4) +
           " delta_s=" + format_fixed(cfg.delta_s, 4) +
           " search=" + (cfg.search == SearchMode::Unimodal ? "unimodal" : "monotone");
  }
  return out + "\n";
}

inline std::string render_coverage(const CoverageReport& report) {
  std::string out = "# coverage " + format_fixed(report.coverage, 4) + " (" +
                    std::to_string(report.covered) + "/" + std::to_string(report.total) + ")";
  if (report.vacuous) out += " empty test set";
  out += "\ntree\tcovered\n";
  for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
    out += std::to_string(i + 1) + "\t" + (report.verdicts[i] ? "yes" : "no") + "\n";
  }
  return out;
}

/// Computes every report; throws on invalid input. Nothing touches the disk.
inline PipelineResult compute_pipeline(const PipelineConfig& cfg) {
  Corpus corpus = load_corpus(cfg.grammar, cfg.training, cfg.test, cfg.top, cfg.strict);
  AndOrTree aot = index_treebank(corpus.training, corpus.inventory);
  PhraseEntropyTable table = build_phrase_table(corpus.training);

  SelectionConfig selection;
  selection.scheme = cfg.scheme;
  selection.neighbor_restrictions = cfg.neighbor_restrictions;
  SpecializationProblem problem{corpus.inventory, corpus.training, corpus.test, aot,
                                table,            selection,       cfg.mode};

  NodeEntropyMap entropies = problem.initial_entropies();
  PipelineResult result;
  const std::string head = provenance(cfg);
  std::string threshold_report = head;
  CutnodeSet cutnodes;
  if (cfg.threshold) {
    result.threshold = *cfg.threshold;
    cutnodes = problem.select(*cfg.threshold, entropies);
    threshold_report += "threshold\t" + format_fixed(result.threshold, 6) + "\nsearch\tfixed\n";
  } else {
    BisectionConfig bc;
    bc.target_coverage = cfg.target_coverage;
    bc.delta_s = cfg.delta_s;
    bc.mode = cfg.search;
    ThresholdResult found = find_threshold(problem, bc);
    result.threshold = found.threshold;
    cutnodes = found.cutnodes;
    if (!found.attainable) result.status = 2;
    threshold_report += "threshold\t" + format_fixed(found.threshold, 6) + "\n";
    threshold_report += std::string("attainable\t") + (found.attainable ? "yes" : "no") + "\n";
    threshold_report += "achieved_coverage\t" + format_fixed(found.achieved_coverage, 4) + "\n";
    if (!std::isnan(found.upper_threshold)) {
      threshold_report += "upper_threshold\t" + format_fixed(found.upper_threshold, 6) + "\n";
      threshold_report += "upper_coverage\t" + format_fixed(found.upper_coverage, 4) + "\n";
    }
    threshold_report += "evaluations\t" + std::to_string(found.evaluations) + "\n";
  }
  if (cfg.scheme == EntropyScheme::ArcFrequency) {
    entropies = compute_node_entropies(aot, table, cfg.scheme, cutnodes);
  }
  RuleSet rules = problem.extract(cutnodes);
  if (cfg.mode == RuleOrigin::AndOrEnum) {
    rules.take_support_from(extract_training(corpus.training, cutnodes, aot, corpus.inventory));
  }
  CoverageReport cov = evaluate_coverage(rules, corpus.test);
  threshold_report += "cut_classes\t" + std::to_string(cutnodes.cut_classes().size()) + "\n";
  threshold_report += "rules\t" + std::to_string(rules.size()) + "\n";

  result.coverage = cov.coverage;
  result.rule_count = rules.size();
  result.reports["entropy_table.tsv"] = head + render_phrase_table(table, corpus.inventory);
  result.reports["node_entropies.tsv"] = head + render_node_entropies(aot, entropies);
  result.reports["threshold.txt"] = threshold_report;
  result.reports["cut_classes.tsv"] = head + render_cut_classes(cutnodes, aot, entropies);
  result.reports["rules.txt"] = head + write_rule_file(rules, corpus.inventory);
  result.reports["coverage.tsv"] = head + render_coverage(cov);
  result.reports["stats.tsv"] = head + render_stats(reduction_stats(rules, corpus.test, false)) +
                                render_stats(reduction_stats(rules, corpus.test, true));
  return result;
}

inline void write_reports(const std::filesystem::path& dir,
                          const std::map<std::string, std::string>& reports) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, text] : reports) {
    std::ofstream out(dir / name, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir / name).string());
  }
}

/// compute_pipeline, then writes the reports to cfg.out_dir.
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  PipelineResult result = compute_pipeline(cfg);
  write_reports(cfg.out_dir, result.reports);
  return result;
}

}  // namespace cutgram
