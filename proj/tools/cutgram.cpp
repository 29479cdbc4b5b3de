// cutgram: entropy-threshold grammar specialization from a treebank.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cutgram/cutgram.hpp"

namespace {

using namespace cutgram;

struct Inputs {
  std::string grammar;
  std::string train;
  std::string test;
  std::string top;
  bool strict = false;
};

struct Selection {
  std::string scheme = "mixed";
  bool neighbor_restrictions = false;
};

void add_inputs(CLI::App* cmd, Inputs& in, bool need_train, bool need_test) {
  cmd->add_option("--grammar", in.grammar, "grammar file")->required()->check(CLI::ExistingFile);
  auto* train = cmd->add_option("--train", in.train, "training treebank")->check(CLI::ExistingFile);
  if (need_train) train->required();
  auto* test = cmd->add_option("--test", in.test, "test treebank")->check(CLI::ExistingFile);
  if (need_test) test->required();
  cmd->add_option("--top", in.top, "root category of the grammar")->required();
  cmd->add_flag("--strict", in.strict, "check rule ids against their definitions");
}

void add_selection(CLI::App* cmd, Selection& sel) {
  cmd->add_option("--scheme", sel.scheme, "node entropy scheme")
      ->check(CLI::IsMember({"rhs-local", "mixed", "arc-freq"}));
  cmd->add_flag("--neighbor-restrictions", sel.neighbor_restrictions,
                "drop classes that cut a rule next to its least-entropy slot");
}

SelectionConfig selection_config(const Selection& sel) {
  SelectionConfig cfg;
  cfg.scheme = parse_scheme(sel.scheme);
  cfg.neighbor_restrictions = sel.neighbor_restrictions;
  return cfg;
}

RuleOrigin parse_mode(const std::string& mode) {
  return mode == "andor" ? RuleOrigin::AndOrEnum : RuleOrigin::TrainingCut;
}

// Everything derived from the training set.
struct Indexed {
  Corpus corpus;
  AndOrTree aot;
  PhraseEntropyTable table;
};

Indexed load(const Inputs& in) {
  Indexed x;
  x.corpus = load_corpus(in.grammar, in.train, in.test, in.top, in.strict);
  x.aot = index_treebank(x.corpus.training, x.corpus.inventory);
  x.table = build_phrase_table(x.corpus.training);
  return x;
}

RuleSet load_rules(const std::string& path, const RuleInventory& inv) {
  return with_file(path, [&](const std::string& text) { return read_rule_file(text, inv); });
}

void print_threshold(const ThresholdResult& r, std::size_t rule_count) {
  std::printf("threshold\t%.6f\n", r.threshold);
  std::printf("attainable\t%s\n", r.attainable ? "yes" : "no");
  std::printf("achieved_coverage\t%.4f\n", r.achieved_coverage);
  std::printf("cut_classes\t%zu\n", r.cutnodes.cut_classes().size());
  std::printf("rules\t%zu\n", rule_count);
  std::printf("evaluations\t%d\n", r.evaluations);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grammar specialization by entropy-threshold tree cutting"};
  app.require_subcommand(1);

  Inputs in;
  Selection sel;
  double threshold = 0;
  double target = 0.9;
  double delta_s = 0.01;
  bool unimodal = false;
  bool dump = false;
  bool weighted = false;
  std::string mode = "training";
  std::string rules_path;
  std::string output;
  std::string out_dir;
  std::optional<double> fixed_threshold;

  auto* table_cmd = app.add_subcommand("entropy-table", "phrase entropy table (TSV)");
  add_inputs(table_cmd, in, true, false);

  auto* index_cmd = app.add_subcommand("index", "and-or tree of the training set");
  add_inputs(index_cmd, in, true, false);
  index_cmd->add_flag("--dump", dump, "print the tree as indented text");

  auto* entropy_cmd = app.add_subcommand("entropy", "node entropies (TSV)");
  add_inputs(entropy_cmd, in, true, false);
  add_selection(entropy_cmd, sel);

  auto* cut_cmd = app.add_subcommand("cut", "cut classes at a threshold");
  add_inputs(cut_cmd, in, true, false);
  add_selection(cut_cmd, sel);
  cut_cmd->add_option("--threshold", threshold, "minimum node entropy")->required();

  auto* bisect_cmd = app.add_subcommand("bisect", "search the threshold for a target coverage");
  add_inputs(bisect_cmd, in, true, true);
  add_selection(bisect_cmd, sel);
  bisect_cmd->add_option("--coverage", target, "target coverage")->required()->check(CLI::Range(0.0, 1.0));
  bisect_cmd->add_option("--delta-s", delta_s, "bisection resolution")->check(CLI::PositiveNumber);
  bisect_cmd->add_flag("--unimodal", unimodal, "grid scan before bisecting");
  bisect_cmd->add_option("--mode", mode, "rule extraction")->check(CLI::IsMember({"training", "andor"}));

  auto* extract_cmd = app.add_subcommand("extract", "specialized rules at a threshold");
  add_inputs(extract_cmd, in, true, false);
  add_selection(extract_cmd, sel);
  extract_cmd->add_option("--threshold", threshold, "minimum node entropy")->required();
  extract_cmd->add_option("--mode", mode, "rule extraction")->check(CLI::IsMember({"training", "andor"}));
  extract_cmd->add_option("-o,--output", output, "rule file to write (default stdout)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "coverage of a rule file on a test set");
  add_inputs(evaluate_cmd, in, false, true);
  evaluate_cmd->add_option("--rules", rules_path, "rule file")->required()->check(CLI::ExistingFile);

  auto* stats_cmd = app.add_subcommand("stats", "reduction length histogram of a rule file");
  add_inputs(stats_cmd, in, false, false);
  stats_cmd->add_option("--rules", rules_path, "rule file")->required()->check(CLI::ExistingFile);
  stats_cmd->add_flag("--weighted", weighted, "count rule applications in test tilings");

  auto* run_cmd = app.add_subcommand("run", "full pipeline, reports written to --out");
  add_inputs(run_cmd, in, true, true);
  add_selection(run_cmd, sel);
  auto* run_cov = run_cmd->add_option("--coverage", target, "target coverage")->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--threshold", fixed_threshold, "fixed threshold instead of a search")
      ->excludes(run_cov);
  run_cmd->add_option("--delta-s", delta_s, "bisection resolution")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--unimodal", unimodal, "grid scan before bisecting");
  run_cmd->add_option("--mode", mode, "rule extraction")->check(CLI::IsMember({"training", "andor"}));
  run_cmd->add_option("--out", out_dir, "report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*table_cmd) {
      Indexed x = load(in);
      std::cout << render_phrase_table(x.table, x.corpus.inventory);
    } else if (*index_cmd) {
      Indexed x = load(in);
      if (dump) {
        std::cout << dump_index(x.aot);
      } else {
        std::cout << "or-nodes\t" << x.aot.size() << "\n";
      }
    } else if (*entropy_cmd) {
      Indexed x = load(in);
      SelectionConfig cfg = selection_config(sel);
      NodeEntropyMap entropies = compute_node_entropies(x.aot, x.table, cfg.scheme);
      std::cout << render_node_entropies(x.aot, entropies);
    } else if (*cut_cmd || *extract_cmd) {
      Indexed x = load(in);
      SelectionConfig cfg = selection_config(sel);
      SpecializationProblem problem{x.corpus.inventory, x.corpus.training, x.corpus.test, x.aot,
                                    x.table,            cfg,               parse_mode(mode)};
      NodeEntropyMap entropies = problem.initial_entropies();
      CutnodeSet cutnodes = problem.select(threshold, entropies);
      if (*cut_cmd) {
        if (cfg.scheme == EntropyScheme::ArcFrequency) {
          entropies = compute_node_entropies(x.aot, x.table, cfg.scheme, cutnodes);
        }
        std::cout << render_cut_classes(cutnodes, x.aot, entropies);
      } else {
        std::string text = write_rule_file(problem.extract(cutnodes), x.corpus.inventory);
        if (output.empty()) {
          std::cout << text;
        } else {
          write_reports(std::filesystem::path(output).parent_path().empty()
                            ? std::filesystem::path(".")
                            : std::filesystem::path(output).parent_path(),
                        {{std::filesystem::path(output).filename().string(), text}});
        }
      }
    } else if (*bisect_cmd) {
      Indexed x = load(in);
      SpecializationProblem problem{x.corpus.inventory, x.corpus.training, x.corpus.test, x.aot,
                                    x.table,            selection_config(sel), parse_mode(mode)};
      BisectionConfig bc;
      bc.target_coverage = target;
      bc.delta_s = delta_s;
      bc.mode = unimodal ? SearchMode::Unimodal : SearchMode::Monotone;
      ThresholdResult r = find_threshold(problem, bc);
      print_threshold(r, problem.extract(r.cutnodes).size());
      return r.attainable ? 0 : 2;
    } else if (*evaluate_cmd) {
      Corpus corpus = load_corpus(in.grammar, in.train, in.test, in.top, in.strict);
      RuleSet rules = load_rules(rules_path, corpus.inventory);
      std::cout << render_coverage(evaluate_coverage(rules, corpus.test));
      std::cout << render_stats(reduction_stats(rules, corpus.test, false));
      std::cout << render_stats(reduction_stats(rules, corpus.test, true));
    } else if (*stats_cmd) {
      if (weighted && in.test.empty()) {
        std::cerr << "error: --weighted needs --test\n";
        return 1;
      }
      Corpus corpus = load_corpus(in.grammar, in.train, in.test, in.top, in.strict);
      RuleSet rules = load_rules(rules_path, corpus.inventory);
      std::cout << render_stats(reduction_stats(rules, corpus.test, weighted));
    } else if (*run_cmd) {
      PipelineConfig cfg;
      cfg.grammar = in.grammar;
      cfg.training = in.train;
      cfg.test = in.test;
      cfg.top = in.top;
      cfg.strict = in.strict;
      cfg.scheme = parse_scheme(sel.scheme);
      cfg.neighbor_restrictions = sel.neighbor_restrictions;
      cfg.target_coverage = target;
      cfg.delta_s = delta_s;
      cfg.threshold = fixed_threshold;
      cfg.search = unimodal ? SearchMode::Unimodal : SearchMode::Monotone;
      cfg.mode = parse_mode(mode);
      cfg.out_dir = out_dir;
      PipelineResult r = run_pipeline(cfg);
      std::printf("threshold\t%.6f\ncoverage\t%.4f\nrules\t%zu\n", r.threshold, r.coverage,
                  r.rule_count);
      if (r.status == 2) std::fprintf(stderr, "target coverage not attainable\n");
      return r.status;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
