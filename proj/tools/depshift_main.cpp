// depshift: rank lexical semantic change between two dependency-parsed
// corpora by per-slot Jensen-Shannon divergence.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depshift/pipeline.hpp"
#include "depshift/synth.hpp"

namespace ds = depshift;

namespace {

struct ExtractArgs {
  std::string corpus;
  int period = 1;
  std::string output;
};

struct AnalyzeArgs {
  std::string profiles1;
  std::string profiles2;
};

struct EvaluateArgs {
  std::string scores;
  std::string labels;
};

struct InspectArgs {
  std::string report;
  std::string target;
  std::string slot;
  std::vector<std::string> fillers;
  std::string output;
};

struct ClassifyArgs {
  std::string scores;
};

void add_target_flags(CLI::App* cmd, ds::RunConfig& c) {
  static const std::map<std::string, ds::TargetFormat> formats = {
      {"plain", ds::TargetFormat::plain}, {"semeval", ds::TargetFormat::semeval}};
  static const std::map<std::string, ds::Mode> modes = {{"se", ds::Mode::se}, {"sz", ds::Mode::sz}};
  cmd->add_option("--targets", c.targets, "Target list, one per line")->required()->check(CLI::ExistingFile);
  cmd->add_option("--targets-format", c.targets_format, "plain | semeval (lemma_pos suffixes)")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->default_str("semeval");
  cmd->add_option("--spelling-map", c.spelling_map, "TSV of variant<TAB>canonical target lemmas")
      ->check(CLI::ExistingFile);
  cmd->add_option("--mode", c.mode, "se: ignore target POS; sz: PROPN counts as NOUN")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
      ->default_str("se");
  cmd->add_flag("--case-sensitive", c.case_sensitive, "Compare lemmas case-sensitively");
  cmd->add_flag_callback("--strict", [&c] { c.error_policy = ds::ErrorPolicy::strict; },
                         "Abort on the first malformed sentence instead of skipping it");
  cmd->add_option("--exclude-rel", c.excluded_relations, "Dependency relation to ignore (repeatable)");
  cmd->add_option("--workers", c.workers, "Extraction threads")->check(CLI::PositiveNumber);
}

void add_analysis_flags(CLI::App* cmd, ds::RunConfig& c) {
  static const std::map<std::string, ds::TransformOrder> orders = {
      {"filter-strip", ds::TransformOrder::filter_then_strip},
      {"strip-filter", ds::TransformOrder::strip_then_filter}};
  static const std::map<std::string, ds::ClassifyMethod> methods = {
      {"percentile", ds::ClassifyMethod::percentile}, {"changepoint", ds::ClassifyMethod::changepoint}};
  auto& a = c.analysis;
  cmd->add_flag("--keep-pos", a.transform.keep_pos, "Keep /UPOS suffixes on fillers");
  cmd->add_option("--min-total", a.transform.min_total,
                  "Drop fillers seen fewer times than this over both periods")
      ->default_val(2);
  cmd->add_option("--order", a.transform.order, "filter-strip | strip-filter")
      ->transform(CLI::CheckedTransformer(orders, CLI::ignore_case))
      ->default_str("filter-strip");
  cmd->add_option("--slot-threshold", a.slot_threshold, "Slots count toward the score above this JSD")
      ->default_val(0.5);
  cmd->add_flag_callback("--inclusive-threshold", [&a] { a.threshold_mode = ds::ThresholdMode::inclusive; },
                         "Count slots whose JSD equals the threshold");
  cmd->add_option("--classify", a.classify, "percentile | changepoint")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
      ->default_str("percentile");
  cmd->add_option("--fraction", a.fraction, "Top fraction labelled changed (percentile)")->default_val(0.43);
  cmd->add_option("--gold-binary", c.gold_binary, "Gold binary labels TSV")->check(CLI::ExistingFile);
  cmd->add_option("--gold-graded", c.gold_graded, "Gold graded scores TSV")->check(CLI::ExistingFile);
  cmd->add_option("--output-dir", c.output_dir, "Directory for scores, labels, report, manifest")->required();
}

void print_summary(const ds::RunReport& r) {
  for (const auto& l : r.lemmas) {
    std::cout << l.rank << '\t' << l.target_id << '\t' << ds::fixed6(l.score) << '\t' << l.label << '\n';
  }
  if (r.evaluation) {
    if (r.evaluation->spearman) std::cout << "spearman\t" << ds::fixed6(*r.evaluation->spearman) << '\n';
    if (r.evaluation->accuracy) std::cout << "accuracy\t" << ds::fixed6(*r.evaluation->accuracy) << '\n';
  }
}

void write_or_print(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
  } else {
    ds::write_file(path, body);
  }
}

int cmd_run(const ds::RunConfig& c) {
  print_summary(ds::run_pipeline(c));
  return 0;
}

int cmd_extract(ds::RunConfig c, const ExtractArgs& a) {
  if (a.period != 1 && a.period != 2) throw ds::UsageError("--period must be 1 or 2");
  const auto settings = ds::extract_settings_for(c);
  const auto result = ds::extract_corpus(a.corpus, settings, a.period);
  ds::log::info(a.corpus + ": " + std::to_string(result.sentences) + " sentences, " +
                std::to_string(result.malformed) + " malformed, " + std::to_string(result.invalid) +
                " invalid");
  write_or_print(a.output, ds::profiles_to_json(result.profiles));
  return 0;
}

int cmd_analyze(const ds::RunConfig& c, const AnalyzeArgs& a) {
  ds::validate_settings(c.analysis);
  ds::ProfileMap p1, p2;
  try {
    p1 = ds::profiles_from_json(ds::read_file(a.profiles1));
    p2 = ds::profiles_from_json(ds::read_file(a.profiles2));
  } catch (const std::exception& e) {
    throw ds::StageError("profiles", e.what());
  }
  for (auto& [id, p] : p1) {
    if (p.period != 1) throw ds::StageError("profiles", a.profiles1 + " holds period " + std::to_string(p.period));
  }
  for (auto& [id, p] : p2) {
    if (p.period != 2) throw ds::StageError("profiles", a.profiles2 + " holds period " + std::to_string(p.period));
  }
  const ds::GoldData gold = ds::load_gold_for(c.gold_binary, c.gold_graded);
  const ds::RunReport report = ds::analyze(p1, p2, c.analysis, &gold);
  nlohmann::ordered_json config;
  config["profiles1"] = a.profiles1;
  config["profiles2"] = a.profiles2;
  config["analysis"] = ds::settings_to_json(c.analysis);
  const auto manifest = ds::make_manifest(config, {{"profiles1", a.profiles1},
                                                   {"profiles2", a.profiles2},
                                                   {"gold_binary", c.gold_binary},
                                                   {"gold_graded", c.gold_graded}});
  ds::write_outputs(report, c.output_dir, manifest);
  print_summary(report);
  return 0;
}

int cmd_evaluate(const ds::RunConfig& c, const EvaluateArgs& a) {
  if (a.scores.empty() && a.labels.empty()) throw ds::UsageError("give --scores and/or --labels");
  if (!a.scores.empty() && c.gold_graded.empty()) throw ds::UsageError("--scores needs --gold-graded");
  if (!a.labels.empty() && c.gold_binary.empty()) throw ds::UsageError("--labels needs --gold-binary");
  try {
    const auto gold = ds::load_gold(c.gold_binary, c.gold_graded);
    if (!a.scores.empty()) {
      std::ifstream in(a.scores);
      if (!in) throw ds::EvaluationError("cannot read '" + a.scores + "'");
      std::cout << "spearman\t" << ds::fixed6(ds::spearman(ds::parse_graded(in, a.scores), gold.graded)) << '\n';
    }
    if (!a.labels.empty()) {
      std::ifstream in(a.labels);
      if (!in) throw ds::EvaluationError("cannot read '" + a.labels + "'");
      std::cout << "accuracy\t" << ds::fixed6(ds::accuracy(ds::parse_binary(in, a.labels), gold.binary)) << '\n';
    }
  } catch (const ds::EvaluationError& e) {
    throw ds::StageError("evaluate", e.what());
  }
  return 0;
}

ds::RunReport load_report(const std::string& path) {
  try {
    return ds::report_from_json(nlohmann::json::parse(ds::read_file(path)));
  } catch (const std::exception& e) {
    throw ds::StageError("report", path + ": " + e.what());
  }
}

int cmd_classify(const ds::RunConfig& c, const ClassifyArgs& a) {
  ds::validate_settings(c.analysis);
  std::ifstream in(a.scores);
  if (!in) throw ds::StageError("classify", "cannot read '" + a.scores + "'");
  std::vector<ds::LemmaScore> scores;
  try {
    for (const auto& [id, v] : ds::parse_graded(in, a.scores)) scores.push_back({id, v, {}, 0, {}});
  } catch (const std::exception& e) {
    throw ds::StageError("classify", e.what());
  }
  const auto ranked = ds::rank_lemmas(scores);
  const ds::Labels labels = c.analysis.classify == ds::ClassifyMethod::percentile
                                ? ds::classify_percentile(ranked, c.analysis.fraction)
                                : ds::classify_changepoint(scores).labels;
  for (const auto& e : ranked.entries) std::cout << e.target_id << '\t' << labels.at(e.target_id) << '\n';
  return 0;
}

int cmd_synth(const ds::SynthSpec& spec, const std::string& dir) {
  std::filesystem::create_directories(dir);
  ds::write_synth(ds::generate(spec), dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depshift: dependency-slot semantic change detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ds::kVersion);

  ds::RunConfig run_cfg;
  auto* run = app.add_subcommand("run", "Full pipeline over two corpora");
  run->add_option("--corpus1", run_cfg.corpus1, "Period 1 CoNLL-U (.conllu or .gz)")->required()->check(CLI::ExistingFile);
  run->add_option("--corpus2", run_cfg.corpus2, "Period 2 CoNLL-U (.conllu or .gz)")->required()->check(CLI::ExistingFile);
  add_target_flags(run, run_cfg);
  add_analysis_flags(run, run_cfg);

  ds::RunConfig ext_cfg;
  ExtractArgs ext_args;
  auto* extract = app.add_subcommand("extract", "Build slot profiles for one period");
  extract->add_option("--corpus", ext_args.corpus, "CoNLL-U input (.conllu or .gz)")->required()->check(CLI::ExistingFile);
  extract->add_option("--period", ext_args.period, "1 or 2")->required();
  extract->add_option("-o,--output", ext_args.output, "Profile JSON (default stdout)");
  add_target_flags(extract, ext_cfg);

  ds::RunConfig an_cfg;
  AnalyzeArgs an_args;
  auto* analyze = app.add_subcommand("analyze", "Score, rank and classify from two profile files");
  analyze->add_option("--profiles1", an_args.profiles1, "Period 1 profiles")->required()->check(CLI::ExistingFile);
  analyze->add_option("--profiles2", an_args.profiles2, "Period 2 profiles")->required()->check(CLI::ExistingFile);
  add_analysis_flags(analyze, an_cfg);

  ds::RunConfig ev_cfg;
  EvaluateArgs ev_args;
  auto* evaluate = app.add_subcommand("evaluate", "Score a scores/labels TSV against gold files");
  evaluate->add_option("--scores", ev_args.scores, "target<TAB>score")->check(CLI::ExistingFile);
  evaluate->add_option("--labels", ev_args.labels, "target<TAB>0|1")->check(CLI::ExistingFile);
  evaluate->add_option("--gold-binary", ev_cfg.gold_binary)->check(CLI::ExistingFile);
  evaluate->add_option("--gold-graded", ev_cfg.gold_graded)->check(CLI::ExistingFile);

  ds::RunConfig cl_cfg;
  ClassifyArgs cl_args;
  auto* classify = app.add_subcommand("classify", "Label targets from a scores TSV");
  classify->add_option("--scores", cl_args.scores, "target<TAB>score")->required()->check(CLI::ExistingFile);
  {
    static const std::map<std::string, ds::ClassifyMethod> methods = {
        {"percentile", ds::ClassifyMethod::percentile}, {"changepoint", ds::ClassifyMethod::changepoint}};
    classify->add_option("--classify", cl_cfg.analysis.classify, "percentile | changepoint")
        ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
        ->default_str("percentile");
    classify->add_option("--fraction", cl_cfg.analysis.fraction)->default_val(0.43);
  }

  InspectArgs in_args;
  auto* inspect = app.add_subcommand("inspect", "Per-slot plot data from a report");
  inspect->require_subcommand(1);
  auto add_inspect_common = [&in_args](CLI::App* c) {
    c->add_option("--report", in_args.report, "report.json from run/analyze")->required()->check(CLI::ExistingFile);
    c->add_option("--target", in_args.target)->required();
    c->add_option("--slot", in_args.slot)->required();
    c->add_option("-o,--output", in_args.output, "TSV output (default stdout)");
  };
  auto* slot_cmd = inspect->add_subcommand("slot", "Filler contributions to one slot's JSD");
  add_inspect_common(slot_cmd);
  auto* freq_cmd = inspect->add_subcommand("freq", "Filler relative frequencies in both periods");
  add_inspect_common(freq_cmd);
  freq_cmd->add_option("--filler", in_args.fillers, "Filler to include (repeatable; default all)");

  ds::SynthSpec synth_spec;
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "Generate synthetic corpora with planted change");
  synth->add_option("--out-dir", synth_dir)->required();
  synth->add_option("--stable", synth_spec.n_stable_targets)->default_val(10);
  synth->add_option("--changed", synth_spec.n_changed_targets)->default_val(10);
  synth->add_option("--sentences", synth_spec.sentences_per_target_per_period, "Per target per period")->default_val(100);
  synth->add_option("--vocab", synth_spec.filler_vocab_size)->default_val(10);
  synth->add_option("--overlap", synth_spec.overlap, "Shared filler fraction for changed targets")->default_val(0.2);
  synth->add_option("--seed", synth_spec.seed)->default_val(7);
  synth->add_option("--singletons", synth_spec.singletons_per_slot, "Singleton fillers per slot")->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_cfg);
    if (*extract) return cmd_extract(ext_cfg, ext_args);
    if (*analyze) return cmd_analyze(an_cfg, an_args);
    if (*evaluate) return cmd_evaluate(ev_cfg, ev_args);
    if (*classify) return cmd_classify(cl_cfg, cl_args);
    if (*slot_cmd) {
      write_or_print(in_args.output, ds::emit_slot_detail(load_report(in_args.report), in_args.target, in_args.slot));
      return 0;
    }
    if (*freq_cmd) {
      write_or_print(in_args.output, ds::emit_frequency_series(load_report(in_args.report), in_args.target,
                                                               in_args.slot, in_args.fillers));
      return 0;
    }
    if (*synth) return cmd_synth(synth_spec, synth_dir);
  } catch (const ds::UsageError& e) {
    std::cerr << "depshift: usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "depshift: error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
