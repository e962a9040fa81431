// End-to-end orchestration: extract -> transform -> divergence -> aggregate
// -> rank -> classify -> evaluate, plus report serialization and the
// per-slot TSV views used for plotting.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "depshift/aggregate.hpp"
#include "depshift/conllu.hpp"
#include "depshift/divergence.hpp"
#include "depshift/evaluate.hpp"
#include "depshift/log.hpp"
#include "depshift/slots.hpp"
#include "depshift/targets.hpp"
#include "depshift/transform.hpp"

namespace depshift {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration or arguments (CLI exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure inside a pipeline stage (CLI exit code 2).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& msg)
      : std::runtime_error(stage + ": " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

enum class ClassifyMethod { percentile, changepoint };

struct AnalysisSettings {
  TransformOptions transform;  // min_total, keep_pos, order
  double slot_threshold = 0.5;
  ThresholdMode threshold_mode = ThresholdMode::strict;
  ClassifyMethod classify = ClassifyMethod::percentile;
  double fraction = 0.43;
};

struct RunConfig {
  std::string corpus1;
  std::string corpus2;
  std::string targets;
  TargetFormat targets_format = TargetFormat::semeval;
  std::string spelling_map;
  Mode mode = Mode::se;
  bool case_sensitive = false;
  ErrorPolicy error_policy = ErrorPolicy::skip;
  std::set<std::string> excluded_relations;
  AnalysisSettings analysis;
  std::string gold_binary;
  std::string gold_graded;
  std::string output_dir;
  unsigned workers = 1;  // does not affect results
};

inline void validate_settings(const AnalysisSettings& s) {
  if (s.transform.min_total < 1) throw UsageError("min_total must be >= 1");
  if (!(s.slot_threshold >= 0.0 && s.slot_threshold <= 1.0)) {
    throw UsageError("slot_threshold must lie in [0, 1]");
  }
  if (!(s.fraction > 0.0 && s.fraction < 1.0)) throw UsageError("fraction must lie in (0, 1)");
}

inline void validate_config(const RunConfig& c) {
  if (c.corpus1.empty() || c.corpus2.empty()) throw UsageError("both corpora are required");
  if (c.targets.empty()) throw UsageError("a targets file is required");
  if (c.output_dir.empty()) throw UsageError("an output directory is required");
  validate_settings(c.analysis);
}

// ---------------------------------------------------------------------------
// Names used in flags and JSON.

inline std::string to_string(Mode m) { return m == Mode::se ? "se" : "sz"; }
inline std::string to_string(TargetFormat f) { return f == TargetFormat::plain ? "plain" : "semeval"; }
inline std::string to_string(ClassifyMethod m) {
  return m == ClassifyMethod::percentile ? "percentile" : "changepoint";
}
inline std::string to_string(TransformOrder o) {
  return o == TransformOrder::filter_then_strip ? "filter-strip" : "strip-filter";
}
inline std::string to_string(ThresholdMode m) {
  return m == ThresholdMode::strict ? "strict" : "inclusive";
}

// ---------------------------------------------------------------------------
// Report model.

struct FillerRow {
  std::string filler;
  std::int64_t count_1 = 0;
  std::int64_t count_2 = 0;
  double prob_1 = 0.0;
  double prob_2 = 0.0;
  double contribution = 0.0;
  Direction direction = Direction::unchanged;
};

struct SlotReport {
  std::string slot;
  double jsd = 0.0;
  bool used = false;
  std::size_t support_1 = 0;
  std::size_t support_2 = 0;
  std::vector<FillerRow> fillers;  // descending by contribution
};

struct LemmaReport {
  std::string target_id;
  int rank = 0;
  double score = 0.0;
  int label = 0;
  std::int64_t occurrences_1 = 0;
  std::int64_t occurrences_2 = 0;
  std::size_t slots_total = 0;
  std::vector<std::string> slots_used;
  std::vector<SlotReport> slots;  // by slot name
};

struct Evaluation {
  std::optional<double> spearman;
  std::optional<double> accuracy;
};

struct RunReport {
  AnalysisSettings settings;
  std::vector<LemmaReport> lemmas;  // in rank order
  std::size_t positives = 0;
  std::optional<std::size_t> split_index;  // change-point classification only
  std::optional<Evaluation> evaluation;
};

/// Reported precision. Scores are rounded before ranking so that the
/// written scores rank exactly as the run did.
inline double round6(double v) { return std::round(v * 1e6) / 1e6; }

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Extraction.

struct ExtractResult {
  ProfileMap profiles;
  std::size_t sentences = 0;
  std::size_t malformed = 0;  // parse errors, skipped
  std::size_t invalid = 0;    // structural violations, skipped
};

struct ExtractSettings {
  std::vector<TargetSpec> specs;
  NormalizationRules rules;
  ExtractOptions options;  // keep_pos is always on for persisted profiles
  ErrorPolicy error_policy = ErrorPolicy::skip;
  unsigned workers = 1;
};

inline ExtractResult extract_sentences(ConlluReader& reader, const ExtractSettings& s, int period,
                                       const std::string& source = "<input>") {
  constexpr std::size_t kBatch = 8192;
  ExtractResult result;
  ProfileMap total = build_profiles({}, s.specs, s.rules, s.options, period);
  std::vector<Sentence> batch;
  batch.reserve(kBatch);
  auto flush = [&] {
    if (batch.empty()) return;
    const ProfileMap part = build_profiles(batch, s.specs, s.rules, s.options, period, s.workers);
    for (const auto& [id, prof] : part) merge_into(total.at(id), prof);
    batch.clear();
  };
  std::size_t ordinal = 0;
  while (auto sent = reader.next()) {
    ++ordinal;
    const auto violations = validate_sentence(*sent);
    if (!violations.empty()) {
      const std::string where = source + ": sentence " +
                                (sent->source_id.empty() ? "#" + std::to_string(ordinal)
                                                         : "'" + sent->source_id + "'");
      if (s.error_policy == ErrorPolicy::strict) {
        throw StageError("ingest", where + ": " + violations.front().message);
      }
      log::warn("skipping " + where + ": " + violations.front().message);
      ++result.invalid;
      continue;
    }
    ++result.sentences;
    batch.push_back(std::move(*sent));
    if (batch.size() == kBatch) flush();
  }
  flush();
  result.malformed = reader.errors().size();
  result.profiles = std::move(total);
  return result;
}

inline ExtractResult extract_corpus(const std::string& path, const ExtractSettings& s, int period) {
  try {
    ConlluReader reader(open_lines(path), s.error_policy);
    return extract_sentences(reader, s, period, path);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("ingest", path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Analysis.

inline SlotReport slot_report(const SlotChange& change, const ProfilePair& pair, bool used) {
  static const FillerCounts empty;
  auto lookup = [](const SlotCounts& c, const std::string& slot) -> const FillerCounts& {
    const auto it = c.find(slot);
    return it == c.end() ? empty : it->second;
  };
  const FillerCounts& c1 = lookup(pair.p1.counts, change.slot);
  const FillerCounts& c2 = lookup(pair.p2.counts, change.slot);
  SlotReport r;
  r.slot = change.slot;
  r.jsd = change.jsd;
  r.used = used;
  r.support_1 = change.support_1;
  r.support_2 = change.support_2;
  for (const auto& fc : change.contributions) {
    FillerRow row;
    row.filler = fc.filler;
    const auto a = c1.find(fc.filler);
    const auto b = c2.find(fc.filler);
    row.count_1 = a == c1.end() ? 0 : a->second;
    row.count_2 = b == c2.end() ? 0 : b->second;
    row.prob_1 = fc.prob_1;
    row.prob_2 = fc.prob_2;
    row.contribution = fc.contribution;
    row.direction = fc.direction;
    r.fillers.push_back(std::move(row));
  }
  return r;
}

/// Scores, ranks and classifies every target present in both profile maps.
inline RunReport analyze(const ProfileMap& period1, const ProfileMap& period2,
                         const AnalysisSettings& settings, const GoldData* gold = nullptr) {
  validate_settings(settings);
  for (const auto& [id, p] : period1) {
    if (!period2.count(id)) throw StageError("analyze", "target '" + id + "' missing from period 2");
  }
  for (const auto& [id, p] : period2) {
    if (!period1.count(id)) throw StageError("analyze", "target '" + id + "' missing from period 1");
  }
  if (period1.empty()) throw StageError("analyze", "no targets");

  std::vector<LemmaScore> scores;
  std::map<std::string, LemmaReport> reports;
  try {
    for (const auto& [id, p1] : period1) {
      const ProfilePair pair = apply_transforms(make_profile_pair(p1, period2.at(id)), settings.transform);
      LemmaScore ls = aggregate_lemma_score(compare_profiles(pair), settings.slot_threshold,
                                            settings.threshold_mode, id);
      ls.score = round6(ls.score);
      LemmaReport lr;
      lr.target_id = id;
      lr.score = ls.score;
      lr.occurrences_1 = pair.p1.occurrences;
      lr.occurrences_2 = pair.p2.occurrences;
      lr.slots_total = ls.slots_total;
      lr.slots_used = ls.slots_used;
      const std::set<std::string> used(ls.slots_used.begin(), ls.slots_used.end());
      for (const auto& sc : ls.all_slots) lr.slots.push_back(slot_report(sc, pair, used.count(sc.slot) > 0));
      reports.emplace(id, std::move(lr));
      ls.all_slots.clear();
      scores.push_back(std::move(ls));
    }
  } catch (const std::exception& e) {
    throw StageError("divergence", e.what());
  }

  RunReport report;
  report.settings = settings;
  const RankedList ranked = rank_lemmas(scores);
  Labels labels;
  try {
    if (settings.classify == ClassifyMethod::percentile) {
      labels = classify_percentile(ranked, settings.fraction);
    } else {
      const ChangePoint cp = classify_changepoint(scores);
      labels = cp.labels;
      report.split_index = cp.split;
    }
  } catch (const std::exception& e) {
    throw StageError("classify", e.what());
  }
  for (const auto& e : ranked.entries) {
    LemmaReport lr = std::move(reports.at(e.target_id));
    lr.rank = e.rank;
    lr.label = labels.at(e.target_id);
    report.positives += static_cast<std::size_t>(lr.label);
    report.lemmas.push_back(std::move(lr));
  }

  if (gold != nullptr && (!gold->graded.empty() || !gold->binary.empty())) {
    Evaluation ev;
    try {
      if (!gold->graded.empty()) {
        std::map<std::string, double> pred;
        for (const auto& l : report.lemmas) pred[l.target_id] = l.score;
        detail::require_same_keys(pred, gold->graded);
        const auto constant = [](const auto& m) {
          return std::all_of(m.begin(), m.end(), [&](const auto& kv) { return kv.second == m.begin()->second; });
        };
        // A constant ranking has no defined correlation; report null.
        if (constant(pred) || constant(gold->graded)) {
          log::warn("spearman undefined: predicted or gold scores are all equal");
        } else {
          ev.spearman = spearman(pred, gold->graded);
        }
      }
      if (!gold->binary.empty()) ev.accuracy = accuracy(labels, gold->binary);
    } catch (const std::exception& e) {
      throw StageError("evaluate", e.what());
    }
    report.evaluation = ev;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization.

inline nlohmann::ordered_json settings_to_json(const AnalysisSettings& s) {
  nlohmann::ordered_json j;
  j["keep_pos"] = s.transform.keep_pos;
  j["min_total"] = s.transform.min_total;
  j["transform_order"] = to_string(s.transform.order);
  j["slot_threshold"] = s.slot_threshold;
  j["threshold_mode"] = to_string(s.threshold_mode);
  j["classify"] = to_string(s.classify);
  j["fraction"] = s.fraction;
  return j;
}

inline AnalysisSettings settings_from_json(const nlohmann::json& j) {
  AnalysisSettings s;
  s.transform.keep_pos = j.at("keep_pos").get<bool>();
  s.transform.min_total = j.at("min_total").get<std::int64_t>();
  s.transform.order = j.at("transform_order").get<std::string>() == "filter-strip"
                          ? TransformOrder::filter_then_strip
                          : TransformOrder::strip_then_filter;
  s.slot_threshold = j.at("slot_threshold").get<double>();
  s.threshold_mode = j.at("threshold_mode").get<std::string>() == "strict" ? ThresholdMode::strict
                                                                          : ThresholdMode::inclusive;
  s.classify = j.at("classify").get<std::string>() == "percentile" ? ClassifyMethod::percentile
                                                                  : ClassifyMethod::changepoint;
  s.fraction = j.at("fraction").get<double>();
  return s;
}

inline nlohmann::ordered_json report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["tool"] = "depshift";
  j["version"] = kVersion;
  j["settings"] = settings_to_json(r.settings);
  j["tie_policy"] = RankedList::tie_policy;
  nlohmann::ordered_json cls;
  cls["method"] = to_string(r.settings.classify);
  cls["positives"] = r.positives;
  cls["split_index"] = r.split_index ? nlohmann::ordered_json(*r.split_index) : nlohmann::ordered_json();
  j["classification"] = std::move(cls);
  nlohmann::ordered_json lemmas = nlohmann::ordered_json::array();
  for (const auto& l : r.lemmas) {
    nlohmann::ordered_json lj;
    lj["target_id"] = l.target_id;
    lj["rank"] = l.rank;
    lj["score"] = round6(l.score);
    lj["label"] = l.label;
    lj["occurrences_1"] = l.occurrences_1;
    lj["occurrences_2"] = l.occurrences_2;
    lj["slots_total"] = l.slots_total;
    lj["slots_used"] = l.slots_used;
    nlohmann::ordered_json slots = nlohmann::ordered_json::array();
    for (const auto& s : l.slots) {
      nlohmann::ordered_json sj;
      sj["slot"] = s.slot;
      sj["jsd"] = round6(s.jsd);
      sj["used"] = s.used;
      sj["support_1"] = s.support_1;
      sj["support_2"] = s.support_2;
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& f : s.fillers) {
        nlohmann::ordered_json fj;
        fj["filler"] = f.filler;
        fj["count_1"] = f.count_1;
        fj["count_2"] = f.count_2;
        fj["prob_1"] = round6(f.prob_1);
        fj["prob_2"] = round6(f.prob_2);
        fj["contribution"] = round6(f.contribution);
        fj["direction"] = std::string(to_string(f.direction));
        rows.push_back(std::move(fj));
      }
      sj["fillers"] = std::move(rows);
      slots.push_back(std::move(sj));
    }
    lj["slots"] = std::move(slots);
    lemmas.push_back(std::move(lj));
  }
  j["lemmas"] = std::move(lemmas);
  if (r.evaluation) {
    nlohmann::ordered_json ev;
    ev["spearman"] = r.evaluation->spearman ? nlohmann::ordered_json(round6(*r.evaluation->spearman))
                                            : nlohmann::ordered_json();
    ev["accuracy"] = r.evaluation->accuracy ? nlohmann::ordered_json(round6(*r.evaluation->accuracy))
                                            : nlohmann::ordered_json();
    j["evaluation"] = std::move(ev);
  }
  return j;
}

inline RunReport report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.settings = settings_from_json(j.at("settings"));
  const auto& cls = j.at("classification");
  r.positives = cls.at("positives").get<std::size_t>();
  if (!cls.at("split_index").is_null()) r.split_index = cls.at("split_index").get<std::size_t>();
  for (const auto& lj : j.at("lemmas")) {
    LemmaReport l;
    l.target_id = lj.at("target_id").get<std::string>();
    l.rank = lj.at("rank").get<int>();
    l.score = lj.at("score").get<double>();
    l.label = lj.at("label").get<int>();
    l.occurrences_1 = lj.at("occurrences_1").get<std::int64_t>();
    l.occurrences_2 = lj.at("occurrences_2").get<std::int64_t>();
    l.slots_total = lj.at("slots_total").get<std::size_t>();
    l.slots_used = lj.at("slots_used").get<std::vector<std::string>>();
    for (const auto& sj : lj.at("slots")) {
      SlotReport s;
      s.slot = sj.at("slot").get<std::string>();
      s.jsd = sj.at("jsd").get<double>();
      s.used = sj.at("used").get<bool>();
      s.support_1 = sj.at("support_1").get<std::size_t>();
      s.support_2 = sj.at("support_2").get<std::size_t>();
      for (const auto& fj : sj.at("fillers")) {
        FillerRow f;
        f.filler = fj.at("filler").get<std::string>();
        f.count_1 = fj.at("count_1").get<std::int64_t>();
        f.count_2 = fj.at("count_2").get<std::int64_t>();
        f.prob_1 = fj.at("prob_1").get<double>();
        f.prob_2 = fj.at("prob_2").get<double>();
        f.contribution = fj.at("contribution").get<double>();
        f.direction = direction_from_string(fj.at("direction").get<std::string>());
        s.fillers.push_back(std::move(f));
      }
      l.slots.push_back(std::move(s));
    }
    r.lemmas.push_back(std::move(l));
  }
  if (j.contains("evaluation")) {
    Evaluation ev;
    const auto& e = j.at("evaluation");
    if (!e.at("spearman").is_null()) ev.spearman = e.at("spearman").get<double>();
    if (!e.at("accuracy").is_null()) ev.accuracy = e.at("accuracy").get<double>();
    r.evaluation = ev;
  }
  return r;
}

/// "target<TAB>score" in rank order (SemEval graded answer format).
inline std::string scores_tsv(const RunReport& r) {
  std::string out;
  for (const auto& l : r.lemmas) out += l.target_id + "\t" + fixed6(l.score) + "\n";
  return out;
}

/// "target<TAB>label" in rank order (SemEval binary answer format).
inline std::string labels_tsv(const RunReport& r) {
  std::string out;
  for (const auto& l : r.lemmas) out += l.target_id + "\t" + std::to_string(l.label) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Inspection views.

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const LemmaReport& find_lemma(const RunReport& r, const std::string& target_id) {
  for (const auto& l : r.lemmas) {
    if (l.target_id == target_id) return l;
  }
  throw ReportError("unknown target '" + target_id + "'");
}

inline const SlotReport* find_slot(const LemmaReport& l, const std::string& slot) {
  for (const auto& s : l.slots) {
    if (s.slot == slot) return &s;
  }
  return nullptr;
}

inline std::string available_slots(const LemmaReport& l) {
  std::string out;
  for (const auto& s : l.slots) out += (out.empty() ? "" : ", ") + s.slot;
  return out.empty() ? "(none)" : out;
}

/// Per-filler breakdown of one slot, sorted by contribution (bar-chart data).
inline std::string emit_slot_detail(const RunReport& r, const std::string& target_id,
                                    const std::string& slot) {
  const LemmaReport& l = find_lemma(r, target_id);
  const SlotReport* s = find_slot(l, slot);
  if (s == nullptr) {
    throw ReportError("unknown slot '" + slot + "' for target '" + target_id +
                      "'; available: " + available_slots(l));
  }
  std::string out = "filler\tcount_1\tcount_2\tprob_1\tprob_2\tcontribution\tdirection\n";
  for (const auto& f : s->fillers) {
    out += f.filler + "\t" + std::to_string(f.count_1) + "\t" + std::to_string(f.count_2) + "\t" +
           fixed6(f.prob_1) + "\t" + fixed6(f.prob_2) + "\t" + fixed6(f.contribution) + "\t" +
           std::string(to_string(f.direction)) + "\n";
  }
  return out;
}

/// Relative frequency of selected fillers of one slot in both periods. An
/// empty filler list selects every filler of the slot, in name order.
inline std::string emit_frequency_series(const RunReport& r, const std::string& target_id,
                                         const std::string& slot,
                                         const std::vector<std::string>& fillers) {
  const LemmaReport& l = find_lemma(r, target_id);
  const SlotReport* s = find_slot(l, slot);
  std::vector<std::string> wanted = fillers;
  if (wanted.empty()) {
    if (s == nullptr) {
      throw ReportError("unknown slot '" + slot + "' for target '" + target_id +
                        "'; available: " + available_slots(l));
    }
    for (const auto& f : s->fillers) wanted.push_back(f.filler);
    std::sort(wanted.begin(), wanted.end());
  }
  std::string out = "filler\trelative_freq_1\trelative_freq_2\n";
  for (const auto& name : wanted) {
    double p1 = 0.0, p2 = 0.0;
    if (s != nullptr) {
      for (const auto& f : s->fillers) {
        if (f.filler == name) {
          p1 = f.prob_1;
          p2 = f.prob_2;
        }
      }
    }
    out += name + "\t" + fixed6(p1) + "\t" + fixed6(p2) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files.

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << body;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

struct InputFile {
  std::string role;
  std::string path;
};

/// Manifest of a run: settings plus checksums of every input. The output
/// directory and worker count are left out, as neither changes results.
inline nlohmann::ordered_json make_manifest(const nlohmann::ordered_json& config,
                                            const std::vector<InputFile>& inputs) {
  nlohmann::ordered_json m;
  m["tool"] = "depshift";
  m["version"] = kVersion;
  m["config"] = config;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& in : inputs) {
    if (in.path.empty()) continue;
    nlohmann::ordered_json e;
    e["role"] = in.role;
    e["path"] = in.path;
    e["sha256"] = sha256_file(in.path);
    arr.push_back(std::move(e));
  }
  m["inputs"] = std::move(arr);
  m["outputs"] = {"scores.tsv", "labels.tsv", "report.json", "manifest.json"};
  return m;
}

inline void write_outputs(const RunReport& r, const std::filesystem::path& dir,
                          const nlohmann::ordered_json& manifest) {
  std::filesystem::create_directories(dir);
  write_file(dir / "scores.tsv", scores_tsv(r));
  write_file(dir / "labels.tsv", labels_tsv(r));
  write_file(dir / "report.json", report_to_json(r).dump(1) + "\n");
  write_file(dir / "manifest.json", manifest.dump(1) + "\n");
}

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["corpus1"] = c.corpus1;
  j["corpus2"] = c.corpus2;
  j["targets"] = c.targets;
  j["targets_format"] = to_string(c.targets_format);
  j["spelling_map"] = c.spelling_map.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(c.spelling_map);
  j["mode"] = to_string(c.mode);
  j["case_sensitive"] = c.case_sensitive;
  j["strict"] = c.error_policy == ErrorPolicy::strict;
  j["exclude_relations"] = std::vector<std::string>(c.excluded_relations.begin(), c.excluded_relations.end());
  j["analysis"] = settings_to_json(c.analysis);
  j["gold_binary"] = c.gold_binary.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(c.gold_binary);
  j["gold_graded"] = c.gold_graded.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(c.gold_graded);
  return j;
}

inline ExtractSettings extract_settings_for(const RunConfig& c) {
  ExtractSettings s;
  const CasePolicy policy = c.case_sensitive ? CasePolicy::sensitive : CasePolicy::insensitive;
  try {
    s.specs = load_targets(c.targets, c.targets_format);
    std::map<std::string, std::string> spelling;
    if (!c.spelling_map.empty()) spelling = load_spelling_map(c.spelling_map, policy);
    s.rules = rules_for_mode(c.mode, std::move(spelling), policy);
    check_rules_against(s.rules, s.specs);
  } catch (const std::exception& e) {
    throw StageError("targets", e.what());
  }
  if (s.specs.empty()) throw StageError("targets", "no targets in '" + c.targets + "'");
  s.options.keep_pos = true;
  s.options.excluded_relations = c.excluded_relations;
  s.error_policy = c.error_policy;
  s.workers = c.workers;
  return s;
}

inline GoldData load_gold_for(const std::string& binary, const std::string& graded) {
  try {
    return load_gold(binary, graded);
  } catch (const std::exception& e) {
    throw StageError("evaluate", e.what());
  }
}

/// Full pipeline over two corpora; writes scores.tsv, labels.tsv,
/// report.json and manifest.json into config.output_dir.
inline RunReport run_pipeline(const RunConfig& config) {
  validate_config(config);
  const ExtractSettings settings = extract_settings_for(config);
  const ExtractResult r1 = extract_corpus(config.corpus1, settings, 1);
  const ExtractResult r2 = extract_corpus(config.corpus2, settings, 2);
  log::info("period 1: " + std::to_string(r1.sentences) + " sentences, period 2: " +
            std::to_string(r2.sentences) + " sentences");
  const GoldData gold = load_gold_for(config.gold_binary, config.gold_graded);
  RunReport report = analyze(r1.profiles, r2.profiles, config.analysis, &gold);
  try {
    const auto manifest = make_manifest(config_to_json(config),
                                        {{"corpus1", config.corpus1},
                                         {"corpus2", config.corpus2},
                                         {"targets", config.targets},
                                         {"spelling_map", config.spelling_map},
                                         {"gold_binary", config.gold_binary},
                                         {"gold_graded", config.gold_graded}});
    write_outputs(report, config.output_dir, manifest);
  } catch (const std::exception& e) {
    throw StageError("report", e.what());
  }
  return report;
}

}  // namespace depshift
