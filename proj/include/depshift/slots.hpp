// Slot extraction and per-period slot profiles.
//
// A slot is a dependency relation seen from the target: "chi_<deprel>" when
// the filler depends on the target, "pa_<deprel>" when the target depends on
// the filler. Relation subtypes are kept verbatim ("chi_nsubj:pass").
#pragma once

#include <algorithm>
#include <cstdint>
#include <future>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "depshift/conllu.hpp"
#include "depshift/targets.hpp"
#include "depshift/text.hpp"

namespace depshift {

inline constexpr std::string_view kChildPrefix = "chi_";
inline constexpr std::string_view kParentPrefix = "pa_";

using FillerCounts = std::map<std::string, std::int64_t>;
using SlotCounts = std::map<std::string, FillerCounts>;

struct SlotObservation {
  std::string slot;
  std::string filler;
  std::string sentence_ref;

  friend bool operator==(const SlotObservation&, const SlotObservation&) = default;
};

struct SlotProfile {
  std::string target_id;
  int period = 1;
  SlotCounts counts;
  std::int64_t occurrences = 0;

  friend bool operator==(const SlotProfile&, const SlotProfile&) = default;
};

struct ExtractOptions {
  bool keep_pos = true;
  std::set<std::string> excluded_relations;  // e.g. {"punct"}
};

/// Filler key: the normalized lemma key, plus "/UPOS" when POS is kept.
inline std::string filler_key(const Token& normalized, const NormalizationRules& rules,
                              bool keep_pos) {
  std::string key = lemma_key(normalized.lemma, rules.case_policy);
  if (keep_pos) {
    key += '/';
    key += normalized.upos.empty() ? std::string("_") : normalized.upos;
  }
  return key;
}

namespace detail {

// Normalized tokens and their lemma keys, computed once per sentence.
struct PreparedSentence {
  std::vector<Token> tokens;
  std::vector<std::string> keys;
  std::vector<std::vector<std::size_t>> children;  // by token position
};

inline PreparedSentence prepare(const Sentence& s, const NormalizationRules& rules) {
  PreparedSentence p;
  const std::size_t n = s.tokens.size();
  p.tokens.reserve(n);
  p.keys.reserve(n);
  p.children.resize(n);
  for (const Token& t : s.tokens) {
    p.tokens.push_back(normalize_token(t, rules));
    p.keys.push_back(lemma_key(p.tokens.back().lemma, rules.case_policy));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int h = p.tokens[i].head;
    if (h >= 1 && static_cast<std::size_t>(h) <= n) {
      p.children[static_cast<std::size_t>(h - 1)].push_back(i);
    }
  }
  return p;
}

template <typename Emit>
void emit_edges(const PreparedSentence& p, std::size_t target_pos, const ExtractOptions& opts,
                Emit&& emit) {
  auto filler_of = [&](std::size_t pos) {
    std::string key = p.keys[pos];
    if (opts.keep_pos) {
      key += '/';
      key += p.tokens[pos].upos.empty() ? std::string("_") : p.tokens[pos].upos;
    }
    return key;
  };
  for (std::size_t c : p.children[target_pos]) {
    const std::string& rel = p.tokens[c].deprel;
    if (opts.excluded_relations.count(rel)) continue;
    emit(std::string(kChildPrefix) + rel, filler_of(c));
  }
  const Token& t = p.tokens[target_pos];
  if (t.head >= 1 && static_cast<std::size_t>(t.head) <= p.tokens.size() &&
      !opts.excluded_relations.count(t.deprel)) {
    emit(std::string(kParentPrefix) + t.deprel, filler_of(static_cast<std::size_t>(t.head - 1)));
  }
}

}  // namespace detail

inline std::vector<SlotObservation> extract_slots(const Sentence& s, const TargetSpec& spec,
                                                  const NormalizationRules& rules,
                                                  const ExtractOptions& opts) {
  std::vector<SlotObservation> out;
  const auto p = detail::prepare(s, rules);
  const std::string target_key = lemma_key(spec.lemma, rules.case_policy);
  for (std::size_t i = 0; i < p.tokens.size(); ++i) {
    if (p.keys[i] != target_key || !pos_admits(spec, rules, p.tokens[i].upos)) continue;
    detail::emit_edges(p, i, opts, [&](std::string slot, std::string filler) {
      out.push_back({std::move(slot), std::move(filler), s.source_id});
    });
  }
  return out;
}

inline std::vector<SlotObservation> extract_slots(const Sentence& s, const TargetSpec& spec,
                                                  const NormalizationRules& rules,
                                                  bool keep_pos) {
  ExtractOptions opts;
  opts.keep_pos = keep_pos;
  return extract_slots(s, spec, rules, opts);
}

/// Adds `other` into `into`. Count addition is commutative and associative,
/// so shard merges are order independent.
inline void merge_into(SlotProfile& into, const SlotProfile& other) {
  if (into.target_id != other.target_id || into.period != other.period) {
    throw std::invalid_argument("cannot merge profiles of different targets or periods");
  }
  into.occurrences += other.occurrences;
  for (const auto& [slot, fillers] : other.counts) {
    auto& dst = into.counts[slot];
    for (const auto& [filler, n] : fillers) dst[filler] += n;
  }
}

using ProfileMap = std::map<std::string, SlotProfile>;

/// Streaming accumulator for one period over a fixed target list.
class ProfileBuilder {
 public:
  ProfileBuilder(std::vector<TargetSpec> specs, NormalizationRules rules, ExtractOptions opts,
                 int period)
      : specs_(std::move(specs)), rules_(std::move(rules)), opts_(std::move(opts)) {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      by_key_[lemma_key(specs_[i].lemma, rules_.case_policy)].push_back(i);
      SlotProfile p;
      p.target_id = specs_[i].id;
      p.period = period;
      profiles_.emplace(specs_[i].id, std::move(p));
    }
  }

  void add(const Sentence& s) {
    const auto p = detail::prepare(s, rules_);
    for (std::size_t i = 0; i < p.tokens.size(); ++i) {
      const auto hit = by_key_.find(p.keys[i]);
      if (hit == by_key_.end()) continue;
      for (std::size_t spec_idx : hit->second) {
        const TargetSpec& spec = specs_[spec_idx];
        if (!pos_admits(spec, rules_, p.tokens[i].upos)) continue;
        SlotProfile& prof = profiles_.at(spec.id);
        ++prof.occurrences;
        detail::emit_edges(p, i, opts_, [&](std::string slot, std::string filler) {
          ++prof.counts[slot][filler];
        });
      }
    }
  }

  void merge(const ProfileBuilder& other) {
    for (const auto& [id, prof] : other.profiles_) merge_into(profiles_.at(id), prof);
  }

  const ProfileMap& profiles() const noexcept { return profiles_; }
  ProfileMap take() && { return std::move(profiles_); }

 private:
  std::vector<TargetSpec> specs_;
  NormalizationRules rules_;
  ExtractOptions opts_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_key_;
  ProfileMap profiles_;
};

/// Builds profiles for every spec over `corpus`. With workers > 1 the corpus
/// is sharded and partial profiles merged; the result does not depend on
/// the worker count.
inline ProfileMap build_profiles(std::span<const Sentence> corpus,
                                 const std::vector<TargetSpec>& specs,
                                 const NormalizationRules& rules, const ExtractOptions& opts,
                                 int period, unsigned workers = 1) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(corpus.size()) + 1));
  if (workers == 1) {
    ProfileBuilder b(specs, rules, opts, period);
    for (const Sentence& s : corpus) b.add(s);
    return std::move(b).take();
  }
  const std::size_t chunk = (corpus.size() + workers - 1) / workers;
  std::vector<std::future<ProfileBuilder>> parts;
  for (std::size_t begin = 0; begin < corpus.size(); begin += chunk) {
    const auto shard = corpus.subspan(begin, std::min(chunk, corpus.size() - begin));
    parts.push_back(std::async(std::launch::async, [shard, &specs, &rules, &opts, period] {
      ProfileBuilder b(specs, rules, opts, period);
      for (const Sentence& s : shard) b.add(s);
      return b;
    }));
  }
  ProfileBuilder total(specs, rules, opts, period);
  for (auto& f : parts) total.merge(f.get());
  return std::move(total).take();
}

inline ProfileMap build_profiles(std::span<const Sentence> corpus,
                                 const std::vector<TargetSpec>& specs,
                                 const NormalizationRules& rules, bool keep_pos, int period) {
  ExtractOptions opts;
  opts.keep_pos = keep_pos;
  return build_profiles(corpus, specs, rules, opts, period, 1);
}

// JSON: {"target_id", "period", "occurrences", "counts": {slot: {filler: n}}}

inline nlohmann::ordered_json profile_to_json(const SlotProfile& p) {
  nlohmann::ordered_json j;
  j["target_id"] = p.target_id;
  j["period"] = p.period;
  j["occurrences"] = p.occurrences;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [slot, fillers] : p.counts) {
    nlohmann::ordered_json f = nlohmann::ordered_json::object();
    for (const auto& [filler, n] : fillers) f[filler] = n;
    counts[slot] = std::move(f);
  }
  j["counts"] = std::move(counts);
  return j;
}

inline SlotProfile profile_from_json(const nlohmann::json& j) {
  SlotProfile p;
  p.target_id = j.at("target_id").get<std::string>();
  p.period = j.at("period").get<int>();
  if (p.period != 1 && p.period != 2) throw std::runtime_error("profile period must be 1 or 2");
  p.occurrences = j.at("occurrences").get<std::int64_t>();
  if (p.occurrences < 0) throw std::runtime_error("negative occurrences");
  for (const auto& [slot, fillers] : j.at("counts").items()) {
    if (slot.rfind(kChildPrefix, 0) != 0 && slot.rfind(kParentPrefix, 0) != 0) {
      throw std::runtime_error("slot '" + slot + "' lacks a chi_/pa_ prefix");
    }
    auto& dst = p.counts[slot];
    for (const auto& [filler, n] : fillers.items()) {
      const auto v = n.get<std::int64_t>();
      if (v < 1) throw std::runtime_error("non-positive count for '" + filler + "'");
      dst[filler] = v;
    }
  }
  return p;
}

/// Profile document: a JSON array of profile objects in target-id order.
inline std::string profiles_to_json(const ProfileMap& profiles) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [id, p] : profiles) arr.push_back(profile_to_json(p));
  return arr.dump(1) + "\n";
}

inline ProfileMap profiles_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_array()) throw std::runtime_error("profile document must be a JSON array");
  ProfileMap out;
  for (const auto& item : j) {
    auto p = profile_from_json(item);
    const std::string id = p.target_id;
    if (!out.emplace(id, std::move(p)).second) {
      throw std::runtime_error("duplicate profile for target '" + id + "'");
    }
  }
  return out;
}

}  // namespace depshift
