// Target specifications and match-time normalization rules.
//
// Two dataset variants are expressed as rule sets instead of rewritten
// corpora: Mode::se ignores the target's POS (every target token is treated
// as tagged TAR), Mode::sz rewrites PROPN to NOUN. Both apply the optional
// spelling map.
#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "depshift/conllu.hpp"
#include "depshift/text.hpp"

namespace depshift {

class TargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TargetSpec {
  std::string lemma;
  std::set<std::string> pos_filter;  // empty: any POS
  std::string id;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct NormalizationRules {
  bool propn_to_noun = false;
  // Keyed by lemma_key(variant, case_policy); values are canonical lemmas.
  std::map<std::string, std::string> spelling_map;
  bool tar_mode = false;
  CasePolicy case_policy = CasePolicy::insensitive;
};

enum class TargetFormat { plain, semeval };
enum class Mode { se, sz };

/// Maps a SemEval POS suffix ("nn", "vb", ...) to a UPOS tag.
inline std::optional<std::string> upos_for_code(std::string_view code) {
  static const std::map<std::string, std::string, std::less<>> table = {
      {"nn", "NOUN"}, {"vb", "VERB"}, {"jj", "ADJ"}, {"rb", "ADV"}};
  const auto it = table.find(code);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline std::vector<TargetSpec> parse_targets(std::istream& in, TargetFormat format,
                                             const std::string& source = "<targets>") {
  std::vector<TargetSpec> specs;
  std::unordered_set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line(trim(raw));
    if (line.empty()) continue;
    TargetSpec spec;
    spec.id = line;
    spec.lemma = line;
    if (format == TargetFormat::semeval) {
      const auto us = line.rfind('_');
      if (us != std::string::npos && us > 0) {
        const std::string code = line.substr(us + 1);
        const auto upos = upos_for_code(code);
        if (!upos) {
          throw TargetError(source + ":" + std::to_string(line_no) + ": unknown POS code '" +
                            code + "'");
        }
        spec.lemma = line.substr(0, us);
        spec.pos_filter.insert(*upos);
      }
    }
    if (!seen.insert(spec.id).second) {
      throw TargetError(source + ":" + std::to_string(line_no) + ": duplicate target '" +
                        spec.id + "'");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

inline std::vector<TargetSpec> load_targets(const std::string& path, TargetFormat format) {
  std::ifstream in(path);
  if (!in) throw TargetError("cannot read targets file '" + path + "'");
  return parse_targets(in, format, path);
}

/// Parses a "variant<TAB>canonical" spelling map. Canonical forms may not
/// themselves be variants of something else, which keeps normalization
/// idempotent.
inline std::map<std::string, std::string> parse_spelling_map(
    std::istream& in, CasePolicy policy, const std::string& source = "<spelling map>") {
  std::map<std::string, std::string> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos || raw.find('\t', tab + 1) != std::string::npos) {
      throw TargetError(source + ":" + std::to_string(line_no) +
                        ": expected 'variant<TAB>canonical'");
    }
    const std::string variant(trim(std::string_view(raw).substr(0, tab)));
    const std::string canonical(trim(std::string_view(raw).substr(tab + 1)));
    if (variant.empty() || canonical.empty()) {
      throw TargetError(source + ":" + std::to_string(line_no) + ": empty field");
    }
    out[lemma_key(variant, policy)] = to_nfc(canonical);
  }
  for (const auto& [variant, canonical] : out) {
    const auto it = out.find(lemma_key(canonical, policy));
    if (it != out.end() && lemma_key(it->second, policy) != it->first) {
      throw TargetError(source + ": canonical lemma '" + canonical +
                        "' is itself mapped to '" + it->second + "'");
    }
  }
  return out;
}

inline std::map<std::string, std::string> load_spelling_map(const std::string& path,
                                                             CasePolicy policy) {
  std::ifstream in(path);
  if (!in) throw TargetError("cannot read spelling map '" + path + "'");
  return parse_spelling_map(in, policy, path);
}

inline NormalizationRules rules_for_mode(Mode mode, std::map<std::string, std::string> spelling,
                                         CasePolicy policy = CasePolicy::insensitive) {
  NormalizationRules r;
  r.spelling_map = std::move(spelling);
  r.case_policy = policy;
  r.tar_mode = (mode == Mode::se);
  r.propn_to_noun = (mode == Mode::sz);
  return r;
}

/// Every spelling-map target must be the lemma of some target spec.
inline void check_rules_against(const NormalizationRules& rules,
                                const std::vector<TargetSpec>& specs) {
  std::set<std::string> lemmas;
  for (const auto& s : specs) lemmas.insert(lemma_key(s.lemma, rules.case_policy));
  for (const auto& [variant, canonical] : rules.spelling_map) {
    if (!lemmas.count(lemma_key(canonical, rules.case_policy))) {
      throw TargetError("spelling map target '" + canonical + "' is not a target lemma");
    }
  }
}

inline Token normalize_token(const Token& t, const NormalizationRules& rules) {
  Token out = t;
  if (rules.propn_to_noun && out.upos == "PROPN") out.upos = "NOUN";
  if (!rules.spelling_map.empty()) {
    const auto it = rules.spelling_map.find(lemma_key(out.lemma, rules.case_policy));
    if (it != rules.spelling_map.end()) out.lemma = it->second;
  }
  return out;
}

inline bool pos_admits(const TargetSpec& spec, const NormalizationRules& rules,
                       const std::string& upos) {
  return spec.pos_filter.empty() || rules.tar_mode || spec.pos_filter.count(upos) > 0;
}

/// `t` must already be normalized.
inline bool matches_target(const Token& t, const TargetSpec& spec,
                           const NormalizationRules& rules) {
  return lemma_key(t.lemma, rules.case_policy) == lemma_key(spec.lemma, rules.case_policy) &&
         pos_admits(spec, rules, t.upos);
}

}  // namespace depshift
