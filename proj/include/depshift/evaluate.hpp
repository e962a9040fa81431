// Scoring against gold annotations: Spearman's rho for graded change,
// accuracy for binary change. Gold files are "target<TAB>value" TSV.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "depshift/text.hpp"

namespace depshift {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GoldData {
  std::map<std::string, double> graded;
  std::map<std::string, int> binary;
};

namespace detail {

template <typename A, typename B>
void require_same_keys(const std::map<std::string, A>& pred, const std::map<std::string, B>& gold) {
  std::vector<std::string> missing, extra;
  for (const auto& [k, v] : gold) {
    if (!pred.count(k)) missing.push_back(k);
  }
  for (const auto& [k, v] : pred) {
    if (!gold.count(k)) extra.push_back(k);
  }
  if (missing.empty() && extra.empty()) return;
  std::string msg = "target sets differ";
  if (!missing.empty()) msg += "; missing predictions for " + std::to_string(missing.size()) +
                               " target(s), first '" + missing.front() + "'";
  if (!extra.empty()) msg += "; " + std::to_string(extra.size()) +
                             " target(s) absent from gold, first '" + extra.front() + "'";
  throw EvaluationError(msg);
}

}  // namespace detail

/// 1-based ranks in input order; tied values share their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw EvaluationError("undefined correlation: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double spearman(const std::map<std::string, double>& pred,
                       const std::map<std::string, double>& gold) {
  detail::require_same_keys(pred, gold);
  if (pred.size() < 2) throw EvaluationError("spearman needs at least 2 targets");
  std::vector<double> x, y;
  for (const auto& [k, v] : pred) {
    x.push_back(v);
    y.push_back(gold.at(k));
  }
  return pearson(average_ranks(x), average_ranks(y));
}

inline double accuracy(const std::map<std::string, int>& pred,
                       const std::map<std::string, int>& gold) {
  detail::require_same_keys(pred, gold);
  if (pred.empty()) throw EvaluationError("accuracy needs at least 1 target");
  std::size_t hits = 0;
  for (const auto& [k, v] : pred) hits += (gold.at(k) == v) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

/// Reads "key<TAB>value" lines, skipping blank ones.
inline std::map<std::string, std::string> read_tsv_pairs(std::istream& in,
                                                         const std::string& source) {
  std::map<std::string, std::string> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty()) continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos || raw.find('\t', tab + 1) != std::string::npos) {
      throw EvaluationError(source + ":" + std::to_string(line_no) +
                            ": expected exactly 2 tab-separated columns");
    }
    std::string key(trim(std::string_view(raw).substr(0, tab)));
    std::string value(trim(std::string_view(raw).substr(tab + 1)));
    if (key.empty()) throw EvaluationError(source + ":" + std::to_string(line_no) + ": empty target");
    if (!out.emplace(key, value).second) {
      throw EvaluationError(source + ":" + std::to_string(line_no) + ": duplicate target '" + key + "'");
    }
  }
  return out;
}

inline double parse_real(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw EvaluationError(where + ": not a number: '" + s + "'");
  }
  return v;
}

inline std::map<std::string, double> parse_graded(std::istream& in, const std::string& source) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : read_tsv_pairs(in, source)) out[k] = parse_real(v, source + " (" + k + ")");
  return out;
}

inline std::map<std::string, int> parse_binary(std::istream& in, const std::string& source) {
  std::map<std::string, int> out;
  for (const auto& [k, v] : read_tsv_pairs(in, source)) {
    if (v != "0" && v != "1") {
      throw EvaluationError(source + " (" + k + "): non-binary label '" + v + "'");
    }
    out[k] = v == "1" ? 1 : 0;
  }
  return out;
}

inline GoldData load_gold(const std::string& path_binary, const std::string& path_graded) {
  GoldData g;
  if (!path_binary.empty()) {
    std::ifstream in(path_binary);
    if (!in) throw EvaluationError("cannot read '" + path_binary + "'");
    g.binary = parse_binary(in, path_binary);
  }
  if (!path_graded.empty()) {
    std::ifstream in(path_graded);
    if (!in) throw EvaluationError("cannot read '" + path_graded + "'");
    g.graded = parse_graded(in, path_graded);
  }
  return g;
}

}  // namespace depshift
