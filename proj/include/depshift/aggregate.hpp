// Lemma-level scores, ranking, and binary classification.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "depshift/divergence.hpp"

namespace depshift {

class AggregateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ThresholdMode { strict, inclusive };

struct LemmaScore {
  std::string target_id;
  double score = 0.0;
  std::vector<std::string> slots_used;
  std::size_t slots_total = 0;
  std::vector<SlotChange> all_slots;
};

inline bool passes(double jsd, double threshold, ThresholdMode mode) {
  return mode == ThresholdMode::strict ? jsd > threshold : jsd >= threshold;
}

/// Mean JSD over the slots above `threshold`; 0 when no slot qualifies.
inline LemmaScore aggregate_lemma_score(std::vector<SlotChange> slot_changes, double threshold,
                                        ThresholdMode mode = ThresholdMode::strict,
                                        std::string target_id = {}) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw AggregateError("slot threshold must lie in [0, 1]");
  }
  LemmaScore out;
  out.target_id = std::move(target_id);
  out.slots_total = slot_changes.size();
  std::vector<double> used;
  for (const auto& sc : slot_changes) {
    if (passes(sc.jsd, threshold, mode)) {
      used.push_back(sc.jsd);
      out.slots_used.push_back(sc.slot);
    }
  }
  // Summing in sorted order makes the mean independent of slot order.
  std::sort(used.begin(), used.end());
  std::sort(out.slots_used.begin(), out.slots_used.end());
  if (!used.empty()) {
    out.score = std::accumulate(used.begin(), used.end(), 0.0) / static_cast<double>(used.size());
  }
  std::sort(slot_changes.begin(), slot_changes.end(),
            [](const SlotChange& a, const SlotChange& b) { return a.slot < b.slot; });
  out.all_slots = std::move(slot_changes);
  return out;
}

struct RankedEntry {
  std::string target_id;
  double score = 0.0;
  int rank = 0;
};

struct RankedList {
  static constexpr const char* tie_policy = "score descending, then target_id ascending";
  std::vector<RankedEntry> entries;
};

inline RankedList rank_lemmas(std::span<const LemmaScore> scores) {
  if (scores.empty()) throw AggregateError("cannot rank an empty lemma list");
  RankedList out;
  for (const auto& s : scores) out.entries.push_back({s.target_id, s.score, 0});
  std::sort(out.entries.begin(), out.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.target_id < b.target_id;
  });
  for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i].rank = static_cast<int>(i + 1);
  return out;
}

using Labels = std::map<std::string, int>;

/// Number of positives for a top-`fraction` cutoff: round-half-up(fraction * n).
/// The small epsilon absorbs binary representation error (0.43 * 50 = 21.5).
inline std::size_t percentile_positives(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw AggregateError("fraction must lie in (0, 1)");
  const double k = std::floor(fraction * static_cast<double>(n) + 0.5 + 1e-9);
  return std::min(n, static_cast<std::size_t>(k));
}

inline Labels classify_percentile(const RankedList& ranked, double fraction) {
  const std::size_t k = percentile_positives(ranked.entries.size(), fraction);
  Labels out;
  for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
    out[ranked.entries[i].target_id] = i < k ? 1 : 0;
  }
  return out;
}

/// Totals within this absolute distance of the minimum count as tied.
inline constexpr double kSplitTieTolerance = 1e-12;

/// Split index k in [1, n-1] of a descending score vector minimizing
/// SSE(y[0..k)) + SSE(y[k..n)), SSE = sum(y^2) - (sum y)^2 / len.
/// Ties go to the smallest k. Prefix sums make this O(n).
inline std::size_t best_split(std::span<const double> sorted_desc) {
  const std::size_t n = sorted_desc.size();
  if (n < 2) throw AggregateError("degenerate input: change point needs at least 2 scores");
  std::vector<double> s(n + 1, 0.0), q(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    s[i + 1] = s[i] + sorted_desc[i];
    q[i + 1] = q[i] + sorted_desc[i] * sorted_desc[i];
  }
  auto sse = [&](std::size_t b, std::size_t e) {
    const double sum = s[e] - s[b];
    const double len = static_cast<double>(e - b);
    return std::max(0.0, (q[e] - q[b]) - sum * sum / len);
  };
  std::vector<double> cost(n);
  double best = INFINITY;
  for (std::size_t k = 1; k < n; ++k) {
    cost[k] = sse(0, k) + sse(k, n);
    best = std::min(best, cost[k]);
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (cost[k] <= best + kSplitTieTolerance) return k;
  }
  return 1;
}

struct ChangePoint {
  std::size_t split = 0;
  Labels labels;
};

/// Sorts scores descending (ranking tie policy), splits at the change point
/// and labels the upper segment 1.
inline ChangePoint classify_changepoint(std::span<const LemmaScore> scores) {
  if (scores.size() < 2) throw AggregateError("degenerate input: change point needs at least 2 scores");
  const RankedList ranked = rank_lemmas(scores);
  std::vector<double> ys;
  for (const auto& e : ranked.entries) ys.push_back(e.score);
  ChangePoint out;
  out.split = best_split(ys);
  for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
    out.labels[ranked.entries[i].target_id] = i < out.split ? 1 : 0;
  }
  return out;
}

}  // namespace depshift
