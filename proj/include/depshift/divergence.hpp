// Jensen-Shannon divergence between slot filler distributions, in bits,
// with an additive per-filler decomposition.
//
// All sums run over fillers in sorted key order with compensated summation,
// so results are reproducible and jsd(P, Q) == jsd(Q, P) bit for bit.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "depshift/slots.hpp"
#include "depshift/transform.hpp"

namespace depshift {

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Distribution {
  std::map<std::string, double> probs;
};

enum class Direction { increase, decrease, unchanged };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::increase: return "increase";
    case Direction::decrease: return "decrease";
    case Direction::unchanged: return "unchanged";
  }
  return "unchanged";
}

inline Direction direction_from_string(std::string_view s) {
  if (s == "increase") return Direction::increase;
  if (s == "decrease") return Direction::decrease;
  if (s == "unchanged") return Direction::unchanged;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

struct FillerContribution {
  std::string filler;
  double prob_1 = 0.0;
  double prob_2 = 0.0;
  double contribution = 0.0;
  Direction direction = Direction::unchanged;
};

struct SlotChange {
  std::string slot;
  double jsd = 0.0;
  std::vector<FillerContribution> contributions;  // descending by contribution
  std::size_t support_1 = 0;                      // distinct fillers, period 1
  std::size_t support_2 = 0;
};

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline Distribution to_distribution(const FillerCounts& counts) {
  if (counts.empty()) throw DivergenceError("empty slot side");
  std::int64_t total = 0;
  for (const auto& [filler, n] : counts) {
    if (n < 1) throw DivergenceError("non-positive count for filler '" + filler + "'");
    total += n;
  }
  Distribution d;
  for (const auto& [filler, n] : counts) {
    d.probs.emplace(filler, static_cast<double>(n) / static_cast<double>(total));
  }
  return d;
}

namespace detail {

// x * log2(x), with 0 log 0 = 0.
inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Visits the union of both supports in key order as (key, p, q).
template <typename Visit>
void for_each_aligned(const Distribution& P, const Distribution& Q, Visit&& visit) {
  auto ip = P.probs.begin();
  auto iq = Q.probs.begin();
  while (ip != P.probs.end() || iq != Q.probs.end()) {
    if (iq == Q.probs.end() || (ip != P.probs.end() && ip->first < iq->first)) {
      visit(ip->first, ip->second, 0.0);
      ++ip;
    } else if (ip == P.probs.end() || iq->first < ip->first) {
      visit(iq->first, 0.0, iq->second);
      ++iq;
    } else {
      visit(ip->first, ip->second, iq->second);
      ++ip;
      ++iq;
    }
  }
}

}  // namespace detail

/// H(M) - (H(P) + H(Q)) / 2 with M = (P + Q) / 2, clamped to [0, 1].
/// Disjoint supports give exactly 1.
inline double jsd(const Distribution& P, const Distribution& Q) {
  CompensatedSum neg_hm, neg_hp, neg_hq;
  bool overlap = false;
  detail::for_each_aligned(P, Q, [&](const std::string&, double p, double q) {
    if (p > 0.0 && q > 0.0) overlap = true;
    neg_hm.add(detail::xlog2x(0.5 * (p + q)));
    neg_hp.add(detail::xlog2x(p));
    neg_hq.add(detail::xlog2x(q));
  });
  if (!overlap) return 1.0;
  const double hm = -neg_hm.value();
  const double mean_h = -(neg_hp.value() + neg_hq.value()) / 2.0;
  return std::clamp(hm - mean_h, 0.0, 1.0);
}

/// Splits jsd(P, Q) into per-filler terms
///   (p/2) log2(p/m) + (q/2) log2(q/m),  m = (p + q) / 2,
/// which are non-negative and sum to the divergence.
inline SlotChange jsd_decompose(const Distribution& P, const Distribution& Q) {
  SlotChange out;
  out.jsd = jsd(P, Q);
  out.support_1 = P.probs.size();
  out.support_2 = Q.probs.size();
  detail::for_each_aligned(P, Q, [&](const std::string& key, double p, double q) {
    const double m = 0.5 * (p + q);
    double c = 0.0;
    if (p > 0.0) c += 0.5 * p * std::log2(p / m);
    if (q > 0.0) c += 0.5 * q * std::log2(q / m);
    FillerContribution fc;
    fc.filler = key;
    fc.prob_1 = p;
    fc.prob_2 = q;
    fc.contribution = std::max(0.0, c);
    fc.direction = q > p ? Direction::increase : (q < p ? Direction::decrease : Direction::unchanged);
    out.contributions.push_back(std::move(fc));
  });
  std::stable_sort(out.contributions.begin(), out.contributions.end(),
                   [](const FillerContribution& a, const FillerContribution& b) {
                     return a.contribution > b.contribution;
                   });
  return out;
}

/// Compares one slot across periods. A slot seen in only one period has
/// disjoint support: jsd 1, and each filler contributes its own probability.
inline SlotChange compare_slot(const std::string& slot, const FillerCounts& c1,
                               const FillerCounts& c2) {
  if (c1.empty() && c2.empty()) throw DivergenceError("slot '" + slot + "' is empty in both periods");
  SlotChange out;
  if (c1.empty() || c2.empty()) {
    const bool only_first = c2.empty();
    const Distribution d = to_distribution(only_first ? c1 : c2);
    out.jsd = 1.0;
    out.support_1 = c1.size();
    out.support_2 = c2.size();
    for (const auto& [filler, prob] : d.probs) {
      FillerContribution fc;
      fc.filler = filler;
      fc.prob_1 = only_first ? prob : 0.0;
      fc.prob_2 = only_first ? 0.0 : prob;
      fc.contribution = prob;
      fc.direction = only_first ? Direction::decrease : Direction::increase;
      out.contributions.push_back(std::move(fc));
    }
    std::stable_sort(out.contributions.begin(), out.contributions.end(),
                     [](const FillerContribution& a, const FillerContribution& b) {
                       return a.contribution > b.contribution;
                     });
  } else {
    out = jsd_decompose(to_distribution(c1), to_distribution(c2));
  }
  out.slot = slot;
  return out;
}

/// Slot changes for every slot seen in either period, in slot-name order.
inline std::vector<SlotChange> compare_profiles(const ProfilePair& pair) {
  static const FillerCounts empty;
  std::vector<std::string> slots;
  for (const auto& [slot, f] : pair.p1.counts) {
    if (!f.empty()) slots.push_back(slot);
  }
  for (const auto& [slot, f] : pair.p2.counts) {
    if (!f.empty()) slots.push_back(slot);
  }
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
  std::vector<SlotChange> out;
  out.reserve(slots.size());
  for (const auto& slot : slots) {
    const auto a = pair.p1.counts.find(slot);
    const auto b = pair.p2.counts.find(slot);
    out.push_back(compare_slot(slot, a == pair.p1.counts.end() ? empty : a->second,
                               b == pair.p2.counts.end() ? empty : b->second));
  }
  return out;
}

}  // namespace depshift
