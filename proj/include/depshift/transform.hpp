// Denoising transforms on paired period profiles: rare-filler filtering and
// POS stripping of filler keys.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "depshift/slots.hpp"

namespace depshift {

struct ProfilePair {
  std::string target_id;
  SlotProfile p1;
  SlotProfile p2;

  friend bool operator==(const ProfilePair&, const ProfilePair&) = default;
};

inline ProfilePair make_profile_pair(SlotProfile p1, SlotProfile p2) {
  if (p1.period != 1 || p2.period != 2) {
    throw std::invalid_argument("profile pair needs period 1 and period 2 profiles");
  }
  if (p1.target_id != p2.target_id) {
    throw std::invalid_argument("profile pair target mismatch: '" + p1.target_id + "' vs '" +
                                p2.target_id + "'");
  }
  std::string id = p1.target_id;
  return ProfilePair{std::move(id), std::move(p1), std::move(p2)};
}

/// Drops, per slot, every filler whose combined count over both periods is
/// below `min_total`, from both periods. Slots left empty are removed.
inline ProfilePair filter_rare_fillers(const ProfilePair& pair, std::int64_t min_total) {
  if (min_total < 1) throw std::invalid_argument("min_total must be >= 1");
  ProfilePair out = pair;
  if (min_total == 1) return out;
  out.p1.counts.clear();
  out.p2.counts.clear();
  auto total_of = [](const SlotCounts& counts, const std::string& slot,
                     const std::string& filler) -> std::int64_t {
    const auto s = counts.find(slot);
    if (s == counts.end()) return 0;
    const auto f = s->second.find(filler);
    return f == s->second.end() ? 0 : f->second;
  };
  auto keep_side = [&](const SlotCounts& mine, const SlotCounts& theirs, SlotCounts& dst) {
    for (const auto& [slot, fillers] : mine) {
      for (const auto& [filler, n] : fillers) {
        if (n + total_of(theirs, slot, filler) >= min_total) dst[slot][filler] = n;
      }
    }
  };
  keep_side(pair.p1.counts, pair.p2.counts, out.p1.counts);
  keep_side(pair.p2.counts, pair.p1.counts, out.p2.counts);
  return out;
}

/// "run/VERB" -> "run". Keys without a slash are returned unchanged.
inline std::string strip_pos_suffix(const std::string& filler) {
  const auto slash = filler.rfind('/');
  return slash == std::string::npos ? filler : filler.substr(0, slash);
}

inline SlotCounts strip_pos(const SlotCounts& counts) {
  SlotCounts out;
  for (const auto& [slot, fillers] : counts) {
    auto& dst = out[slot];
    for (const auto& [filler, n] : fillers) dst[strip_pos_suffix(filler)] += n;
  }
  return out;
}

/// Truncates every filler key at its last "/" and sums colliding counts.
inline ProfilePair strip_pos(const ProfilePair& pair) {
  ProfilePair out = pair;
  out.p1.counts = strip_pos(pair.p1.counts);
  out.p2.counts = strip_pos(pair.p2.counts);
  return out;
}

enum class TransformOrder { filter_then_strip, strip_then_filter };

struct TransformOptions {
  std::int64_t min_total = 2;
  bool keep_pos = false;
  TransformOrder order = TransformOrder::filter_then_strip;
};

inline ProfilePair apply_transforms(const ProfilePair& pair, const TransformOptions& opts) {
  if (opts.keep_pos) return filter_rare_fillers(pair, opts.min_total);
  if (opts.order == TransformOrder::filter_then_strip) {
    return strip_pos(filter_rare_fillers(pair, opts.min_total));
  }
  return filter_rare_fillers(strip_pos(pair), opts.min_total);
}

}  // namespace depshift
