// Brute-force reference implementations for testing. Deliberately shares no
// code with divergence.hpp or aggregate.hpp.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace depshift::oracle {

using Probs = std::unordered_map<std::string, double>;

/// KL(P || M) in bits, natural log rescaled.
inline double kl_bits(const Probs& p, const Probs& m) {
  double acc = 0.0;
  for (const auto& [k, pk] : p) {
    if (pk <= 0.0) continue;
    acc += pk * std::log(pk / m.at(k));
  }
  return acc / std::log(2.0);
}

/// JSD = KL(P || M) / 2 + KL(Q || M) / 2.
inline double oracle_jsd(const Probs& p, const Probs& q) {
  Probs m;
  for (const auto& [k, v] : p) m[k] += v / 2.0;
  for (const auto& [k, v] : q) m[k] += v / 2.0;
  return 0.5 * kl_bits(p, m) + 0.5 * kl_bits(q, m);
}

/// Per-filler JSD terms via the KL route: p log(p/m)/2 + q log(q/m)/2.
inline Probs oracle_contributions(const Probs& p, const Probs& q) {
  Probs out;
  auto term = [](double a, double m) { return a > 0.0 ? a * std::log(a / m) / std::log(2.0) : 0.0; };
  Probs keys = p;
  for (const auto& [k, v] : q) keys.emplace(k, 0.0);
  for (const auto& [k, unused] : keys) {
    const double pk = p.count(k) ? p.at(k) : 0.0;
    const double qk = q.count(k) ? q.at(k) : 0.0;
    const double m = (pk + qk) / 2.0;
    out[k] = 0.5 * term(pk, m) + 0.5 * term(qk, m);
  }
  return out;
}

/// Direct within-segment squared error, summed term by term.
inline double direct_sse(const std::vector<double>& y, std::size_t begin, std::size_t end) {
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    sum += y[i];
    sq += y[i] * y[i];
  }
  return std::max(0.0, sq - sum * sum / static_cast<double>(end - begin));
}

/// Exhaustive O(n^2) change point over a descending score vector; smallest k
/// among (numerically) tied optima.
inline std::size_t oracle_split(const std::vector<double>& sorted_desc) {
  const std::size_t n = sorted_desc.size();
  if (n < 2) throw std::invalid_argument("oracle_split needs n >= 2");
  std::vector<double> totals(n, 0.0);
  double best = HUGE_VAL;
  for (std::size_t k = 1; k < n; ++k) {
    totals[k] = direct_sse(sorted_desc, 0, k) + direct_sse(sorted_desc, k, n);
    if (totals[k] < best) best = totals[k];
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (totals[k] - best <= 1e-12) return k;
  }
  return 1;
}

}  // namespace depshift::oracle
