#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include "f0priv/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace f0priv::testing {

// Brute-force EER: count errors at every observed threshold and at +inf with
// plain loops, then interpolate across the first crossing.
inline double eer_oracle(const ScoreSet& s) {
  std::vector<double> thresholds = s.target;
  thresholds.insert(thresholds.end(), s.nontarget.begin(), s.nontarget.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<std::pair<double, double>> points;  // (far, frr)
  for (const double th : thresholds) {
    int fa = 0, fr = 0;
    for (const double n : s.nontarget) fa += n >= th;
    for (const double t : s.target) fr += t < th;
    points.emplace_back(double(fa) / s.nontarget.size(), double(fr) / s.target.size());
  }
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto [far, frr] = points[k];
    if (frr >= far) {
      const auto [pfar, pfrr] = points[k - 1];
      double rate;
      if (frr == far) {
        rate = frr;
      } else {
        const double a = (pfar - pfrr) / ((pfar - pfrr) - (far - frr));
        rate = pfrr + a * (frr - pfrr);
      }
      return std::min(100 * rate, 100 - 100 * rate);
    }
  }
  return 50.0;
}

// Exhaustive monotone recalibration: every partition of the sorted distinct
// scores into contiguous blocks, each block at its own optimal LLR, keeping
// only partitions whose block LLRs are non-decreasing.
inline double cllr_min_oracle(const ScoreSet& s) {
  std::vector<std::pair<double, bool>> pooled;
  for (double t : s.target) pooled.emplace_back(t, true);
  for (double n : s.nontarget) pooled.emplace_back(n, false);
  std::sort(pooled.begin(), pooled.end());
  std::vector<std::pair<double, double>> groups;  // (targets, nontargets)
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    if (i == 0 || pooled[i].first != pooled[i - 1].first) groups.emplace_back(0, 0);
    (pooled[i].second ? groups.back().first : groups.back().second) += 1;
  }
  const double T = s.target.size(), N = s.nontarget.size();
  const std::size_t k = groups.size();
  const double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  for (unsigned mask = 0; mask < (1u << (k - 1)); ++mask) {
    std::vector<std::pair<double, double>> blocks{groups[0]};
    for (std::size_t g = 1; g < k; ++g) {
      if (mask & (1u << (g - 1))) {
        blocks.push_back(groups[g]);
      } else {
        blocks.back().first += groups[g].first;
        blocks.back().second += groups[g].second;
      }
    }
    double prev = -inf;
    bool monotone = true;
    double cost = 0.0;
    for (const auto& [a, b] : blocks) {
      const double llr = b == 0 ? inf : a == 0 ? -inf : std::log((a / T) / (b / N));
      if (llr < prev) monotone = false;
      prev = llr;
      if (a > 0 && b > 0) {
        cost += a / T * std::log2(1 + std::exp(-llr)) + b / N * std::log2(1 + std::exp(llr));
      }
    }
    if (monotone) best = std::min(best, 0.5 * cost);
  }
  return best;
}

}  // namespace f0priv::testing
