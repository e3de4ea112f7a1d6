// tests/support/oracles.h

// Copyright 2026  The cacem Authors

// See ../../LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CACEM_TESTS_ORACLES_H_
#define CACEM_TESTS_ORACLES_H_

// Straight-line reference implementations, written independently of the
// library code they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cacem/metrics.h"

namespace cacem::testing {

// Integer micro-step CIF: alpha is given in units of 1/quantum and the
// accumulator advances one unit at a time.
struct MicroStepFiring {
  std::vector<std::vector<std::pair<std::size_t, int>>> rows;  // (frame, units)
  int residual_units = 0;
};

inline MicroStepFiring MicroStepFire(const std::vector<int> &units, int quantum) {
  MicroStepFiring out;
  std::map<std::size_t, int> current;
  int acc = 0;
  for (std::size_t t = 0; t < units.size(); ++t) {
    for (int k = 0; k < units[t]; ++k) {
      ++current[t];
      if (++acc == quantum) {
        out.rows.emplace_back(current.begin(), current.end());
        current.clear();
        acc = 0;
      }
    }
  }
  out.residual_units = acc;
  return out;
}

// Bounded exhaustive search over edit scripts: can ref become hyp with at
// most `budget` edits?
inline bool ReachableWithin(const std::vector<int> &a, std::size_t i,
                            const std::vector<int> &b, std::size_t j, int budget) {
  const long rest_a = static_cast<long>(a.size() - i);
  const long rest_b = static_cast<long>(b.size() - j);
  if (std::abs(rest_a - rest_b) > budget) return false;
  if (rest_a == 0 && rest_b == 0) return true;
  if (rest_a > 0 && rest_b > 0) {
    const int cost = a[i] == b[j] ? 0 : 1;
    if (budget >= cost && ReachableWithin(a, i + 1, b, j + 1, budget - cost)) return true;
  }
  if (budget == 0) return false;
  if (rest_a > 0 && ReachableWithin(a, i + 1, b, j, budget - 1)) return true;
  if (rest_b > 0 && ReachableWithin(a, i, b, j + 1, budget - 1)) return true;
  return false;
}

inline std::size_t ExhaustiveEditDistance(const std::vector<int> &a, const std::vector<int> &b) {
  for (int k = 0;; ++k)
    if (ReachableWithin(a, 0, b, 0, k)) return static_cast<std::size_t>(k);
}

inline double PairwiseAuc(const std::vector<ScoredToken> &t) {
  double wins = 0.0, pairs = 0.0;
  for (const auto &p : t) {
    if (p.label != 1) continue;
    for (const auto &n : t) {
      if (n.label != 0) continue;
      pairs += 1.0;
      if (p.score > n.score) wins += 1.0;
      else if (p.score == n.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline int BinOf(double s, int bins) {
  int b = static_cast<int>(std::floor(s * bins));
  return std::clamp(b, 0, bins - 1);
}

inline double StraightEce(const std::vector<ScoredToken> &t, int bins) {
  double total = 0.0;
  for (int m = 0; m < bins; ++m) {
    double n = 0.0, acc = 0.0, conf = 0.0;
    for (const auto &x : t) {
      if (BinOf(x.score, bins) != m) continue;
      n += 1.0;
      acc += x.label;
      conf += x.score;
    }
    if (n > 0) total += (n / static_cast<double>(t.size())) * std::abs(acc / n - conf / n);
  }
  return total;
}

inline double ClampedAccuracy(const UttRecord &u) { return 1.0 - std::min(u.cer, 1.0); }

inline double StraightEceU(const std::vector<UttRecord> &u, int bins, bool bin_level) {
  double total = 0.0;
  for (int m = 0; m < bins; ++m) {
    double n = 0.0, gap = 0.0, acc = 0.0, conf = 0.0;
    for (const auto &x : u) {
      if (BinOf(x.avg_conf, bins) != m) continue;
      n += 1.0;
      gap += std::abs(ClampedAccuracy(x) - x.avg_conf);
      acc += ClampedAccuracy(x);
      conf += x.avg_conf;
    }
    if (n == 0) continue;
    const double w = n / static_cast<double>(u.size());
    total += bin_level ? w * std::abs(acc / n - conf / n) : w * gap / n;
  }
  return total;
}

inline double StraightRmse(const std::vector<UttRecord> &u) {
  double s = 0.0;
  for (const auto &x : u) s += (x.avg_conf - ClampedAccuracy(x)) * (x.avg_conf - ClampedAccuracy(x));
  return std::sqrt(s / static_cast<double>(u.size()));
}

inline std::optional<double> StraightSubsetError(const std::vector<UttRecord> &u, double threshold) {
  double errors = 0.0, tokens = 0.0;
  for (const auto &x : u)
    if (x.avg_conf >= threshold) {
      errors += static_cast<double>(x.edit_errors);
      tokens += static_cast<double>(x.token_count);
    }
  if (tokens == 0.0) return std::nullopt;
  return errors / tokens;
}

}  // namespace cacem::testing

#endif  // CACEM_TESTS_ORACLES_H_
