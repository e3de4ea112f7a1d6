// tests/support/gradcheck.h

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

#ifndef CACEM_TESTS_GRADCHECK_H_
#define CACEM_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cacem/autograd.h"
#include "cacem/ops.h"
#include "cacem/rng.h"

namespace cacem::testing {

struct GradCheckOptions {
  double step = 1e-4;
  double floor = 1e-6;           // skip elements with |a| + |n| below this
  std::size_t max_per_input = 0;  // 0: every element
  std::uint64_t seed = 1;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;
};

// Central differences of loss_fn() against the analytic gradient of every
// named input. loss_fn must rebuild the graph and be deterministic.
inline GradCheckReport CheckGradients(const std::function<Var()> &loss_fn,
                                      const std::vector<std::pair<std::string, Var>> &inputs,
                                      const GradCheckOptions &opt = {}) {
  for (auto &[name, v] : inputs) v->ZeroGrad();
  Backward(loss_fn());
  std::vector<DenseMatrix> analytic;
  for (auto &[name, v] : inputs) analytic.push_back(v->GradOrZero());

  Rng pick(opt.seed);
  GradCheckReport report;
  NoGradScope no_grad;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto &[name, v] = inputs[k];
    std::vector<std::size_t> idx(v->value.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (opt.max_per_input && idx.size() > opt.max_per_input) {
      for (std::size_t i = 0; i < opt.max_per_input; ++i)
        std::swap(idx[i], idx[i + pick.Below(idx.size() - i)]);
      idx.resize(opt.max_per_input);
    }
    for (std::size_t i : idx) {
      const double saved = v->value[i];
      v->value[i] = saved + opt.step;
      const double up = loss_fn()->value[0];
      v->value[i] = saved - opt.step;
      const double down = loss_fn()->value[0];
      v->value[i] = saved;
      const double numeric = (up - down) / (2.0 * opt.step);
      const double a = analytic[k][i];
      if (std::abs(a) + std::abs(numeric) <= opt.floor) continue;
      const double rel = std::abs(a - numeric) / std::max(std::abs(a), std::abs(numeric));
      ++report.checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst = name + "[" + std::to_string(i) + "] analytic " + std::to_string(a) +
                       " numeric " + std::to_string(numeric);
      }
    }
  }
  return report;
}

inline DenseMatrix RandomMatrix(std::size_t rows, std::size_t cols, Rng &rng,
                                double lo = -2.0, double hi = 2.0) {
  DenseMatrix m(rows, cols);
  for (double &x : m.values()) x = rng.Uniform(lo, hi);
  return m;
}

// sum(m * R) for a fixed random R, so that row-normalised outputs still have
// a non-trivial gradient.
inline Var WeightedSum(const Var &m, std::uint64_t seed = 99) {
  Rng rng(seed);
  return sum(mul(m, MakeConstant(RandomMatrix(m->value.rows(), m->value.cols(), rng))));
}

}  // namespace cacem::testing

#endif  // CACEM_TESTS_GRADCHECK_H_
