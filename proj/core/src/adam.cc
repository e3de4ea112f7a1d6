// core/src/adam.cc

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

#include "cacem/adam.h"

#include <cmath>

#include "cacem/errors.h"

namespace cacem {

void AdamState::Init(std::span<const Var> params) {
  first_moment.clear();
  second_moment.clear();
  for (const auto &p : params) {
    first_moment.emplace_back(p->value.rows(), p->value.cols());
    second_moment.emplace_back(p->value.rows(), p->value.cols());
  }
  step = 0;
}

void AdamStep(std::span<const Var> params, AdamState &state, double lr,
              const AdamOptions &options) {
  if (state.first_moment.size() != params.size())
    Fail(ErrorKind::kContract, "AdamStep: state holds " +
                                   std::to_string(state.first_moment.size()) +
                                   " slots for " +
                                   std::to_string(params.size()) + " params");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(options.beta1, t);
  const double c2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Node &p = *params[i];
    DenseMatrix &m = state.first_moment[i];
    DenseMatrix &v = state.second_moment[i];
    if (p.grad.empty()) {
      for (double &x : m.values()) x *= options.beta1;
      for (double &x : v.values()) x *= options.beta2;
      continue;
    }
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = options.beta1 * m[j] + (1.0 - options.beta1) * g;
      v[j] = options.beta2 * v[j] + (1.0 - options.beta2) * g * g;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p.value[j] -= lr * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

double ClipGradNorm(std::span<const Var> params, double max_norm) {
  double total = 0.0;
  for (const auto &p : params)
    for (double g : p->grad.values()) total += g * g;
  const double norm = std::sqrt(total);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (const auto &p : params)
      for (double &g : p->grad.values()) g *= s;
  }
  return norm;
}

void ZeroGrads(std::span<const Var> params) {
  for (const auto &p : params) p->ZeroGrad();
}

}  // namespace cacem
