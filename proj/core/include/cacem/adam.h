// cacem/adam.h

// Copyright 2026  The cacem Authors

// See ../../../LICENSE for clarification regarding multiple authors
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

#ifndef CACEM_ADAM_H_
#define CACEM_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "cacem/autograd.h"

namespace cacem {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment buffers, one pair per parameter, in the order the
/// parameters are passed to AdamStep.
struct AdamState {
  std::vector<DenseMatrix> first_moment;
  std::vector<DenseMatrix> second_moment;
  std::int64_t step = 0;

  void Init(std::span<const Var> params);
};

/// One bias-corrected Adam update. Parameters with no gradient are skipped
/// (their moments still decay, which keeps the update a pure function of the
/// gradient history). Gradients are not cleared.
void AdamStep(std::span<const Var> params, AdamState &state, double lr,
              const AdamOptions &options = {});

/// Scales all gradients so their global L2 norm is at most max_norm; returns
/// the norm before clipping.
double ClipGradNorm(std::span<const Var> params, double max_norm);

void ZeroGrads(std::span<const Var> params);

}  // namespace cacem

#endif  // CACEM_ADAM_H_
