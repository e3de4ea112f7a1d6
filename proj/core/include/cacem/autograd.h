// cacem/autograd.h

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

#ifndef CACEM_AUTOGRAD_H_
#define CACEM_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cacem/matrix.h"

namespace cacem {

struct Node;
using Var = std::shared_ptr<Node>;

/// One value in a recorded computation graph. Leaves created with
/// MakeParameter keep their gradient across backward passes (accumulating);
/// interior gradients are reset at the start of every Backward.
struct Node {
  DenseMatrix value;
  DenseMatrix grad;  // empty until something flows into it
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<Var> parents;
  // Reads this->grad, pushes contributions into parents.
  std::function<void(Node &)> backward_fn;

  /// grad += delta (allocating on first use).
  void AccumulateGrad(const DenseMatrix &delta);
  /// Grad view that is zero-filled when nothing flowed in.
  const DenseMatrix &GradOrZero();
  void ZeroGrad() { grad = DenseMatrix(); }
};

Var MakeConstant(DenseMatrix value);
Var MakeParameter(DenseMatrix value);

/// Builds an interior node. If none of the parents needs a gradient the
/// result is a constant and backward_fn is dropped.
Var MakeResult(DenseMatrix value, std::vector<Var> parents,
               std::function<void(Node &)> backward_fn);

/// Reverse pass from a 1x1 loss. Parameter gradients accumulate additively
/// over repeated calls until zeroed by the caller.
void Backward(const Var &loss);

/// RAII guard that disables graph recording; results become constants.
class NoGradScope {
 public:
  NoGradScope();
  ~NoGradScope();
  NoGradScope(const NoGradScope &) = delete;
  NoGradScope &operator=(const NoGradScope &) = delete;

 private:
  bool previous_;
};

bool GradRecordingEnabled();

}  // namespace cacem

#endif  // CACEM_AUTOGRAD_H_
