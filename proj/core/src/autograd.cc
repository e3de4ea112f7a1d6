// core/src/autograd.cc

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

#include "cacem/autograd.h"

#include <unordered_set>

#include "cacem/errors.h"

namespace cacem {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

void Node::AccumulateGrad(const DenseMatrix &delta) {
  if (grad.empty() && !value.empty()) {
    grad = delta;
    return;
  }
  grad.AddScaled(delta);
}

const DenseMatrix &Node::GradOrZero() {
  if (grad.empty()) grad = DenseMatrix(value.rows(), value.cols());
  return grad;
}

Var MakeConstant(DenseMatrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return n;
}

Var MakeParameter(DenseMatrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return n;
}

Var MakeResult(DenseMatrix value, std::vector<Var> parents,
               std::function<void(Node &)> backward_fn) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->is_leaf = false;
  if (!g_grad_enabled) return n;
  bool needs = false;
  for (const auto &p : parents) needs = needs || (p && p->requires_grad);
  if (needs) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backward_fn = std::move(backward_fn);
  }
  return n;
}

void Backward(const Var &loss) {
  if (loss->value.rows() != 1 || loss->value.cols() != 1)
    Fail(ErrorKind::kContract,
         "backward expects a 1x1 loss, got " + loss->value.ShapeString());
  if (!loss->requires_grad) return;

  // Iterative post-order DFS; reversed it is a valid topological order.
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, std::size_t>> stack;
  stack.emplace_back(loss.get(), 0);
  seen.insert(loss.get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      Node *p = node->parents[next++].get();
      if (p && p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }

  for (Node *n : order)
    if (!n->is_leaf) n->ZeroGrad();
  loss->AccumulateGrad(DenseMatrix(1, 1, 1.0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *n = *it;
    if (n->is_leaf || !n->backward_fn || n->grad.empty()) continue;
    n->backward_fn(*n);
  }
}

NoGradScope::NoGradScope() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}
NoGradScope::~NoGradScope() { g_grad_enabled = previous_; }

bool GradRecordingEnabled() { return g_grad_enabled; }

}  // namespace cacem
