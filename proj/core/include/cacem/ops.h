// cacem/ops.h

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

#ifndef CACEM_OPS_H_
#define CACEM_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "cacem/autograd.h"
#include "cacem/rng.h"

namespace cacem {

Var matmul(const Var &a, const Var &b);
Var add(const Var &a, const Var &b);
Var sub(const Var &a, const Var &b);
Var mul(const Var &a, const Var &b);  // element-wise
Var scale(const Var &a, double s);
Var add_scalar(const Var &a, double s);
// b is 1 x cols, broadcast over rows.
Var add_bias(const Var &m, const Var &b);
Var concat_cols(const Var &a, const Var &b);
/// out[r] = m[r - offset], zero where r - offset falls outside.
Var shift_rows(const Var &m, int offset);

Var sigmoid(const Var &m);
Var relu(const Var &m);
Var abs(const Var &m);

/// Row-wise softmax with max subtraction.
Var softmax_rows(const Var &m);

/// Per-row normalisation to zero mean / unit variance, then gain and bias
/// (both 1 x cols).
Var layer_norm(const Var &m, const Var &gain, const Var &bias,
               double epsilon = 1e-5);

/// Inverted dropout: kept entries are scaled by 1/(1-rate). Identity when
/// training is false or rate is 0.
Var dropout(const Var &m, double rate, Rng &rng, bool training);

/// Gathers rows of table; ids must be < table rows.
Var embedding_lookup(const Var &table, std::span<const int> ids);

Var sum(const Var &m);   // 1x1
Var mean(const Var &m);  // 1x1

/// Mean over rows of -log softmax(logits)[row, target].
Var cross_entropy(const Var &logits, std::span<const int> targets);

/// -(1/N) sum [c log p + (1-c) log(1-p)], p clamped to [1e-7, 1-1e-7].
/// scores is N x 1.
Var binary_cross_entropy(const Var &scores, std::span<const int> labels);

struct AttentionResult {
  Var output;
  DenseMatrix weights;
};

/// weights = softmax(q k^T / sqrt(dk) + mask), output = weights v.
/// mask is additive, q.rows x k.rows, or empty for none.
AttentionResult scaled_dot_attention(const Var &q, const Var &k, const Var &v,
                                     const DenseMatrix &mask = {});

/// Splits the columns of q/k/v into `heads` equal blocks, attends per block
/// and concatenates the block outputs. One graph node.
Var multi_head_attention(const Var &q, const Var &k, const Var &v, int heads,
                         const DenseMatrix &mask = {});

}  // namespace cacem

#endif  // CACEM_OPS_H_
