// cacem/cif.h

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

#ifndef CACEM_CIF_H_
#define CACEM_CIF_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "cacem/autograd.h"
#include "cacem/matrix.h"

namespace cacem {

/// Per-frame firing weights, one per encoder frame.
struct FiringWeights {
  std::vector<double> alpha;

  double Total() const;
  static FiringWeights FromColumn(const DenseMatrix &column);
};

/// One fragment of a frame's weight assigned to one output embedding.
/// The two flags record whether the fragment's lower / upper edge is the
/// frame's own cumulative edge (as opposed to a firing boundary); the
/// gradient with respect to alpha depends on which edges are free.
struct FrameContribution {
  std::size_t frame = 0;
  double weight = 0.0;
  bool lower_is_frame_edge = true;
  bool upper_is_frame_edge = true;
};

struct FiringResult {
  DenseMatrix embeddings;  // L' x d
  std::vector<std::vector<FrameContribution>> boundaries;
  double residual_weight = 0.0;
  // Fragments accumulated after the last firing (sum == residual_weight).
  std::vector<FrameContribution> residual;
  // True when the residual was emitted as a final (partial) embedding.
  bool tail_fired = false;

  std::size_t count() const { return boundaries.size(); }
};

enum class TailPolicy {
  kDiscard,             // training: residual is reported, never fired
  kFireIfAtLeastHalf,   // inference: residual >= 0.5 becomes a last token
};

constexpr double kFiringThreshold = 1.0;

/// Left-to-right accumulate-and-fire over frames (T x d) with weights alpha.
/// Every fired row collects exactly `threshold` of weight; a frame whose
/// weight crosses the threshold is split and both fragments reuse the same
/// frame vector.
FiringResult integrate_and_fire(const DenseMatrix &frames,
                                std::span<const double> alpha,
                                double threshold = kFiringThreshold,
                                TailPolicy tail = TailPolicy::kDiscard);

struct FiredEmbeddings {
  Var embeddings;      // L' x d, differentiable w.r.t. frames and alpha
  FiringResult trace;  // embeddings.value == trace.embeddings
};

/// Differentiable form; alpha is a T x 1 column.
FiredEmbeddings integrate_and_fire(const Var &frames, const Var &alpha,
                                   double threshold = kFiringThreshold,
                                   TailPolicy tail = TailPolicy::kDiscard);

/// alpha * (target_len / sum(alpha)).
FiringWeights scale_weights(const FiringWeights &alpha, std::size_t target_len);
Var scale_weights(const Var &alpha, std::size_t target_len);

/// |sum(alpha) - target_len|, subgradient 0 at the kink.
double quantity_loss(const FiringWeights &alpha, std::size_t target_len);
Var quantity_loss(const Var &alpha, std::size_t target_len);

/// Weight head: sigmoid(relu([e_{t-1}, e_t, e_{t+1}] W1 + b1) w2 + b2), one
/// alpha per frame; W1 is 3d x hidden.
struct PredictorParams {
  Var w1, b1, w2, b2;
};
Var predict_weights(const Var &encoder_out, const PredictorParams &params);

/// TSV with header `output_index\tframe_index\tweight`; a fired tail row is
/// included, the unfired residual is not.
void WriteFiringTrace(std::ostream &os, const FiringResult &result);

}  // namespace cacem

#endif  // CACEM_CIF_H_
