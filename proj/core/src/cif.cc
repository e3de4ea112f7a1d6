// core/src/cif.cc

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

#include "cacem/cif.h"

#include <charconv>
#include <cmath>
#include <ostream>

#include "cacem/errors.h"
#include "cacem/ops.h"

namespace cacem {

namespace {

// Accumulator slack: a sum this close to the threshold fires, and split
// remainders this small are dropped.
constexpr double kFireSlack = 1e-9;

void CheckAlpha(std::span<const double> alpha, std::size_t frames) {
  if (alpha.size() != frames)
    Fail(ErrorKind::kContract, "integrate_and_fire: " +
                                   std::to_string(alpha.size()) +
                                   " weights for " + std::to_string(frames) +
                                   " frames");
  for (std::size_t t = 0; t < alpha.size(); ++t)
    if (!(alpha[t] >= 0.0))
      Fail(ErrorKind::kContract, "integrate_and_fire: negative weight " +
                                     std::to_string(alpha[t]) + " at frame " +
                                     std::to_string(t));
}

DenseMatrix Integrate(const DenseMatrix &frames,
                      const std::vector<std::vector<FrameContribution>> &rows) {
  DenseMatrix out(rows.size(), frames.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto dst = out.row(i);
    for (const auto &piece : rows[i]) {
      auto src = frames.row(piece.frame);
      for (std::size_t c = 0; c < dst.size(); ++c)
        dst[c] += piece.weight * src[c];
    }
  }
  return out;
}

}  // namespace

double FiringWeights::Total() const {
  double s = 0.0;
  for (double a : alpha) s += a;
  return s;
}

FiringWeights FiringWeights::FromColumn(const DenseMatrix &column) {
  FiringWeights w;
  w.alpha.assign(column.values().begin(), column.values().end());
  return w;
}

FiringResult integrate_and_fire(const DenseMatrix &frames,
                                std::span<const double> alpha,
                                double threshold, TailPolicy tail) {
  CheckAlpha(alpha, frames.rows());
  FiringResult result;
  std::vector<FrameContribution> current;
  double acc = 0.0;
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    double remaining = alpha[t];
    bool first_piece = true;
    while (acc + remaining >= threshold - kFireSlack) {
      const double piece = threshold - acc;
      current.push_back({t, piece, first_piece, false});
      result.boundaries.push_back(std::move(current));
      current.clear();
      acc = 0.0;
      remaining -= piece;
      first_piece = false;
      if (remaining <= kFireSlack) {
        remaining = 0.0;
        break;
      }
    }
    if (remaining > 0.0 || first_piece) {
      current.push_back({t, remaining, first_piece, true});
      acc += remaining;
    }
  }
  result.residual_weight = acc;
  result.residual = current;
  if (tail == TailPolicy::kFireIfAtLeastHalf && acc >= 0.5) {
    result.boundaries.push_back(std::move(current));
    result.tail_fired = true;
  }
  result.embeddings = Integrate(frames, result.boundaries);
  return result;
}

FiredEmbeddings integrate_and_fire(const Var &frames, const Var &alpha,
                                   double threshold, TailPolicy tail) {
  if (alpha->value.cols() != 1 && alpha->value.size() != 0)
    Fail(ErrorKind::kDimension,
         "integrate_and_fire: alpha must be a column, got " +
             alpha->value.ShapeString());
  FiredEmbeddings fired;
  fired.trace = integrate_and_fire(frames->value, alpha->value.values(),
                                   threshold, tail);
  auto rows = fired.trace.boundaries;
  fired.embeddings = MakeResult(
      fired.trace.embeddings, {frames, alpha},
      [rows = std::move(rows)](Node &n) {
        const Var &frames = n.parents[0];
        const Var &alpha = n.parents[1];
        const std::size_t dim = frames->value.cols();
        if (frames->requires_grad) {
          DenseMatrix g(frames->value.rows(), dim);
          for (std::size_t i = 0; i < rows.size(); ++i) {
            auto gi = n.grad.row(i);
            for (const auto &piece : rows[i]) {
              auto dst = g.row(piece.frame);
              for (std::size_t c = 0; c < dim; ++c)
                dst[c] += piece.weight * gi[c];
            }
          }
          frames->AccumulateGrad(g);
        }
        if (alpha->requires_grad) {
          // A fragment's weight is upper - lower where each edge is either a
          // constant firing boundary or a cumulative sum S_t = sum_{s<=t}.
          // dS_t/d alpha_s = [s <= t], so gather per-frame edge terms and
          // take suffix sums.
          const std::size_t frames_n = alpha->value.rows();
          std::vector<double> upper(frames_n, 0.0), lower(frames_n, 0.0);
          for (std::size_t i = 0; i < rows.size(); ++i) {
            auto gi = n.grad.row(i);
            for (const auto &piece : rows[i]) {
              auto e = frames->value.row(piece.frame);
              double dot = 0.0;
              for (std::size_t c = 0; c < dim; ++c) dot += gi[c] * e[c];
              if (piece.upper_is_frame_edge) upper[piece.frame] += dot;
              if (piece.lower_is_frame_edge) lower[piece.frame] += dot;
            }
          }
          DenseMatrix g(frames_n, 1);
          double suffix = 0.0;
          for (std::size_t s = frames_n; s-- > 0;) {
            // upper edge of frame t is S_t (s <= t); lower edge is S_{t-1}
            // (s <= t - 1).
            suffix += upper[s];
            if (s + 1 < frames_n) suffix -= lower[s + 1];
            g[s] = suffix;
          }
          alpha->AccumulateGrad(g);
        }
      });
  return fired;
}

FiringWeights scale_weights(const FiringWeights &alpha,
                            std::size_t target_len) {
  const double total = alpha.Total();
  if (!(total > 0.0))
    Fail(ErrorKind::kDegenerate, "scale_weights: weights sum to zero");
  if (target_len < 1)
    Fail(ErrorKind::kContract, "scale_weights: target length must be >= 1");
  FiringWeights out = alpha;
  const double f = static_cast<double>(target_len) / total;
  for (double &a : out.alpha) a *= f;
  return out;
}

Var scale_weights(const Var &alpha, std::size_t target_len) {
  double total = 0.0;
  for (double a : alpha->value.values()) total += a;
  if (!(total > 0.0))
    Fail(ErrorKind::kDegenerate, "scale_weights: weights sum to zero");
  if (target_len < 1)
    Fail(ErrorKind::kContract, "scale_weights: target length must be >= 1");
  const double target = static_cast<double>(target_len);
  DenseMatrix out = alpha->value;
  for (double &a : out.values()) a *= target / total;
  return MakeResult(std::move(out), {alpha}, [target, total](Node &n) {
    const Var &alpha = n.parents[0];
    double dot = 0.0;
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      dot += n.grad[i] * alpha->value[i];
    DenseMatrix g(n.grad.rows(), n.grad.cols());
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = target / total * n.grad[i] - target / (total * total) * dot;
    alpha->AccumulateGrad(g);
  });
}

double quantity_loss(const FiringWeights &alpha, std::size_t target_len) {
  return std::abs(alpha.Total() - static_cast<double>(target_len));
}

Var quantity_loss(const Var &alpha, std::size_t target_len) {
  return abs(add_scalar(sum(alpha), -static_cast<double>(target_len)));
}

Var predict_weights(const Var &encoder_out, const PredictorParams &params) {
  // Each frame sees its two neighbours (a width-3 convolution).
  Var window = concat_cols(concat_cols(shift_rows(encoder_out, 1), encoder_out),
                           shift_rows(encoder_out, -1));
  Var hidden = relu(add_bias(matmul(window, params.w1), params.b1));
  return sigmoid(add_bias(matmul(hidden, params.w2), params.b2));
}

void WriteFiringTrace(std::ostream &os, const FiringResult &result) {
  os << "output_index\tframe_index\tweight\n";
  char buf[32];
  for (std::size_t i = 0; i < result.boundaries.size(); ++i)
    for (const auto &piece : result.boundaries[i]) {
      auto res = std::to_chars(buf, buf + sizeof(buf), piece.weight);
      os << i << '\t' << piece.frame << '\t';
      os.write(buf, res.ptr - buf) << '\n';
    }
}

}  // namespace cacem
