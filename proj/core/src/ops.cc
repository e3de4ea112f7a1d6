// core/src/ops.cc

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

#include "cacem/ops.h"

#include <algorithm>
#include <cmath>

#include "cacem/errors.h"

namespace cacem {

namespace {

void RequireSameShape(const char *op, const DenseMatrix &a,
                      const DenseMatrix &b) {
  if (!a.SameShape(b))
    Fail(ErrorKind::kDimension, std::string(op) + ": shapes " +
                                    a.ShapeString() + " and " +
                                    b.ShapeString());
}

bool Wants(const Var &v) { return v && v->requires_grad; }

template <typename F>
Var Elementwise(const Var &m, F f, std::function<void(Node &)> bwd) {
  DenseMatrix out(m->value.rows(), m->value.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(m->value[i]);
  return MakeResult(std::move(out), {m}, std::move(bwd));
}

// Row-wise softmax in place.
void SoftmaxInPlace(DenseMatrix *m) {
  for (std::size_t r = 0; r < m->rows(); ++r) {
    auto row = m->row(r);
    if (row.empty()) continue;
    double mx = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double &x : row) {
      x = std::exp(x - mx);
      total += x;
    }
    for (double &x : row) x /= total;
  }
}

// g_in = y * (g - rowsum(g * y))
DenseMatrix SoftmaxBackward(const DenseMatrix &y, const DenseMatrix &g) {
  DenseMatrix out(y.rows(), y.cols());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    double dot = 0.0;
    for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
    for (std::size_t c = 0; c < y.cols(); ++c)
      out(r, c) = y(r, c) * (g(r, c) - dot);
  }
  return out;
}

DenseMatrix ColumnBlock(const DenseMatrix &m, std::size_t start,
                        std::size_t width) {
  DenseMatrix out(m.rows(), width);
  for (std::size_t r = 0; r < m.rows(); ++r)
    std::copy_n(m.row(r).begin() + start, width, out.row(r).begin());
  return out;
}

void AddColumnBlock(const DenseMatrix &block, std::size_t start,
                    DenseMatrix *m) {
  for (std::size_t r = 0; r < block.rows(); ++r) {
    auto src = block.row(r);
    auto dst = m->row(r);
    for (std::size_t c = 0; c < block.cols(); ++c) dst[start + c] += src[c];
  }
}

struct HeadForward {
  DenseMatrix weights;
  DenseMatrix output;
};

HeadForward AttendHead(const DenseMatrix &q, const DenseMatrix &k,
                       const DenseMatrix &v, const DenseMatrix &mask) {
  HeadForward h;
  Gemm(q, false, k, true, &h.weights, false);
  const double inv = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  for (std::size_t i = 0; i < h.weights.size(); ++i) h.weights[i] *= inv;
  if (!mask.empty()) h.weights.AddScaled(mask);
  SoftmaxInPlace(&h.weights);
  Gemm(h.weights, false, v, false, &h.output, false);
  return h;
}

struct HeadGrads {
  DenseMatrix gq, gk, gv;
};

HeadGrads AttendHeadBackward(const DenseMatrix &q, const DenseMatrix &k,
                             const DenseMatrix &v, const DenseMatrix &weights,
                             const DenseMatrix &g) {
  HeadGrads out;
  DenseMatrix gw;
  Gemm(g, false, v, true, &gw, false);
  Gemm(weights, true, g, false, &out.gv, false);
  DenseMatrix gs = SoftmaxBackward(weights, gw);
  const double inv = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  for (std::size_t i = 0; i < gs.size(); ++i) gs[i] *= inv;
  Gemm(gs, false, k, false, &out.gq, false);
  Gemm(gs, true, q, false, &out.gk, false);
  return out;
}

void CheckAttentionShapes(const Var &q, const Var &k, const Var &v,
                          const DenseMatrix &mask) {
  if (q->value.cols() != k->value.cols())
    Fail(ErrorKind::kDimension, "attention: query " + q->value.ShapeString() +
                                    " vs key " + k->value.ShapeString());
  if (k->value.rows() != v->value.rows())
    Fail(ErrorKind::kDimension, "attention: key " + k->value.ShapeString() +
                                    " vs value " + v->value.ShapeString());
  if (!mask.empty() &&
      (mask.rows() != q->value.rows() || mask.cols() != k->value.rows()))
    Fail(ErrorKind::kDimension,
         "attention: mask " + mask.ShapeString() + " for " +
             std::to_string(q->value.rows()) + " queries and " +
             std::to_string(k->value.rows()) + " keys");
}

}  // namespace

Var matmul(const Var &a, const Var &b) {
  if (a->value.cols() != b->value.rows())
    Fail(ErrorKind::kDimension, "matmul: " + a->value.ShapeString() + " x " +
                                    b->value.ShapeString());
  DenseMatrix out;
  Gemm(a->value, false, b->value, false, &out, false);
  return MakeResult(std::move(out), {a, b}, [](Node &n) {
    const Var &a = n.parents[0];
    const Var &b = n.parents[1];
    if (Wants(a)) {
      DenseMatrix ga;
      Gemm(n.grad, false, b->value, true, &ga, false);
      a->AccumulateGrad(ga);
    }
    if (Wants(b)) {
      DenseMatrix gb;
      Gemm(a->value, true, n.grad, false, &gb, false);
      b->AccumulateGrad(gb);
    }
  });
}

Var add(const Var &a, const Var &b) {
  RequireSameShape("add", a->value, b->value);
  DenseMatrix out = a->value;
  out.AddScaled(b->value);
  return MakeResult(std::move(out), {a, b}, [](Node &n) {
    for (auto &p : n.parents)
      if (Wants(p)) p->AccumulateGrad(n.grad);
  });
}

Var sub(const Var &a, const Var &b) {
  RequireSameShape("sub", a->value, b->value);
  DenseMatrix out = a->value;
  out.AddScaled(b->value, -1.0);
  return MakeResult(std::move(out), {a, b}, [](Node &n) {
    if (Wants(n.parents[0])) n.parents[0]->AccumulateGrad(n.grad);
    if (Wants(n.parents[1])) {
      DenseMatrix g(n.grad.rows(), n.grad.cols());
      g.AddScaled(n.grad, -1.0);
      n.parents[1]->AccumulateGrad(g);
    }
  });
}

Var mul(const Var &a, const Var &b) {
  RequireSameShape("mul", a->value, b->value);
  DenseMatrix out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b->value[i];
  return MakeResult(std::move(out), {a, b}, [](Node &n) {
    const Var &a = n.parents[0];
    const Var &b = n.parents[1];
    if (Wants(a)) {
      DenseMatrix g = n.grad;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= b->value[i];
      a->AccumulateGrad(g);
    }
    if (Wants(b)) {
      DenseMatrix g = n.grad;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= a->value[i];
      b->AccumulateGrad(g);
    }
  });
}

Var scale(const Var &a, double s) {
  DenseMatrix out = a->value;
  for (double &x : out.values()) x *= s;
  return MakeResult(std::move(out), {a}, [s](Node &n) {
    DenseMatrix g(n.grad.rows(), n.grad.cols());
    g.AddScaled(n.grad, s);
    n.parents[0]->AccumulateGrad(g);
  });
}

Var add_scalar(const Var &a, double s) {
  DenseMatrix out = a->value;
  for (double &x : out.values()) x += s;
  return MakeResult(std::move(out), {a}, [](Node &n) {
    n.parents[0]->AccumulateGrad(n.grad);
  });
}

Var add_bias(const Var &m, const Var &b) {
  if (b->value.rows() != 1 || b->value.cols() != m->value.cols())
    Fail(ErrorKind::kDimension, "add_bias: bias " + b->value.ShapeString() +
                                    " for matrix " + m->value.ShapeString());
  DenseMatrix out = m->value;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += b->value[c];
  }
  return MakeResult(std::move(out), {m, b}, [](Node &n) {
    if (Wants(n.parents[0])) n.parents[0]->AccumulateGrad(n.grad);
    if (Wants(n.parents[1])) {
      DenseMatrix g(1, n.grad.cols());
      for (std::size_t r = 0; r < n.grad.rows(); ++r)
        for (std::size_t c = 0; c < n.grad.cols(); ++c) g[c] += n.grad(r, c);
      n.parents[1]->AccumulateGrad(g);
    }
  });
}

Var concat_cols(const Var &a, const Var &b) {
  if (a->value.rows() != b->value.rows())
    Fail(ErrorKind::kDimension, "concat_cols: " + a->value.ShapeString() +
                                    " and " + b->value.ShapeString());
  const std::size_t ca = a->value.cols();
  const std::size_t cb = b->value.cols();
  DenseMatrix out(a->value.rows(), ca + cb);
  AddColumnBlock(a->value, 0, &out);
  AddColumnBlock(b->value, ca, &out);
  return MakeResult(std::move(out), {a, b}, [ca, cb](Node &n) {
    if (Wants(n.parents[0]))
      n.parents[0]->AccumulateGrad(ColumnBlock(n.grad, 0, ca));
    if (Wants(n.parents[1]))
      n.parents[1]->AccumulateGrad(ColumnBlock(n.grad, ca, cb));
  });
}

Var shift_rows(const Var &m, int offset) {
  const auto rows = static_cast<std::ptrdiff_t>(m->value.rows());
  const std::size_t cols = m->value.cols();
  DenseMatrix out(m->value.rows(), cols);
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const std::ptrdiff_t src = r - offset;
    if (src < 0 || src >= rows) continue;
    std::copy_n(m->value.row(src).begin(), cols, out.row(r).begin());
  }
  return MakeResult(std::move(out), {m}, [offset, rows, cols](Node &n) {
    DenseMatrix g(static_cast<std::size_t>(rows), cols);
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      const std::ptrdiff_t src = r - offset;
      if (src < 0 || src >= rows) continue;
      std::copy_n(n.grad.row(r).begin(), cols, g.row(src).begin());
    }
    n.parents[0]->AccumulateGrad(g);
  });
}

Var sigmoid(const Var &m) {
  return Elementwise(
      m, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](Node &n) {
        DenseMatrix g = n.grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double y = n.value[i];
          g[i] *= y * (1.0 - y);
        }
        n.parents[0]->AccumulateGrad(g);
      });
}

Var relu(const Var &m) {
  return Elementwise(
      m, [](double x) { return x > 0.0 ? x : 0.0; },
      [](Node &n) {
        DenseMatrix g = n.grad;
        for (std::size_t i = 0; i < g.size(); ++i)
          if (n.parents[0]->value[i] <= 0.0) g[i] = 0.0;
        n.parents[0]->AccumulateGrad(g);
      });
}

Var abs(const Var &m) {
  return Elementwise(
      m, [](double x) { return std::abs(x); },
      [](Node &n) {
        DenseMatrix g = n.grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double x = n.parents[0]->value[i];
          g[i] *= x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        }
        n.parents[0]->AccumulateGrad(g);
      });
}

Var softmax_rows(const Var &m) {
  DenseMatrix out = m->value;
  SoftmaxInPlace(&out);
  return MakeResult(std::move(out), {m}, [](Node &n) {
    n.parents[0]->AccumulateGrad(SoftmaxBackward(n.value, n.grad));
  });
}

Var layer_norm(const Var &m, const Var &gain, const Var &bias,
               double epsilon) {
  const std::size_t rows = m->value.rows();
  const std::size_t cols = m->value.cols();
  if (gain->value.rows() != 1 || gain->value.cols() != cols ||
      !gain->value.SameShape(bias->value))
    Fail(ErrorKind::kDimension, "layer_norm: gain " +
                                    gain->value.ShapeString() + " bias " +
                                    bias->value.ShapeString() + " for " +
                                    m->value.ShapeString());
  DenseMatrix normed(rows, cols);
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto x = m->value.row(r);
    double mu = 0.0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(cols);
    double var = 0.0;
    for (double v : x) var += (v - mu) * (v - mu);
    var /= static_cast<double>(cols);
    inv_std[r] = 1.0 / std::sqrt(var + epsilon);
    for (std::size_t c = 0; c < cols; ++c)
      normed(r, c) = (x[c] - mu) * inv_std[r];
  }
  DenseMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out(r, c) = normed(r, c) * gain->value[c] + bias->value[c];
  return MakeResult(
      std::move(out), {m, gain, bias},
      [normed = std::move(normed), inv_std = std::move(inv_std)](Node &n) {
        const Var &x = n.parents[0];
        const Var &gain = n.parents[1];
        const Var &bias = n.parents[2];
        const std::size_t rows = n.grad.rows();
        const std::size_t cols = n.grad.cols();
        if (Wants(gain) || Wants(bias)) {
          DenseMatrix gg(1, cols), gb(1, cols);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
              gg[c] += n.grad(r, c) * normed(r, c);
              gb[c] += n.grad(r, c);
            }
          if (Wants(gain)) gain->AccumulateGrad(gg);
          if (Wants(bias)) bias->AccumulateGrad(gb);
        }
        if (Wants(x)) {
          DenseMatrix gx(rows, cols);
          const double inv_n = 1.0 / static_cast<double>(cols);
          for (std::size_t r = 0; r < rows; ++r) {
            double mean_g = 0.0, mean_gx = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
              const double gh = n.grad(r, c) * gain->value[c];
              mean_g += gh;
              mean_gx += gh * normed(r, c);
            }
            mean_g *= inv_n;
            mean_gx *= inv_n;
            for (std::size_t c = 0; c < cols; ++c) {
              const double gh = n.grad(r, c) * gain->value[c];
              gx(r, c) = inv_std[r] * (gh - mean_g - normed(r, c) * mean_gx);
            }
          }
          x->AccumulateGrad(gx);
        }
      });
}

Var dropout(const Var &m, double rate, Rng &rng, bool training) {
  if (rate < 0.0 || rate >= 1.0)
    Fail(ErrorKind::kContract,
         "dropout rate must lie in [0, 1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return m;
  const double keep_scale = 1.0 / (1.0 - rate);
  DenseMatrix mask(m->value.rows(), m->value.cols());
  for (double &x : mask.values()) x = rng.Uniform() < rate ? 0.0 : keep_scale;
  DenseMatrix out = m->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return MakeResult(std::move(out), {m}, [mask = std::move(mask)](Node &n) {
    DenseMatrix g = n.grad;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= mask[i];
    n.parents[0]->AccumulateGrad(g);
  });
}

Var embedding_lookup(const Var &table, std::span<const int> ids) {
  const std::size_t vocab = table->value.rows();
  const std::size_t dim = table->value.cols();
  DenseMatrix out(ids.size(), dim);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab)
      Fail(ErrorKind::kLookup, "token id " + std::to_string(ids[i]) +
                                   " outside vocabulary of size " +
                                   std::to_string(vocab));
    auto src = table->value.row(static_cast<std::size_t>(ids[i]));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<int> kept(ids.begin(), ids.end());
  return MakeResult(std::move(out), {table}, [kept = std::move(kept)](Node &n) {
    const Var &table = n.parents[0];
    DenseMatrix g(table->value.rows(), table->value.cols());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      auto src = n.grad.row(i);
      auto dst = g.row(static_cast<std::size_t>(kept[i]));
      for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
    }
    table->AccumulateGrad(g);
  });
}

Var sum(const Var &m) {
  double total = 0.0;
  for (double x : m->value.values()) total += x;
  return MakeResult(DenseMatrix(1, 1, total), {m}, [](Node &n) {
    const Var &m = n.parents[0];
    m->AccumulateGrad(DenseMatrix(m->value.rows(), m->value.cols(), n.grad[0]));
  });
}

Var mean(const Var &m) {
  if (m->value.empty())
    Fail(ErrorKind::kEmptyInput, "mean of an empty matrix");
  return scale(sum(m), 1.0 / static_cast<double>(m->value.size()));
}

Var cross_entropy(const Var &logits, std::span<const int> targets) {
  const std::size_t rows = logits->value.rows();
  const std::size_t cols = logits->value.cols();
  if (targets.size() != rows)
    Fail(ErrorKind::kContract, "cross_entropy: " + std::to_string(rows) +
                                   " rows but " +
                                   std::to_string(targets.size()) + " targets");
  if (rows == 0) Fail(ErrorKind::kEmptyInput, "cross_entropy on zero rows");
  DenseMatrix probs = logits->value;
  SoftmaxInPlace(&probs);
  double loss = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= cols)
      Fail(ErrorKind::kLookup, "cross_entropy target " +
                                   std::to_string(targets[r]) + " outside " +
                                   std::to_string(cols) + " classes");
    loss -= std::log(std::max(probs(r, targets[r]), 1e-300));
  }
  loss /= static_cast<double>(rows);
  std::vector<int> kept(targets.begin(), targets.end());
  return MakeResult(
      DenseMatrix(1, 1, loss), {logits},
      [probs = std::move(probs), kept = std::move(kept)](Node &n) {
        DenseMatrix g = probs;
        const double s = n.grad[0] / static_cast<double>(g.rows());
        for (std::size_t r = 0; r < g.rows(); ++r) g(r, kept[r]) -= 1.0;
        for (double &x : g.values()) x *= s;
        n.parents[0]->AccumulateGrad(g);
      });
}

Var binary_cross_entropy(const Var &scores, std::span<const int> labels) {
  const std::size_t n = scores->value.size();
  if (labels.size() != n)
    Fail(ErrorKind::kContract, "bce_loss: " + std::to_string(n) +
                                   " scores but " +
                                   std::to_string(labels.size()) + " labels");
  if (n == 0) Fail(ErrorKind::kEmptyInput, "bce_loss on an empty sequence");
  constexpr double kLo = 1e-7;
  constexpr double kHi = 1.0 - 1e-7;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      Fail(ErrorKind::kContract, "bce_loss labels must be 0/1");
    const double p = std::clamp(scores->value[i], kLo, kHi);
    loss -= labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  loss /= static_cast<double>(n);
  std::vector<int> kept(labels.begin(), labels.end());
  return MakeResult(
      DenseMatrix(1, 1, loss), {scores}, [kept = std::move(kept)](Node &n) {
        const Var &s = n.parents[0];
        const double count = static_cast<double>(kept.size());
        DenseMatrix g(s->value.rows(), s->value.cols());
        for (std::size_t i = 0; i < kept.size(); ++i) {
          const double p = s->value[i];
          if (p < kLo || p > kHi) continue;  // clamp has zero slope outside
          g[i] = n.grad[0] * (p - kept[i]) / (count * p * (1.0 - p));
        }
        s->AccumulateGrad(g);
      });
}

AttentionResult scaled_dot_attention(const Var &q, const Var &k, const Var &v,
                                     const DenseMatrix &mask) {
  CheckAttentionShapes(q, k, v, mask);
  HeadForward h = AttendHead(q->value, k->value, v->value, mask);
  DenseMatrix weights = h.weights;
  Var out = MakeResult(std::move(h.output), {q, k, v},
                       [w = std::move(h.weights)](Node &n) {
                         const Var &q = n.parents[0];
                         const Var &k = n.parents[1];
                         const Var &v = n.parents[2];
                         HeadGrads g = AttendHeadBackward(q->value, k->value,
                                                          v->value, w, n.grad);
                         if (Wants(q)) q->AccumulateGrad(g.gq);
                         if (Wants(k)) k->AccumulateGrad(g.gk);
                         if (Wants(v)) v->AccumulateGrad(g.gv);
                       });
  return {out, std::move(weights)};
}

Var multi_head_attention(const Var &q, const Var &k, const Var &v, int heads,
                         const DenseMatrix &mask) {
  CheckAttentionShapes(q, k, v, mask);
  const std::size_t dim = q->value.cols();
  if (heads < 1 || dim % static_cast<std::size_t>(heads) != 0 ||
      v->value.cols() != dim)
    Fail(ErrorKind::kDimension, "multi_head_attention: " +
                                    std::to_string(heads) + " heads over q " +
                                    q->value.ShapeString() + " v " +
                                    v->value.ShapeString());
  const std::size_t width = dim / static_cast<std::size_t>(heads);
  DenseMatrix out(q->value.rows(), dim);
  std::vector<DenseMatrix> weights;
  weights.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const std::size_t start = static_cast<std::size_t>(h) * width;
    HeadForward f = AttendHead(ColumnBlock(q->value, start, width),
                               ColumnBlock(k->value, start, width),
                               ColumnBlock(v->value, start, width), mask);
    AddColumnBlock(f.output, start, &out);
    weights.push_back(std::move(f.weights));
  }
  return MakeResult(
      std::move(out), {q, k, v},
      [weights = std::move(weights), width](Node &n) {
        const Var &q = n.parents[0];
        const Var &k = n.parents[1];
        const Var &v = n.parents[2];
        DenseMatrix gq(q->value.rows(), q->value.cols());
        DenseMatrix gk(k->value.rows(), k->value.cols());
        DenseMatrix gv(v->value.rows(), v->value.cols());
        for (std::size_t h = 0; h < weights.size(); ++h) {
          const std::size_t start = h * width;
          HeadGrads g = AttendHeadBackward(
              ColumnBlock(q->value, start, width),
              ColumnBlock(k->value, start, width),
              ColumnBlock(v->value, start, width), weights[h],
              ColumnBlock(n.grad, start, width));
          AddColumnBlock(g.gq, start, &gq);
          AddColumnBlock(g.gk, start, &gk);
          AddColumnBlock(g.gv, start, &gv);
        }
        if (Wants(q)) q->AccumulateGrad(gq);
        if (Wants(k)) k->AccumulateGrad(gk);
        if (Wants(v)) v->AccumulateGrad(gv);
      });
}

}  // namespace cacem
