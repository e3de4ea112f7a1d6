// core/src/matrix.cc

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

#include "cacem/matrix.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "cacem/errors.h"

namespace cacem {

namespace {
using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;
}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols)
    Fail(ErrorKind::kDimension,
         "value count " + std::to_string(values_.size()) +
             " does not match shape " + ShapeString());
}

DenseMatrix DenseMatrix::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> v;
  v.reserve(r * c);
  for (const auto &row : rows) {
    if (row.size() != c)
      Fail(ErrorKind::kDimension, "ragged row list in FromRows");
    v.insert(v.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(v));
}

DenseMatrix DenseMatrix::Identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string DenseMatrix::ShapeString() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void DenseMatrix::SetZero() { std::fill(values_.begin(), values_.end(), 0.0); }

void DenseMatrix::AddScaled(const DenseMatrix &other, double scale) {
  if (!SameShape(other))
    Fail(ErrorKind::kDimension,
         "AddScaled " + ShapeString() + " vs " + other.ShapeString());
  const double *src = other.data();
  double *dst = values_.data();
  const std::size_t n = values_.size();
  if (scale == 1.0) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) dst[i] += scale * src[i];
  }
}

bool AllFinite(const DenseMatrix &m) {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double x) { return std::isfinite(x); });
}

double MaxAbsDiff(const DenseMatrix &a, const DenseMatrix &b) {
  if (!a.SameShape(b))
    Fail(ErrorKind::kDimension,
         "MaxAbsDiff " + a.ShapeString() + " vs " + b.ShapeString());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void Gemm(const DenseMatrix &a, bool transpose_a, const DenseMatrix &b,
          bool transpose_b, DenseMatrix *out, bool accumulate) {
  const std::size_t m = transpose_a ? a.cols() : a.rows();
  const std::size_t k = transpose_a ? a.rows() : a.cols();
  const std::size_t kb = transpose_b ? b.cols() : b.rows();
  const std::size_t n = transpose_b ? b.rows() : b.cols();
  if (k != kb)
    Fail(ErrorKind::kDimension, "matmul inner dimension mismatch: " +
                                    a.ShapeString() + (transpose_a ? "^T" : "") +
                                    " x " + b.ShapeString() +
                                    (transpose_b ? "^T" : ""));
  if (out->rows() != m || out->cols() != n) {
    if (accumulate)
      Fail(ErrorKind::kDimension, "Gemm accumulate target has shape " +
                                      out->ShapeString());
    *out = DenseMatrix(m, n);
  }
  if (m == 0 || n == 0) return;
  MutMap c(out->data(), m, n);
  if (k == 0) {
    if (!accumulate) c.setZero();
    return;
  }
  ConstMap am(a.data(), a.rows(), a.cols());
  ConstMap bm(b.data(), b.rows(), b.cols());
  auto run = [&](const auto &lhs, const auto &rhs) {
    if (accumulate)
      c.noalias() += lhs * rhs;
    else
      c.noalias() = lhs * rhs;
  };
  if (!transpose_a && !transpose_b) run(am, bm);
  else if (transpose_a && !transpose_b) run(am.transpose(), bm);
  else if (!transpose_a && transpose_b) run(am, bm.transpose());
  else run(am.transpose(), bm.transpose());
}

}  // namespace cacem
