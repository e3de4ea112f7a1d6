// core/src/labeling.cc

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

#include "cacem/labeling.h"

#include <algorithm>
#include <ostream>

#include "cacem/errors.h"

namespace cacem {

std::size_t AlignmentPath::Count(EditKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      ops.begin(), ops.end(), [kind](const EditOp &op) { return op.kind == kind; }));
}

EditResult edit_distance(std::span<const int> ref, std::span<const int> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t & {
    return cost[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] != hyp[j - 1]);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }

  EditResult result;
  result.distance = at(n, m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        result.path.ops.push_back(
            {same ? EditKind::kMatch : EditKind::kSubstitute, i - 1, j - 1});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      result.path.ops.push_back({EditKind::kDelete, i - 1, std::nullopt});
      --i;
      continue;
    }
    result.path.ops.push_back({EditKind::kInsert, std::nullopt, j - 1});
    --j;
  }
  std::reverse(result.path.ops.begin(), result.path.ops.end());
  return result;
}

LabelSeq labels_for_hypothesis(std::span<const int> hyp, std::span<const int> ref) {
  LabelSeq out;
  out.basis = LabelBasis::kHypothesis;
  out.labels.assign(hyp.size(), 0);
  for (const auto &op : edit_distance(ref, hyp).path.ops)
    if (op.kind == EditKind::kMatch) out.labels[*op.hyp_index] = 1;
  return out;
}

LabelSeq labels_for_decode(std::span<const int> decode, std::span<const int> hyp) {
  LabelSeq out;
  out.basis = LabelBasis::kDecode;
  out.labels.assign(decode.size(), 0);
  // Decode plays the reference role: hypothesis deletions land on decode
  // positions.
  for (const auto &op : edit_distance(decode, hyp).path.ops)
    if (op.kind == EditKind::kMatch) out.labels[*op.ref_index] = 1;
  return out;
}

double cer(std::span<const int> hyp, std::span<const int> ref) {
  if (ref.empty())
    Fail(ErrorKind::kDegenerate, "CER undefined for an empty reference");
  return static_cast<double>(edit_distance(ref, hyp).distance) /
         static_cast<double>(ref.size());
}

Tokens corrupt(std::span<const int> ref, const CorruptionRates &rates,
               int vocab_size, Rng &rng) {
  if (rates.substitution < 0 || rates.deletion < 0 || rates.insertion < 0 ||
      rates.substitution + rates.deletion > 1.0 + 1e-12)
    Fail(ErrorKind::kContract, "corrupt: rates must be >= 0 with sub + del <= 1");
  if (vocab_size < 2)
    Fail(ErrorKind::kContract, "corrupt: substitution needs vocab_size >= 2");
  Tokens out;
  out.reserve(ref.size() * 2);
  for (int token : ref) {
    const double u = rng.Uniform();
    if (u < rates.deletion) {
      // dropped
    } else if (u < rates.deletion + rates.substitution) {
      int other = static_cast<int>(rng.Below(static_cast<std::uint64_t>(vocab_size - 1)));
      if (other >= token) ++other;
      out.push_back(other);
    } else {
      out.push_back(token);
    }
    if (rng.Uniform() < rates.insertion)
      out.push_back(static_cast<int>(rng.Below(static_cast<std::uint64_t>(vocab_size))));
  }
  return out;
}

std::string LabelBasisName(LabelBasis b) {
  return b == LabelBasis::kHypothesis ? "hypothesis" : "decode";
}

std::string LabelString(const LabelSeq &labels) {
  std::string s;
  s.reserve(labels.labels.size());
  for (int l : labels.labels) s.push_back(l ? '1' : '0');
  return s;
}

void WriteLabelRow(std::ostream &os, const std::string &utt_id,
                   const LabelSeq &labels) {
  os << utt_id << '\t' << LabelBasisName(labels.basis) << '\t'
     << LabelString(labels) << '\n';
}

}  // namespace cacem
