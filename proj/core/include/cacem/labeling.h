// cacem/labeling.h

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

#ifndef CACEM_LABELING_H_
#define CACEM_LABELING_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cacem/rng.h"

namespace cacem {

using Tokens = std::vector<int>;

enum class EditKind { kMatch, kSubstitute, kInsert, kDelete };

/// One step of an alignment. Delete consumes a reference token only, insert a
/// hypothesis token only.
struct EditOp {
  EditKind kind;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;
};

struct AlignmentPath {
  std::vector<EditOp> ops;

  std::size_t Count(EditKind kind) const;
  std::size_t substitutions() const { return Count(EditKind::kSubstitute); }
  std::size_t deletions() const { return Count(EditKind::kDelete); }
  std::size_t insertions() const { return Count(EditKind::kInsert); }
  std::size_t matches() const { return Count(EditKind::kMatch); }
};

struct EditResult {
  std::size_t distance = 0;
  AlignmentPath path;
};

/// Unit-cost Levenshtein alignment of hyp against ref. Among optimal paths
/// the backtrace prefers match/substitute, then delete, then insert.
EditResult edit_distance(std::span<const int> ref, std::span<const int> hyp);

enum class LabelBasis { kHypothesis, kDecode };

struct LabelSeq {
  std::vector<int> labels;
  LabelBasis basis = LabelBasis::kHypothesis;
};

/// One label per hypothesis token: 1 for a match against ref, 0 for a
/// substitution or insertion. Deleted reference tokens get no label.
LabelSeq labels_for_hypothesis(std::span<const int> hyp, std::span<const int> ref);

/// One label per decoded token: 1 when the hypothesis matches it, else 0.
/// Tokens the hypothesis dropped become 0-labelled decode positions.
LabelSeq labels_for_decode(std::span<const int> decode, std::span<const int> hyp);

/// (S + D + I) / |ref|; can exceed 1.
double cer(std::span<const int> hyp, std::span<const int> ref);

struct CorruptionRates {
  double substitution = 0.0;
  double deletion = 0.0;
  double insertion = 0.0;
};

/// Per reference token: delete w.p. deletion, else substitute w.p.
/// substitution (with a different uniformly drawn id); after every position
/// insert a random id w.p. insertion.
Tokens corrupt(std::span<const int> ref, const CorruptionRates &rates,
               int vocab_size, Rng &rng);

std::string LabelBasisName(LabelBasis b);
std::string LabelString(const LabelSeq &labels);  // "0110..."

/// TSV row `utt_id\tbasis\tlabels`.
void WriteLabelRow(std::ostream &os, const std::string &utt_id,
                   const LabelSeq &labels);

}  // namespace cacem

#endif  // CACEM_LABELING_H_
