// tests/unit/test_labeling.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "cacem/errors.h"
#include "cacem/labeling.h"
#include "cacem/rng.h"
#include "oracles.h"

using namespace cacem;

namespace {

// 9-token reference; hypothesis substitutes the first token and drops the
// seventh.
const Tokens kRef{1, 2, 3, 4, 5, 6, 7, 8, 9};
const Tokens kHyp{20, 2, 3, 4, 5, 6, 8, 9};

Tokens RandomSeq(Rng &rng, std::size_t max_len, int vocab) {
  Tokens t(rng.Below(max_len + 1));
  for (int &x : t) x = static_cast<int>(rng.Below(static_cast<std::uint64_t>(vocab)));
  return t;
}

}  // namespace

TEST_CASE("edit distance on the case-study pair") {
  EditResult e = edit_distance(kRef, kHyp);
  CHECK(e.distance == 2);
  CHECK(e.path.substitutions() == 1);
  CHECK(e.path.deletions() == 1);
  CHECK(e.path.insertions() == 0);
  CHECK(cer(kHyp, kRef) == doctest::Approx(2.0 / 9.0));
  CHECK(1.0 - cer(kHyp, kRef) == doctest::Approx(0.778).epsilon(1e-3));
}

TEST_CASE("edit distance agrees with the exhaustive oracle") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const Tokens a = RandomSeq(rng, 6, 3), b = RandomSeq(rng, 6, 3);
    EditResult e = edit_distance(a, b);
    CHECK(e.distance == testing::ExhaustiveEditDistance(a, b));
    // Ops cover each index exactly once.
    std::vector<int> ref_seen(a.size()), hyp_seen(b.size());
    std::size_t cost = 0;
    for (const auto &op : e.path.ops) {
      if (op.ref_index) ++ref_seen[*op.ref_index];
      if (op.hyp_index) ++hyp_seen[*op.hyp_index];
      if (op.kind != EditKind::kMatch) ++cost;
    }
    CHECK(cost == e.distance);
    for (int c : ref_seen) CHECK(c == 1);
    for (int c : hyp_seen) CHECK(c == 1);
  }
}

TEST_CASE("cer edge cases") {
  CHECK(cer(kRef, kRef) == 0.0);
  CHECK(cer(Tokens{4, 5, 6, 7, 8, 9}, Tokens{1, 2, 3}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(cer(kHyp, Tokens{}), Error);
}

TEST_CASE("hypothesis labels") {
  LabelSeq l = labels_for_hypothesis(kHyp, kRef);
  CHECK(l.basis == LabelBasis::kHypothesis);
  CHECK(l.labels == std::vector<int>{0, 1, 1, 1, 1, 1, 1, 1});
  CHECK(labels_for_hypothesis(kRef, kRef).labels == std::vector<int>(9, 1));
  CHECK(labels_for_hypothesis(Tokens{3, 4}, Tokens{}).labels == std::vector<int>{0, 0});
  CHECK(LabelString(l) == "01111111");

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Tokens h = RandomSeq(rng, 8, 4), r = RandomSeq(rng, 8, 4);
    LabelSeq s = labels_for_hypothesis(h, r);
    CHECK(s.labels.size() == h.size());
    EditResult e = edit_distance(r, h);
    std::size_t zeros = 0;
    for (int x : s.labels) zeros += x == 0;
    CHECK(zeros == e.path.substitutions() + e.path.insertions());
  }
}

TEST_CASE("decode labels") {
  LabelSeq l = labels_for_decode(kRef, kHyp);
  CHECK(l.basis == LabelBasis::kDecode);
  CHECK(l.labels == std::vector<int>{0, 1, 1, 1, 1, 1, 0, 1, 1});
  CHECK(labels_for_decode(kHyp, kHyp).labels == std::vector<int>(8, 1));
  CHECK(labels_for_decode(kRef, Tokens{}).labels == std::vector<int>(9, 0));
}

TEST_CASE("corruption") {
  Rng rng(1);
  CHECK(corrupt(kRef, {}, 30, rng) == kRef);
  CHECK(corrupt(kRef, {0.0, 1.0, 0.0}, 30, rng).empty());
  CHECK_THROWS_AS(corrupt(kRef, {0.7, 0.7, 0.0}, 30, rng), Error);

  Tokens ref(20000);
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = static_cast<int>(i % 30);
  const double n = static_cast<double>(ref.size());
  const double rate = 0.2;

  Tokens del = corrupt(ref, {0.0, rate, 0.0}, 30, rng);
  CHECK((n - static_cast<double>(del.size())) / n == doctest::Approx(rate).epsilon(0.1));

  Tokens ins = corrupt(ref, {0.0, 0.0, rate}, 30, rng);
  CHECK((static_cast<double>(ins.size()) - n) / n == doctest::Approx(rate).epsilon(0.1));

  Tokens sub = corrupt(ref, {rate, 0.0, 0.0}, 30, rng);
  REQUIRE(sub.size() == ref.size());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) changed += sub[i] != ref[i];
  CHECK(static_cast<double>(changed) / n == doctest::Approx(rate).epsilon(0.1));

  Rng a(5), b(5);
  CHECK(corrupt(ref, {0.1, 0.1, 0.1}, 30, a) == corrupt(ref, {0.1, 0.1, 0.1}, 30, b));
}
