// tests/unit/test_metrics.cc

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

#include <algorithm>
#include <cmath>
#include <vector>

#include "cacem/errors.h"
#include "cacem/labeling.h"
#include "cacem/metrics.h"
#include "cacem/rng.h"
#include "oracles.h"

using namespace cacem;
using namespace cacem::testing;

namespace {

std::vector<ScoredToken> RandomTokens(Rng &rng, std::size_t n) {
  std::vector<ScoredToken> t(n);
  for (auto &x : t) {
    x.score = std::round(rng.Uniform() * 20.0) / 20.0;  // plenty of ties
    x.label = rng.Uniform() < 0.6 ? 1 : 0;
  }
  t[0].label = 1;
  t[1].label = 0;
  return t;
}

UttRecord Utt(const std::string &id, double conf, double cer, bool del = false,
              std::size_t len = 10) {
  UttRecord u;
  u.utt_id = id;
  u.avg_conf = conf;
  u.cer = cer;
  u.has_deletion = del;
  u.token_count = len;
  u.edit_errors = static_cast<std::size_t>(std::lround(cer * static_cast<double>(len)));
  return u;
}

std::vector<UttRecord> RandomUtts(Rng &rng, std::size_t n) {
  std::vector<UttRecord> u;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 1 + rng.Below(12);
    const std::size_t err = rng.Below(len + 3);
    UttRecord r = Utt("u" + std::to_string(i), 0.01 + 0.98 * rng.Uniform(),
                      static_cast<double>(err) / static_cast<double>(len), rng.Uniform() < 0.3, len);
    r.edit_errors = err;
    u.push_back(r);
  }
  return u;
}

}  // namespace

TEST_CASE("roc points") {
  const std::vector<ScoredToken> two{{0.9, 1}, {0.1, 0}};
  const std::vector<double> th{0.0, 0.5, std::nextafter(1.0, 2.0)};
  auto pts = roc_points(two, th);
  CHECK(pts[0].tpr == 1.0);
  CHECK(pts[0].fpr == 1.0);
  CHECK(pts[1].tpr == 1.0);
  CHECK(pts[1].fpr == 0.0);
  CHECK(pts[2].tpr == 0.0);
  CHECK(pts[2].fpr == 0.0);

  Rng rng(1);
  auto tokens = RandomTokens(rng, 20);
  const auto grid = EqualSpacedThresholds();
  CHECK(grid.size() == 201);
  auto roc = roc_points(tokens, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double tp = 0, fp = 0, p = 0, n = 0;
    for (const auto &t : tokens) {
      (t.label ? p : n) += 1;
      if (t.score >= grid[k]) (t.label ? tp : fp) += 1;
    }
    CHECK(roc[k].tpr == doctest::Approx(tp / p).epsilon(1e-15));
    CHECK(roc[k].fpr == doctest::Approx(fp / n).epsilon(1e-15));
  }
  const std::vector<ScoredToken> one_class{{0.3, 1}, {0.4, 1}};
  CHECK_THROWS_AS(roc_points(one_class, grid), Error);
  CHECK_THROWS_AS(auc(one_class), Error);
}

TEST_CASE("auc") {
  const std::vector<ScoredToken> sep{{0.9, 1}, {0.8, 1}, {0.2, 0}, {0.1, 0}};
  CHECK(auc(sep) == 1.0);
  const std::vector<ScoredToken> tied{{0.5, 1}, {0.5, 0}, {0.5, 1}};
  CHECK(auc(tied) == 0.5);

  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    auto t = RandomTokens(rng, 50);
    CHECK(std::abs(auc(t) - PairwiseAuc(t)) < 1e-12);
    auto squashed = t;
    for (auto &x : squashed) x.score = std::pow(x.score, 3.0) * 0.5;
    CHECK(std::abs(auc(squashed) - auc(t)) < 1e-12);
    const double es = auc(t, AucMethod::kEqualSpaced);
    CHECK(es >= 0.0);
    CHECK(es <= 1.0);
  }
}

TEST_CASE("ece") {
  const std::vector<ScoredToken> perfect{{1.0, 1}, {1.0, 1}};
  CHECK(ece(perfect) == 0.0);
  const std::vector<ScoredToken> one_bin{{0.6, 1}, {0.8, 0}};
  CHECK(ece(one_bin, 1) == doctest::Approx(0.2).epsilon(1e-14));
  Rng rng(3);
  auto t = RandomTokens(rng, 100);
  CHECK(std::abs(ece(t, 10) - StraightEce(t, 10)) < 1e-12);
  CHECK_THROWS_AS(ece(t, 0), Error);
}

TEST_CASE("ece-u and rmse") {
  std::vector<UttRecord> exact{Utt("a", 0.8, 0.2), Utt("b", 0.5, 0.5)};
  CHECK(ece_u(exact) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rmse_u(exact) == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<UttRecord> two{Utt("a", 0.9, 0.2), Utt("b", 0.5, 0.5)};
  CHECK(ece_u(two, 1) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(ece_u(two, 1, EceUMode::kBinLevel) == doctest::Approx(0.05).epsilon(1e-14));
  std::vector<UttRecord> one{Utt("a", 0.9, 0.2)};
  CHECK(rmse_u(one) == doctest::Approx(0.1).epsilon(1e-14));

  // Insertions push CER above 1; accuracy clamps at 0.
  CHECK(Utt("x", 0.5, 2.0).Accuracy() == 0.0);

  Rng rng(4);
  auto u = RandomUtts(rng, 20);
  CHECK(std::abs(ece_u(u, 10) - StraightEceU(u, 10, false)) < 1e-12);
  CHECK(std::abs(ece_u(u, 10, EceUMode::kBinLevel) - StraightEceU(u, 10, true)) < 1e-12);
  CHECK(std::abs(rmse_u(u) - StraightRmse(u)) < 1e-12);
  auto shuffled = u;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(ece_u(shuffled) == ece_u(u));
  CHECK(rmse_u(shuffled) == rmse_u(u));
}

TEST_CASE("filter curve") {
  Rng rng(5);
  auto u = RandomUtts(rng, 30);
  const auto grid = EqualSpacedThresholds();
  auto curve = filter_curve(u, grid);
  REQUIRE(curve.size() == grid.size());
  CHECK(curve.front().subset_size == u.size());
  CHECK(*curve.front().error_rate == doctest::Approx(corpus_error_rate(u)));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    auto ref = StraightSubsetError(u, grid[k]);
    CHECK(curve[k].error_rate.has_value() == ref.has_value());
    if (ref) CHECK(std::abs(*curve[k].error_rate - *ref) < 1e-12);
  }
  CHECK_FALSE(curve.back().error_rate.has_value());

  // Oracle confidence: label mean of an utterance with k errors out of n.
  std::vector<UttRecord> oracle;
  for (std::size_t i = 0; i < 40; ++i) {
    const std::size_t errs = i % 6;
    UttRecord r = Utt("o" + std::to_string(i), 1.0 - static_cast<double>(errs) / 10.0,
                      static_cast<double>(errs) / 10.0);
    r.edit_errors = errs;
    oracle.push_back(r);
  }
  auto oc = filter_curve(oracle, grid);
  std::optional<double> prev;
  for (const auto &p : oc) {
    if (!p.error_rate) continue;
    if (prev) CHECK(*p.error_rate <= *prev + 1e-15);
    prev = p.error_rate;
  }

  // One confident utterance full of deletions spikes the right end.
  std::vector<UttRecord> spike;
  for (int i = 0; i < 20; ++i) spike.push_back(Utt("s" + std::to_string(i), 0.5 + 0.02 * i, 0.0, true));
  spike.push_back(Utt("bad", 0.99, 0.6, true));
  auto sc = filter_curve(spike, grid);
  const double left = *sc.front().error_rate;
  const double right = *filter_curve(spike, std::vector<double>{0.985})[0].error_rate;
  CHECK(left < 0.05);
  CHECK(right == doctest::Approx(0.6));
}

TEST_CASE("split by deletion") {
  std::vector<UttRecord> clean{Utt("a", 0.9, 0.0), Utt("b", 0.8, 0.0)};
  auto [nd, d] = split_by_deletion(clean);
  CHECK(nd.size() == 2);
  CHECK(d.empty());

  Rng rng(6);
  std::vector<UttRecord> u;
  std::vector<bool> expected;
  for (int i = 0; i < 50; ++i) {
    Tokens ref(1 + rng.Below(8));
    for (int &x : ref) x = static_cast<int>(rng.Below(5));
    Tokens hyp = corrupt(ref, {0.2, 0.2, 0.2}, 5, rng);
    EditResult e = edit_distance(ref, hyp);
    UttRecord r = Utt("r" + std::to_string(i), 0.5, cer(hyp, ref), e.path.deletions() > 0,
                      ref.size());
    u.push_back(r);
    std::size_t dels = 0;
    for (const auto &op : e.path.ops) dels += op.kind == EditKind::kDelete;
    expected.push_back(dels > 0);
  }
  auto [a, b] = split_by_deletion(u);
  CHECK(a.size() + b.size() == u.size());
  for (const auto &r : b) {
    const std::size_t i = std::stoul(r.utt_id.substr(1));
    CHECK(expected[i]);
  }
  for (const auto &r : a) {
    const std::size_t i = std::stoul(r.utt_id.substr(1));
    CHECK_FALSE(expected[i]);
  }
}

TEST_CASE("report is pure") {
  Rng rng(7);
  auto t = RandomTokens(rng, 60);
  auto u = RandomUtts(rng, 25);
  MetricsReport a = BuildReport("x", t, u), b = BuildReport("x", t, u);
  CHECK(a.ToJson().dump() == b.ToJson().dump());
  CHECK(a.n_tokens == 60);
  CHECK(a.n_utts == 25);
  CHECK(a.curve_no_deletion.size() == a.curve_all.size());
}
