// core/src/training.cc

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

#include "cacem/training.h"

#include <algorithm>
#include <cmath>

#include "cacem/adam.h"
#include "cacem/errors.h"
#include "cacem/ops.h"

namespace cacem {

namespace {

// Epoch-wise shuffled index stream.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    Shuffle();
  }

  std::vector<std::size_t> Next(std::size_t batch) {
    std::vector<std::size_t> out;
    out.reserve(batch);
    while (out.size() < batch) {
      if (pos_ == order_.size()) {
        Shuffle();
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  void Shuffle() {
    for (std::size_t i = order_.size(); i > 1; --i)
      std::swap(order_[i - 1], order_[rng_.Below(i)]);
  }

  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  Rng rng_;
};

void CheckFinite(double loss, int step, const char *what) {
  if (!std::isfinite(loss))
    Fail(ErrorKind::kDivergence, std::string(what) + " loss became non-finite at step " +
                                     std::to_string(step));
}

double Optimize(const std::vector<Var> &params, AdamState &state, const Var &loss,
                const OptimConfig &optim, int step) {
  Backward(loss);
  if (optim.grad_clip > 0.0) ClipGradNorm(params, optim.grad_clip);
  const double lr = NoamRate(step, optim.warmup_steps, optim.peak_lr);
  AdamStep(params, state, lr, {optim.beta1, optim.beta2, optim.epsilon});
  ZeroGrads(params);
  return lr;
}

}  // namespace

void OptimConfig::Validate() const {
  if (total_steps < 1 || batch_size < 1)
    Fail(ErrorKind::kContract, "total_steps and batch_size must be >= 1");
  if (warmup_steps < 1 || warmup_steps > total_steps)
    Fail(ErrorKind::kContract, "warm-up steps must lie in [1, total_steps]");
  if (!(peak_lr > 0.0)) Fail(ErrorKind::kContract, "peak_lr must be positive");
}

nlohmann::json OptimConfig::ToJson() const {
  return {{"peak_lr", peak_lr},   {"warmup_steps", warmup_steps},
          {"total_steps", total_steps}, {"batch_size", batch_size},
          {"grad_clip", grad_clip}, {"beta1", beta1},
          {"beta2", beta2},       {"epsilon", epsilon}};
}

OptimConfig OptimConfig::FromJson(const nlohmann::json &j, OptimConfig d) {
  d.peak_lr = j.value("peak_lr", d.peak_lr);
  d.warmup_steps = j.value("warmup_steps", d.warmup_steps);
  d.total_steps = j.value("total_steps", d.total_steps);
  d.batch_size = j.value("batch_size", d.batch_size);
  d.grad_clip = j.value("grad_clip", d.grad_clip);
  d.beta1 = j.value("beta1", d.beta1);
  d.beta2 = j.value("beta2", d.beta2);
  d.epsilon = j.value("epsilon", d.epsilon);
  d.Validate();
  return d;
}

double NoamRate(int step, int warmup_steps, double peak_lr) {
  const double s = std::max(step, 1);
  const double w = std::max(warmup_steps, 1);
  return peak_lr * std::min(s / w, std::sqrt(w / s));
}

TrainResult train_base(const Corpus &train, const BaseTrainConfig &config) {
  config.optim.Validate();
  if (train.utts.empty()) Fail(ErrorKind::kData, "train_base: empty corpus");
  TrainResult result{Model(config.model, DeriveSeed(config.seed, 0)), {}};
  Model &model = result.model;

  std::vector<DenseMatrix> frames;
  frames.reserve(train.utts.size());
  for (const auto &u : train.utts) frames.push_back(train.Frames(u));

  const std::vector<Var> params = model.params().Trainable();
  AdamState adam;
  adam.Init(params);
  BatchSampler sampler(train.utts.size(), DeriveSeed(config.seed, 1));
  Rng dropout_rng(DeriveSeed(config.seed, 2));
  ForwardContext ctx{true, &dropout_rng};

  for (int step = 1; step <= config.optim.total_steps; ++step) {
    const auto batch = sampler.Next(static_cast<std::size_t>(config.optim.batch_size));
    Var total;
    for (std::size_t idx : batch) {
      const Utterance &u = train.utts[idx];
      AcousticState s = model.acoustics(frames[idx], ctx, u.ref.size());
      DecoderOutput dec =
          model.parallel_decode(s.encoder_out, model.add_positions(s.fired.embeddings), ctx);
      Var loss = add(cross_entropy(dec.logits, u.ref),
                     scale(quantity_loss(s.alpha, u.ref.size()), config.quantity_weight));
      total = total ? add(total, loss) : loss;
    }
    total = scale(total, 1.0 / static_cast<double>(batch.size()));
    const double loss_value = total->value[0];
    CheckFinite(loss_value, step, "base");
    const double lr = Optimize(params, adam, total, config.optim, step);
    result.log.push_back({step, loss_value, lr});
    if (config.snapshot_every > 0 && config.on_snapshot &&
        step % config.snapshot_every == 0)
      config.on_snapshot(step, model);
  }
  return result;
}

DecodeResult decode_corpus(const Model &model, const Corpus &corpus,
                           std::optional<double> noise_sigma) {
  DecodeResult out;
  std::size_t errors = 0, ref = 0;
  for (const auto &u : corpus.utts) {
    AsrDecode d = model.asr_decode(corpus.Frames(u, noise_sigma));
    if (d.empty()) ++out.empty_decodes;
    errors += edit_distance(u.ref, d.tokens).distance;
    ref += u.ref.size();
    out.decodes.push_back({u.id, std::move(d.tokens)});
  }
  out.corpus_cer = ref ? static_cast<double>(errors) / static_cast<double>(ref) : 0.0;
  return out;
}

Corpus WithHypotheses(const Corpus &corpus, const DecodeResult &decodes) {
  if (decodes.decodes.size() != corpus.utts.size())
    Fail(ErrorKind::kData, "decode count does not match corpus size");
  Corpus out = corpus;
  for (std::size_t i = 0; i < out.utts.size(); ++i) {
    if (decodes.decodes[i].id != out.utts[i].id)
      Fail(ErrorKind::kData, "decode for " + decodes.decodes[i].id +
                                 " does not line up with " + out.utts[i].id);
    out.utts[i].hyp = decodes.decodes[i].tokens;
  }
  return out;
}

namespace {

struct CemExample {
  std::size_t utt = 0;
  AcousticState state;
  Tokens base_decode;
  std::vector<int> labels;
};

std::vector<int> CemLabels(CemVariant variant, const Tokens &base_decode, const Tokens &hyp,
                           const Tokens &ref) {
  return variant == CemVariant::kCifAligned ? labels_for_decode(base_decode, hyp).labels
                                            : labels_for_hypothesis(hyp, ref).labels;
}

// With need_hyp false the stored hypotheses are ignored and labels are left
// empty; the caller fills them per draw.
std::vector<CemExample> PrepareCemExamples(const Model &base, const Corpus &corpus,
                                           CemVariant variant, bool need_hyp,
                                           std::size_t *skipped) {
  NoGradScope no_grad;
  ForwardContext eval;
  std::vector<CemExample> out;
  for (std::size_t i = 0; i < corpus.utts.size(); ++i) {
    const Utterance &u = corpus.utts[i];
    if (need_hyp && !u.hyp)
      Fail(ErrorKind::kData, "train_cem: utterance " + u.id + " has no hypothesis");
    if (need_hyp && u.hyp->empty()) {
      ++*skipped;
      continue;
    }
    CemExample ex;
    ex.utt = i;
    ex.state = base.acoustics(corpus.Frames(u), eval, std::nullopt);
    if (variant == CemVariant::kCifAligned) {
      if (ex.state.fired.trace.count() == 0) {
        ++*skipped;
        continue;
      }
      ex.base_decode = base.asr_decode(ex.state).tokens;
    }
    if (need_hyp) ex.labels = CemLabels(variant, ex.base_decode, *u.hyp, u.ref);
    out.push_back(std::move(ex));
  }
  return out;
}

Var CemLoss(const Model &model, const CemExample &ex, const Tokens &hyp,
            const CemTrainConfig &config, const ForwardContext &ctx) {
  if (model.cem_variant() == CemVariant::kCifAligned) {
    CaCemOutput out = model.ca_cem_forward(ex.state, hyp, ctx);
    if (out.scores->value.rows() != ex.labels.size())
      Fail(ErrorKind::kContract, "CIF-aligned scores (" +
                                     std::to_string(out.scores->value.rows()) +
                                     ") and labels (" + std::to_string(ex.labels.size()) +
                                     ") differ in length");
    Var loss = binary_cross_entropy(out.scores, ex.labels);
    if (config.decode_keep_weight > 0.0)
      loss = add(loss, scale(cross_entropy(out.acoustic.logits, ex.base_decode),
                             config.decode_keep_weight));
    return loss;
  }
  AedCemOutput out = model.aed_cem_forward(ex.state.encoder_out, hyp, ctx);
  if (out.scores->value.rows() != ex.labels.size())
    Fail(ErrorKind::kContract, "hypothesis-synchronous scores and labels differ in length");
  return binary_cross_entropy(out.scores, ex.labels);
}

}  // namespace

CemTrainResult train_cem(const Model &base, const Corpus &train,
                         const CemTrainConfig &config) {
  config.optim.Validate();
  if (config.variant == CemVariant::kNone)
    Fail(ErrorKind::kUsage, "train_cem needs a CEM variant");
  if (base.cem_variant() != CemVariant::kNone)
    Fail(ErrorKind::kContract, "train_cem expects a base (head-less) checkpoint");
  CemTrainResult result{base.Clone(), {}, 0};
  Model &model = result.model;
  model.FreezeAcousticFrontEnd();
  Rng init_rng(DeriveSeed(config.seed, 0));
  model.AttachCemHead(config.variant, init_rng);

  // Encoder and predictor are frozen and run in eval mode, so their outputs
  // are computed once.
  std::vector<CemExample> examples =
      PrepareCemExamples(base, train, config.variant, !config.redraw, &result.skipped_utts);
  if (examples.empty()) Fail(ErrorKind::kData, "train_cem: no usable utterances");

  const std::vector<Var> params = model.params().Trainable();
  AdamState adam;
  adam.Init(params);
  BatchSampler sampler(examples.size(), DeriveSeed(config.seed, 1));
  Rng dropout_rng(DeriveSeed(config.seed, 2));
  ForwardContext ctx{true, &dropout_rng};
  Rng redraw_rng(DeriveSeed(config.seed, 3));

  for (int step = 1; step <= config.optim.total_steps; ++step) {
    const auto batch = sampler.Next(static_cast<std::size_t>(config.optim.batch_size));
    Var total;
    std::size_t used = 0;
    for (std::size_t idx : batch) {
      CemExample &ex = examples[idx];
      const Utterance &u = train.utts[ex.utt];
      Tokens hyp;
      if (config.redraw) {
        hyp = CorruptWithPlan(u.ref, *config.redraw, train.spec.vocab_size, redraw_rng);
        if (hyp.empty()) continue;
        ex.labels = CemLabels(config.variant, ex.base_decode, hyp, u.ref);
      } else {
        hyp = *u.hyp;
      }
      Var loss = CemLoss(model, ex, hyp, config, ctx);
      total = total ? add(total, loss) : loss;
      ++used;
    }
    if (used == 0) continue;
    total = scale(total, 1.0 / static_cast<double>(used));
    const double loss_value = total->value[0];
    CheckFinite(loss_value, step, "CEM");
    const double lr = Optimize(params, adam, total, config.optim, step);
    result.log.push_back({step, loss_value, lr});
  }
  return result;
}

double HeldOutBce(const Model &cem, const Corpus &corpus, const Model &base) {
  std::size_t skipped = 0;
  std::vector<CemExample> examples =
      PrepareCemExamples(base, corpus, cem.cem_variant(), true, &skipped);
  NoGradScope no_grad;
  ForwardContext eval;
  CemTrainConfig bce_only;
  bce_only.decode_keep_weight = 0.0;
  double total = 0.0;
  for (const auto &ex : examples)
    total += CemLoss(cem, ex, *corpus.utts[ex.utt].hyp, bce_only, eval)->value[0];
  return examples.empty() ? 0.0 : total / static_cast<double>(examples.size());
}

}  // namespace cacem
