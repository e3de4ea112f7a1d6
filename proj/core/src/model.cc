// core/src/model.cc

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

#include "cacem/model.h"

#include <algorithm>
#include <cmath>

#include "cacem/errors.h"
#include "cacem/ops.h"

namespace cacem {

namespace {

DenseMatrix UniformInit(int rows, int cols, Rng *rng) {
  DenseMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  if (!rng) return m;
  const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double &x : m.values()) x = rng->Uniform(-bound, bound);
  return m;
}

std::vector<double> ColumnValues(const Var &v) {
  return {v->value.values().begin(), v->value.values().end()};
}

}  // namespace

void ModelConfig::Validate() const {
  const int counts[] = {vocab_size,     feature_dim,    model_dim,
                        ffn_dim,        encoder_layers, decoder_layers,
                        estimator_layers, heads,        predictor_hidden,
                        max_frames};
  for (int c : counts)
    if (c < 1) Fail(ErrorKind::kContract, "model config counts must be >= 1");
  if (model_dim % heads != 0)
    Fail(ErrorKind::kContract, "model_dim " + std::to_string(model_dim) +
                                   " not divisible by heads " +
                                   std::to_string(heads));
  if (dropout < 0.0 || dropout >= 1.0)
    Fail(ErrorKind::kContract, "dropout must lie in [0, 1)");
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"vocab_size", vocab_size},
          {"feature_dim", feature_dim},
          {"model_dim", model_dim},
          {"ffn_dim", ffn_dim},
          {"encoder_layers", encoder_layers},
          {"decoder_layers", decoder_layers},
          {"estimator_layers", estimator_layers},
          {"heads", heads},
          {"predictor_hidden", predictor_hidden},
          {"dropout", dropout},
          {"max_frames", max_frames}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json &j) {
  ModelConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.feature_dim = j.value("feature_dim", c.feature_dim);
  c.model_dim = j.value("model_dim", c.model_dim);
  c.ffn_dim = j.value("ffn_dim", c.ffn_dim);
  c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
  c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
  c.estimator_layers = j.value("estimator_layers", c.estimator_layers);
  c.heads = j.value("heads", c.heads);
  c.predictor_hidden = j.value("predictor_hidden", c.predictor_hidden);
  c.dropout = j.value("dropout", c.dropout);
  c.max_frames = j.value("max_frames", c.max_frames);
  c.Validate();
  return c;
}

const char *CemVariantName(CemVariant v) {
  switch (v) {
    case CemVariant::kNone: return "none";
    case CemVariant::kHypSynchronous: return "hyp_synchronous";
    case CemVariant::kCifAligned: return "cif_aligned";
  }
  return "none";
}

CemVariant ParseCemVariant(const std::string &name) {
  if (name == "none") return CemVariant::kNone;
  if (name == "hyp_synchronous" || name == "aed") return CemVariant::kHypSynchronous;
  if (name == "cif_aligned" || name == "ca") return CemVariant::kCifAligned;
  Fail(ErrorKind::kUsage, "unknown CEM variant '" + name + "'");
}

const char *ConfidenceVariantName(ConfidenceVariant v) {
  switch (v) {
    case ConfidenceVariant::kSoftmax: return "softmax";
    case ConfidenceVariant::kHypSynchronous: return "hyp_synchronous";
    case ConfidenceVariant::kCifAligned: return "cif_aligned";
  }
  return "softmax";
}

ConfidenceResult ConfidenceResult::Make(std::vector<int> tokens,
                                        std::vector<double> scores,
                                        ConfidenceVariant variant) {
  if (tokens.size() != scores.size())
    Fail(ErrorKind::kContract, "confidence result with " +
                                   std::to_string(tokens.size()) +
                                   " tokens and " +
                                   std::to_string(scores.size()) + " scores");
  ConfidenceResult r;
  double total = 0.0;
  for (double s : scores) total += s;
  r.average = scores.empty() ? 0.0 : total / static_cast<double>(scores.size());
  r.tokens = std::move(tokens);
  r.scores = std::move(scores);
  r.variant = variant;
  return r;
}

DenseMatrix PositionalEncoding(std::size_t rows, std::size_t dim) {
  DenseMatrix pe(rows, dim);
  for (std::size_t pos = 0; pos < rows; ++pos)
    for (std::size_t i = 0; i < dim; i += 2) {
      const double freq =
          std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
      pe(pos, i) = std::sin(static_cast<double>(pos) * freq);
      if (i + 1 < dim) pe(pos, i + 1) = std::cos(static_cast<double>(pos) * freq);
    }
  return pe;
}

std::vector<int> ArgmaxRows(const DenseMatrix &logits) {
  std::vector<int> out(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) -
                              row.begin());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Construction

Model::Model(const ModelConfig &config, std::uint64_t seed) : config_(config) {
  config_.Validate();
  Rng rng(seed);
  BuildBase(&rng);
}

Model Model::Clone() const {
  Model copy(config_, 0);
  if (variant_ != CemVariant::kNone) {
    Rng rng(0);
    copy.AttachCemHead(variant_, rng);
  }
  copy.CopyValuesFrom(params_);
  for (const auto &[name, v] : params_.entries())
    copy.params_.Get(name)->requires_grad = v->requires_grad;
  return copy;
}

void Model::CopyValuesFrom(const ParamStore &source) {
  for (const auto &[name, v] : source.entries()) {
    if (!params_.Has(name)) continue;
    const Var &dst = params_.Get(name);
    if (!dst->value.SameShape(v->value))
      Fail(ErrorKind::kDimension, "parameter " + name + ": " +
                                      dst->value.ShapeString() + " vs " +
                                      v->value.ShapeString());
    dst->value = v->value;
  }
}

Model::Linear Model::AddLinear(const std::string &name, int in, int out,
                               Rng *rng) {
  Linear l;
  l.w = params_.Add(name + ".w", UniformInit(in, out, rng));
  l.b = params_.Add(name + ".b", DenseMatrix(1, static_cast<std::size_t>(out)));
  return l;
}

Model::Norm Model::AddNorm(const std::string &name, int dim) {
  Norm n;
  n.gain = params_.Add(name + ".gain",
                       DenseMatrix(1, static_cast<std::size_t>(dim), 1.0));
  n.bias = params_.Add(name + ".bias", DenseMatrix(1, static_cast<std::size_t>(dim)));
  return n;
}

Model::Attention Model::AddAttention(const std::string &name, Rng *rng) {
  const int d = config_.model_dim;
  return {AddLinear(name + ".q", d, d, rng), AddLinear(name + ".k", d, d, rng),
          AddLinear(name + ".v", d, d, rng), AddLinear(name + ".o", d, d, rng)};
}

Model::Block Model::AddBlock(const std::string &name, bool with_cross,
                             Rng *rng, bool with_ffn) {
  Block b;
  b.self_norm = AddNorm(name + ".self_norm", config_.model_dim);
  b.self_attn = AddAttention(name + ".self_attn", rng);
  if (with_cross) {
    b.cross_norm = AddNorm(name + ".cross_norm", config_.model_dim);
    b.cross_attn = AddAttention(name + ".cross_attn", rng);
  }
  if (with_ffn) {
    b.ffn_norm = AddNorm(name + ".ffn_norm", config_.model_dim);
    b.ffn = FeedForward{
        AddLinear(name + ".ffn.in", config_.model_dim, config_.ffn_dim, rng),
        AddLinear(name + ".ffn.out", config_.ffn_dim, config_.model_dim, rng)};
  }
  return b;
}

void Model::BuildBase(Rng *rng) {
  const int d = config_.model_dim;
  enc_input_ = AddLinear("encoder.input", config_.feature_dim, d, rng);
  for (int l = 0; l < config_.encoder_layers; ++l)
    enc_blocks_.push_back(AddBlock("encoder.l" + std::to_string(l), false, rng));
  enc_norm_ = AddNorm("encoder.final_norm", d);

  DenseMatrix table(static_cast<std::size_t>(config_.vocab_size),
                    static_cast<std::size_t>(d));
  for (double &x : table.values()) x = rng->Normal();
  embedding_ = params_.Add("embedding.table", std::move(table));

  Linear p1 = AddLinear("predictor.hidden", 3 * d, config_.predictor_hidden, rng);
  Linear p2 = AddLinear("predictor.out", config_.predictor_hidden, 1, rng);
  predictor_ = {p1.w, p1.b, p2.w, p2.b};

  for (int l = 0; l < config_.decoder_layers; ++l)
    dec_blocks_.push_back(AddBlock("decoder.l" + std::to_string(l), true, rng));
  dec_norm_ = AddNorm("decoder.final_norm", d);
  output_ = AddLinear("output", d, config_.vocab_size, rng);
}

void Model::AttachCemHead(CemVariant variant, Rng &rng) {
  if (variant_ != CemVariant::kNone)
    Fail(ErrorKind::kContract, "model already carries a CEM head");
  if (variant == CemVariant::kNone) return;
  variant_ = variant;
  BuildHead(&rng);
}

void Model::BuildHead(Rng *rng) {
  const int d = config_.model_dim;
  // Only the attention sublayers of the last aligner block are read, so it
  // carries no feed-forward.
  if (variant_ == CemVariant::kCifAligned)
    for (int l = 0; l < config_.estimator_layers; ++l)
      aligner_blocks_.push_back(AddBlock("aligner.l" + std::to_string(l), true,
                                         rng, l + 1 < config_.estimator_layers));
  est_input_ = AddLinear("estimator.input", 2 * d, d, rng);
  // Hypothesis-synchronous estimator also attends the encoder output.
  const bool with_cross = variant_ == CemVariant::kHypSynchronous;
  for (int l = 0; l < config_.estimator_layers; ++l)
    est_blocks_.push_back(
        AddBlock("estimator.l" + std::to_string(l), with_cross, rng));
  est_norm_ = AddNorm("estimator.final_norm", d);
  est_output_ = AddLinear("estimator.output", d, 1, rng);
}

void Model::FreezeAcousticFrontEnd() {
  params_.SetTrainable("encoder.", false);
  params_.SetTrainable("predictor.", false);
}

// ---------------------------------------------------------------------------
// Building blocks

Var Model::ApplyLinear(const Linear &l, const Var &x) const {
  return add_bias(matmul(x, l.w), l.b);
}

Var Model::ApplyNorm(const Norm &n, const Var &x) const {
  return layer_norm(x, n.gain, n.bias);
}

Var Model::Dropout(const Var &x, const ForwardContext &ctx) const {
  if (!ctx.training || config_.dropout == 0.0) return x;
  if (!ctx.rng)
    Fail(ErrorKind::kContract, "training forward pass needs an Rng for dropout");
  return dropout(x, config_.dropout, *ctx.rng, true);
}

Model::BlockOutput Model::ApplyBlock(const Block &b, const Var &x,
                                     const Var *memory,
                                     const ForwardContext &ctx) const {
  BlockOutput out;
  Var y = ApplyNorm(b.self_norm, x);
  Var attended = multi_head_attention(ApplyLinear(b.self_attn.q, y),
                                      ApplyLinear(b.self_attn.k, y),
                                      ApplyLinear(b.self_attn.v, y),
                                      config_.heads);
  out.self = ApplyLinear(b.self_attn.o, attended);
  Var h = add(x, Dropout(out.self, ctx));
  if (b.cross_attn) {
    if (!memory) Fail(ErrorKind::kContract, "cross-attention block needs memory");
    Var yq = ApplyNorm(*b.cross_norm, h);
    Var ctx_vec = multi_head_attention(ApplyLinear(b.cross_attn->q, yq),
                                       ApplyLinear(b.cross_attn->k, *memory),
                                       ApplyLinear(b.cross_attn->v, *memory),
                                       config_.heads);
    out.cross = ApplyLinear(b.cross_attn->o, ctx_vec);
    h = add(h, Dropout(out.cross, ctx));
  }
  if (!b.ffn) {
    out.out = h;
    return out;
  }
  Var f = ApplyLinear(b.ffn->out, relu(ApplyLinear(b.ffn->in, ApplyNorm(*b.ffn_norm, h))));
  out.out = add(h, Dropout(f, ctx));
  return out;
}

// ---------------------------------------------------------------------------
// Forward passes

Var Model::encode(const DenseMatrix &features, const ForwardContext &ctx) const {
  if (features.rows() == 0)
    Fail(ErrorKind::kEmptyInput, "encode: utterance has no frames");
  if (features.rows() > static_cast<std::size_t>(config_.max_frames))
    Fail(ErrorKind::kContract, "encode: " + std::to_string(features.rows()) +
                                   " frames exceed max_frames " +
                                   std::to_string(config_.max_frames));
  if (features.cols() != static_cast<std::size_t>(config_.feature_dim))
    Fail(ErrorKind::kDimension, "encode: features " + features.ShapeString() +
                                    " but feature_dim is " +
                                    std::to_string(config_.feature_dim));
  Var x = add_positions(ApplyLinear(enc_input_, MakeConstant(features)));
  x = Dropout(x, ctx);
  for (const auto &b : enc_blocks_) x = ApplyBlock(b, x, nullptr, ctx).out;
  return ApplyNorm(enc_norm_, x);
}

Var Model::add_positions(const Var &z) const {
  if (z->value.rows() == 0) return z;
  return add(z, MakeConstant(PositionalEncoding(z->value.rows(), z->value.cols())));
}

Var Model::embed_chars(std::span<const int> tokens) const {
  if (tokens.empty())
    return MakeConstant(DenseMatrix(0, static_cast<std::size_t>(config_.model_dim)));
  return add_positions(embedding_lookup(embedding_, tokens));
}

Var Model::predict_weights(const Var &encoder_out) const {
  return cacem::predict_weights(encoder_out, predictor_);
}

AcousticState Model::acoustics(const DenseMatrix &features,
                               const ForwardContext &ctx,
                               std::optional<std::size_t> target_len) const {
  AcousticState s;
  s.encoder_out = encode(features, ctx);
  s.alpha = predict_weights(s.encoder_out);
  if (target_len) {
    s.fired = integrate_and_fire(s.encoder_out, scale_weights(s.alpha, *target_len),
                                 kFiringThreshold, TailPolicy::kDiscard);
  } else {
    s.fired = integrate_and_fire(s.encoder_out, s.alpha, kFiringThreshold,
                                 TailPolicy::kFireIfAtLeastHalf);
  }
  return s;
}

DecoderOutput Model::parallel_decode(const Var &encoder_out, const Var &inputs,
                                     const ForwardContext &ctx) const {
  DecoderOutput out;
  Var x = Dropout(inputs, ctx);
  for (const auto &b : dec_blocks_) {
    BlockOutput o = ApplyBlock(b, x, &encoder_out, ctx);
    x = o.out;
    out.self = o.self;
    out.cross = o.cross;
  }
  out.hidden = ApplyNorm(dec_norm_, x);
  out.logits = ApplyLinear(output_, out.hidden);
  return out;
}

AsrDecode Model::asr_decode(const AcousticState &state) const {
  AsrDecode d;
  d.trace = state.fired.trace;
  if (state.fired.trace.count() == 0) {
    d.logits = MakeConstant(DenseMatrix(0, static_cast<std::size_t>(config_.vocab_size)));
    return d;
  }
  ForwardContext eval;
  d.logits = parallel_decode(state.encoder_out,
                             add_positions(state.fired.embeddings), eval)
                 .logits;
  d.tokens = ArgmaxRows(d.logits->value);
  return d;
}

AsrDecode Model::asr_decode(const DenseMatrix &features) const {
  NoGradScope no_grad;
  return asr_decode(acoustics(features, ForwardContext{}, std::nullopt));
}

AedCemOutput Model::aed_cem_forward(const Var &encoder_out,
                                    std::span<const int> hypothesis,
                                    const ForwardContext &ctx) const {
  if (variant_ != CemVariant::kHypSynchronous)
    Fail(ErrorKind::kContract, "model has no hypothesis-synchronous head");
  if (hypothesis.empty())
    Fail(ErrorKind::kContract, "aed_cem_forward: empty hypothesis");
  AedCemOutput out;
  out.text = parallel_decode(encoder_out, embed_chars(hypothesis), ctx);
  Var x = ApplyLinear(est_input_, concat_cols(out.text.cross, out.text.self));
  for (const auto &b : est_blocks_) x = ApplyBlock(b, x, &encoder_out, ctx).out;
  out.scores = sigmoid(ApplyLinear(est_output_, ApplyNorm(est_norm_, x)));
  return out;
}

ConfidenceResult Model::aed_cem_forward(const DenseMatrix &features,
                                        std::span<const int> hypothesis) const {
  NoGradScope no_grad;
  ForwardContext eval;
  AedCemOutput out = aed_cem_forward(encode(features, eval), hypothesis, eval);
  return ConfidenceResult::Make({hypothesis.begin(), hypothesis.end()},
                                ColumnValues(out.scores),
                                ConfidenceVariant::kHypSynchronous);
}

CaCemOutput Model::ca_cem_forward(const AcousticState &state,
                                  std::span<const int> hypothesis,
                                  const ForwardContext &ctx) const {
  if (variant_ != CemVariant::kCifAligned)
    Fail(ErrorKind::kContract, "model has no CIF-aligned head");
  if (hypothesis.empty())
    Fail(ErrorKind::kContract, "ca_cem_forward: empty hypothesis");
  if (state.fired.trace.count() == 0)
    Fail(ErrorKind::kEmptyDecode,
         "ca_cem_forward: nothing fired, no positions to score");
  CaCemOutput out;
  DecoderOutput text =
      parallel_decode(state.encoder_out, embed_chars(hypothesis), ctx);
  out.acoustic = parallel_decode(state.encoder_out,
                                 add_positions(state.fired.embeddings), ctx);
  out.tokens = ArgmaxRows(out.acoustic.logits->value);

  // Queries follow the acoustic (L') side, keys/values the hypothesis side.
  Var x = out.acoustic.hidden;
  Var a, d;
  for (const auto &b : aligner_blocks_) {
    BlockOutput o = ApplyBlock(b, x, &text.hidden, ctx);
    x = o.out;
    a = o.cross;
    d = o.self;
  }
  Var y = ApplyLinear(est_input_, concat_cols(a, d));
  for (const auto &b : est_blocks_) y = ApplyBlock(b, y, nullptr, ctx).out;
  out.scores = sigmoid(ApplyLinear(est_output_, ApplyNorm(est_norm_, y)));
  return out;
}

ConfidenceResult Model::ca_cem_forward(const DenseMatrix &features,
                                       std::span<const int> hypothesis) const {
  NoGradScope no_grad;
  ForwardContext eval;
  AcousticState state = acoustics(features, eval, std::nullopt);
  CaCemOutput out = ca_cem_forward(state, hypothesis, eval);
  return ConfidenceResult::Make(std::move(out.tokens), ColumnValues(out.scores),
                                ConfidenceVariant::kCifAligned);
}

ConfidenceResult Model::softmax_confidence(
    const DenseMatrix &features, SoftmaxMode mode,
    std::span<const int> forced_tokens) const {
  NoGradScope no_grad;
  AsrDecode dec = asr_decode(features);
  if (mode == SoftmaxMode::kForced && forced_tokens.size() != dec.tokens.size())
    Fail(ErrorKind::kContract,
         "softmax_confidence: forced sequence of length " +
             std::to_string(forced_tokens.size()) + " against " +
             std::to_string(dec.tokens.size()) + " decoded positions");
  if (dec.empty())
    return ConfidenceResult::Make({}, {}, ConfidenceVariant::kSoftmax);
  Var probs = softmax_rows(dec.logits);
  std::vector<int> tokens = mode == SoftmaxMode::kForced
                                ? std::vector<int>(forced_tokens.begin(),
                                                   forced_tokens.end())
                                : dec.tokens;
  std::vector<double> scores(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] < 0 || tokens[i] >= config_.vocab_size)
      Fail(ErrorKind::kLookup, "forced token " + std::to_string(tokens[i]) +
                                   " outside vocabulary");
    scores[i] = probs->value(i, static_cast<std::size_t>(tokens[i]));
  }
  return ConfidenceResult::Make(std::move(tokens), std::move(scores),
                                ConfidenceVariant::kSoftmax);
}

}  // namespace cacem
