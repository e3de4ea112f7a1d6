// cacem/model.h

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

#ifndef CACEM_MODEL_H_
#define CACEM_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cacem/cif.h"
#include "cacem/params.h"
#include "cacem/rng.h"

namespace cacem {

struct ModelConfig {
  int vocab_size = 32;
  int feature_dim = 16;
  int model_dim = 64;
  int ffn_dim = 128;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int estimator_layers = 2;  // also the aligner depth
  int heads = 4;
  int predictor_hidden = 64;
  double dropout = 0.15;
  int max_frames = 256;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json &j);
  bool operator==(const ModelConfig &) const = default;
};

/// Which confidence head a checkpoint carries.
enum class CemVariant { kNone, kHypSynchronous, kCifAligned };

/// Which scorer produced a ConfidenceResult.
enum class ConfidenceVariant { kSoftmax, kHypSynchronous, kCifAligned };

const char *CemVariantName(CemVariant v);
CemVariant ParseCemVariant(const std::string &name);
const char *ConfidenceVariantName(ConfidenceVariant v);

struct ConfidenceResult {
  std::vector<int> tokens;
  std::vector<double> scores;
  double average = 0.0;
  ConfidenceVariant variant = ConfidenceVariant::kSoftmax;

  static ConfidenceResult Make(std::vector<int> tokens,
                               std::vector<double> scores,
                               ConfidenceVariant variant);
};

struct ForwardContext {
  bool training = false;
  Rng *rng = nullptr;  // required when training with dropout > 0
};

struct DecoderOutput {
  Var cross;      // a: cross-attention sublayer output of the last layer
  Var self;       // d: self-attention sublayer output of the last layer
  Var hidden;     // final normalised states
  Var logits;     // N x vocab
};

/// Frame-level encoder output plus the CIF result derived from it.
struct AcousticState {
  Var encoder_out;  // T x d
  Var alpha;        // T x 1, unscaled predictor output
  FiredEmbeddings fired;
};

struct AsrDecode {
  std::vector<int> tokens;
  Var logits;        // L' x vocab (empty matrix when nothing fired)
  FiringResult trace;
  bool empty() const { return tokens.empty(); }
};

struct CaCemOutput {
  Var scores;              // L' x 1
  DecoderOutput acoustic;  // decoder run on E (the E-branch)
  std::vector<int> tokens; // argmax of acoustic.logits
};

struct AedCemOutput {
  Var scores;  // L x 1
  DecoderOutput text;
};

enum class SoftmaxMode { kDecode, kForced };

/// Paraformer-style toy model: encoder, CIF predictor, shared parallel
/// decoder and (optionally) one confidence head.
class Model {
 public:
  Model(const ModelConfig &config, std::uint64_t seed);
  Model(const Model &) = delete;
  Model &operator=(const Model &) = delete;
  Model(Model &&) = default;
  Model &operator=(Model &&) = default;

  /// Deep copy: new parameter nodes holding the same values.
  Model Clone() const;
  /// Overwrites values of same-named parameters; shapes must agree.
  void CopyValuesFrom(const ParamStore &source);

  /// Registers freshly initialised aligner/estimator parameters.
  void AttachCemHead(CemVariant variant, Rng &rng);

  const ModelConfig &config() const { return config_; }
  CemVariant cem_variant() const { return variant_; }
  ParamStore &params() { return params_; }
  const ParamStore &params() const { return params_; }

  /// Freeze encoder and predictor (bit-identical through CEM training).
  void FreezeAcousticFrontEnd();

  // Frame features (T x feature_dim) -> T x d.
  Var encode(const DenseMatrix &features, const ForwardContext &ctx) const;
  // Token ids -> L x d with sinusoidal positions added.
  Var embed_chars(std::span<const int> tokens) const;
  Var add_positions(const Var &z) const;
  Var predict_weights(const Var &encoder_out) const;

  /// Training form: alpha scaled to target_len before firing. Inference
  /// form (no target): unscaled, tail residual >= 0.5 fires.
  AcousticState acoustics(const DenseMatrix &features, const ForwardContext &ctx,
                          std::optional<std::size_t> target_len) const;

  DecoderOutput parallel_decode(const Var &encoder_out, const Var &inputs,
                                const ForwardContext &ctx) const;

  AsrDecode asr_decode(const DenseMatrix &features) const;
  AsrDecode asr_decode(const AcousticState &state) const;

  AedCemOutput aed_cem_forward(const Var &encoder_out,
                               std::span<const int> hypothesis,
                               const ForwardContext &ctx) const;
  ConfidenceResult aed_cem_forward(const DenseMatrix &features,
                                   std::span<const int> hypothesis) const;

  CaCemOutput ca_cem_forward(const AcousticState &state,
                             std::span<const int> hypothesis,
                             const ForwardContext &ctx) const;
  ConfidenceResult ca_cem_forward(const DenseMatrix &features,
                                  std::span<const int> hypothesis) const;

  ConfidenceResult softmax_confidence(
      const DenseMatrix &features, SoftmaxMode mode,
      std::span<const int> forced_tokens = {}) const;

 private:
  struct Linear {
    Var w, b;
  };
  struct Norm {
    Var gain, bias;
  };
  struct Attention {
    Linear q, k, v, o;
  };
  struct FeedForward {
    Linear in, out;
  };
  struct Block {
    Norm self_norm;
    Attention self_attn;
    std::optional<Norm> cross_norm;
    std::optional<Attention> cross_attn;
    std::optional<Norm> ffn_norm;
    std::optional<FeedForward> ffn;
  };
  struct BlockOutput {
    Var out, self, cross;
  };

  Linear AddLinear(const std::string &name, int in, int out, Rng *rng);
  Norm AddNorm(const std::string &name, int dim);
  Attention AddAttention(const std::string &name, Rng *rng);
  Block AddBlock(const std::string &name, bool with_cross, Rng *rng,
                 bool with_ffn = true);
  void BuildBase(Rng *rng);
  void BuildHead(Rng *rng);

  Var ApplyLinear(const Linear &l, const Var &x) const;
  Var ApplyNorm(const Norm &n, const Var &x) const;
  Var Dropout(const Var &x, const ForwardContext &ctx) const;
  BlockOutput ApplyBlock(const Block &b, const Var &x, const Var *memory,
                         const ForwardContext &ctx) const;

  ModelConfig config_;
  CemVariant variant_ = CemVariant::kNone;
  ParamStore params_;

  Linear enc_input_;
  std::vector<Block> enc_blocks_;
  Norm enc_norm_;
  Var embedding_;
  PredictorParams predictor_;
  std::vector<Block> dec_blocks_;
  Norm dec_norm_;
  Linear output_;
  std::vector<Block> aligner_blocks_;
  Linear est_input_;
  std::vector<Block> est_blocks_;
  Norm est_norm_;
  Linear est_output_;
};

/// Sinusoidal table, rows x dim.
DenseMatrix PositionalEncoding(std::size_t rows, std::size_t dim);

std::vector<int> ArgmaxRows(const DenseMatrix &logits);

}  // namespace cacem

#endif  // CACEM_MODEL_H_
