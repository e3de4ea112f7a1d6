// tools/cacem_cli.cc

// Copyright 2026  The cacem Authors

// See ../LICENSE for clarification regarding multiple authors
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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cacem/checkpoint.h"
#include "cacem/cif.h"
#include "cacem/corpus.h"
#include "cacem/errors.h"
#include "cacem/evaluation.h"
#include "cacem/experiment.h"
#include "cacem/metrics.h"
#include "cacem/reports.h"
#include "cacem/training.h"

namespace {

using namespace cacem;

struct Globals {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out = ".";
};

ExperimentConfig LoadConfig(const Globals &g) {
  ExperimentConfig c;
  if (!g.config_path.empty()) {
    std::ifstream is = OpenInput(g.config_path);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorKind::kData, g.config_path + ": " + e.what());
    }
    c = ExperimentConfig::FromJson(j);
  }
  return c.WithSeed(g.seed);
}

std::string OutPath(const Globals &g, const std::string &name) {
  EnsureDirectory(g.out);
  return g.out + "/" + name;
}

std::optional<LoadedCheckpoint> MaybeLoad(const std::string &path) {
  if (path.empty()) return std::nullopt;
  return LoadCheckpoint(path);
}

void RequireHypotheses(const Corpus &c, const std::string &path) {
  for (const auto &u : c.utts)
    if (!u.hyp) Fail(ErrorKind::kData, path + ": utterance " + u.id + " has no hypothesis");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"CIF-aligned confidence estimation on a synthetic recognition task"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed from which every stage seed is derived");
  app.add_option("--config", g.config_path, "Experiment configuration (JSON)");
  app.add_option("--out", g.out, "Output directory");

  // gen-data
  auto *gen = app.add_subcommand("gen-data", "Generate the synthetic corpus");
  int n_utts = -1;
  int n_train = -1;
  bool materialize = false;
  gen->add_option("--n-utts", n_utts, "Number of utterances (overrides the config)");
  gen->add_option("--train", n_train, "Split off this many training utterances");
  gen->add_flag("--materialize", materialize, "Write frames inline instead of regen seeds");

  // train-asr
  auto *train_asr = app.add_subcommand("train-asr", "Train the base recogniser");
  std::string train_path;
  int snapshot_every = 0;
  train_asr->add_option("--train", train_path, "Training corpus (JSONL)")->required();
  train_asr->add_option("--snapshot-every", snapshot_every, "Save a checkpoint every N steps");

  // decode
  auto *decode = app.add_subcommand("decode", "Greedy-decode a corpus");
  std::string ckpt_path, corpus_path, output_name = "decoded.jsonl";
  std::optional<double> sigma;
  decode->add_option("--ckpt", ckpt_path, "Checkpoint")->required();
  decode->add_option("--corpus", corpus_path, "Corpus (JSONL)")->required();
  decode->add_option("--sigma", sigma, "Re-render features at this noise level");
  decode->add_option("--name", output_name, "Output file name inside --out");

  // train-cem
  auto *train_cem_cmd = app.add_subcommand("train-cem", "Train a confidence head");
  std::string base_path, variant_name = "cif_aligned";
  bool corrupt = false;
  train_cem_cmd->add_option("--base", base_path, "Base checkpoint")->required();
  train_cem_cmd->add_option("--train", train_path, "Training corpus (JSONL)")->required();
  train_cem_cmd->add_option("--variant", variant_name, "cif_aligned (ca) or hyp_synchronous (aed)");
  train_cem_cmd->add_flag("--corrupt", corrupt,
                          "Draw hypotheses by corrupting the references (config cem.corruption)");

  // evaluate
  auto *eval = app.add_subcommand("evaluate", "Score a test corpus and write metric reports");
  std::string ca_path, aed_path, test_path;
  int bins = kDefaultBins;
  std::size_t thresholds = kDefaultThresholds;
  std::string ece_u_mode = "utterance_mean";
  eval->add_option("--test", test_path, "Test corpus with hypotheses")->required();
  eval->add_option("--base", base_path, "Base checkpoint (softmax scores)");
  eval->add_option("--ca", ca_path, "CIF-aligned checkpoint");
  eval->add_option("--aed", aed_path, "Hypothesis-synchronous checkpoint");
  eval->add_option("--bins", bins, "Calibration bins")->check(CLI::PositiveNumber);
  eval->add_option("--thresholds", thresholds, "Curve thresholds")->check(CLI::Range(2, 100000));
  eval->add_option("--ece-u-mode", ece_u_mode, "utterance_mean or bin_level")
      ->check(CLI::IsMember({"utterance_mean", "bin_level"}));
  eval->add_option("--sigma", sigma, "Re-render features at this noise level");

  // filter-curve
  auto *filter = app.add_subcommand("filter-curve", "Filtering curves from utterance records");
  std::string utts_path, variant_filter;
  filter->add_option("--utts", utts_path, "utts.tsv written by evaluate")->required();
  filter->add_option("--variant", variant_filter, "Only this variant");
  filter->add_option("--thresholds", thresholds, "Equally spaced thresholds")
      ->check(CLI::Range(2, 100000));

  // case-study
  auto *cs_cmd = app.add_subcommand("case-study", "Per-token table for one utterance");
  std::string utt_id;
  bool trace = false;
  cs_cmd->add_option("--corpus", corpus_path, "Corpus with hypotheses")->required();
  cs_cmd->add_option("--utt", utt_id, "Utterance id")->required();
  cs_cmd->add_option("--base", base_path, "Base checkpoint (softmax row)");
  cs_cmd->add_option("--ca", ca_path, "CIF-aligned checkpoint");
  cs_cmd->add_option("--aed", aed_path, "Hypothesis-synchronous checkpoint");
  cs_cmd->add_flag("--trace", trace, "Also write the CIF firing trace");

  // noise-sweep
  auto *sweep = app.add_subcommand("noise-sweep", "Confidence under increasing feature noise");
  std::vector<double> sigmas;
  sweep->add_option("--ca", ca_path, "CIF-aligned checkpoint")->required();
  sweep->add_option("--test", test_path, "Test corpus (regenerable features)")->required();
  sweep->add_option("--sigmas", sigmas, "Ascending noise levels")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitCodeFor(ErrorKind::kUsage);
  }

  try {
    const ExperimentConfig config = LoadConfig(g);

    if (*gen) {
      CorpusSpec spec = config.corpus;
      if (n_utts > 0) spec.n_utts = n_utts;
      Corpus all = gen_corpus(spec);
      if (n_train >= 0) {
        if (n_train == 0 || n_train >= spec.n_utts)
          Fail(ErrorKind::kUsage, "--train must lie in [1, n_utts)");
        auto [train, test] = all.Split(static_cast<std::size_t>(n_train));
        WriteCorpus(OutPath(g, "train.jsonl"), train, materialize);
        WriteCorpus(OutPath(g, "test.jsonl"), test, materialize);
        std::printf("wrote %zu train / %zu test utterances to %s\n", train.utts.size(),
                    test.utts.size(), g.out.c_str());
      } else {
        WriteCorpus(OutPath(g, "corpus.jsonl"), all, materialize);
        std::printf("wrote %zu utterances to %s/corpus.jsonl\n", all.utts.size(), g.out.c_str());
      }
    } else if (*train_asr) {
      Corpus train = ReadCorpus(train_path);
      BaseTrainConfig base;
      base.model = config.model;
      base.optim = config.base_optim;
      base.seed = config.seed;
      base.quantity_weight = config.quantity_weight;
      base.snapshot_every = snapshot_every;
      if (snapshot_every > 0) {
        EnsureDirectory(g.out + "/snapshots");
        base.on_snapshot = [&](int step, const Model &m) {
          char name[64];
          std::snprintf(name, sizeof(name), "/snapshots/step_%06d.ckpt", step);
          SaveCheckpoint(g.out + name, m, {{"step", step}});
        };
      }
      TrainResult r = train_base(train, base);
      SaveCheckpoint(OutPath(g, "base.ckpt"), r.model,
                     {{"steps", config.base_optim.total_steps}, {"train", train_path}});
      std::ofstream log = OpenOutput(OutPath(g, "train_log.tsv"));
      WriteTrainLogTsv(log, r.log);
      std::printf("final loss %.4f; wrote %s/base.ckpt\n", r.log.back().loss, g.out.c_str());
    } else if (*decode) {
      LoadedCheckpoint ck = LoadCheckpoint(ckpt_path);
      Corpus corpus = ReadCorpus(corpus_path);
      DecodeResult d = decode_corpus(ck.model, corpus, sigma);
      Corpus with = WithHypotheses(corpus, d);
      WriteCorpus(OutPath(g, output_name), with);
      std::printf("corpus CER %.4f, %zu empty decodes; wrote %s/%s\n", d.corpus_cer,
                  d.empty_decodes, g.out.c_str(), output_name.c_str());
    } else if (*train_cem_cmd) {
      LoadedCheckpoint base = LoadCheckpoint(base_path);
      Corpus train = ReadCorpus(train_path);
      bool missing = false;
      for (const auto &u : train.utts) missing = missing || !u.hyp;
      const bool corrupted = corrupt || missing;
      if (corrupted)
        AttachCorruptedHypotheses(train, config.train_corruption, DeriveSeed(config.seed, 21));
      CemTrainConfig cem = config.cem;
      cem.variant = ParseCemVariant(variant_name);
      if (corrupted && config.redraw_hypotheses) cem.redraw = config.train_corruption;
      CemTrainResult r = train_cem(base.model, train, cem);
      const std::string stem = std::string("cem_") + CemVariantName(cem.variant);
      SaveCheckpoint(OutPath(g, stem + ".ckpt"), r.model,
                     {{"base", base_path}, {"train", train_path},
                      {"skipped_utts", r.skipped_utts}});
      std::ofstream log = OpenOutput(OutPath(g, stem + "_log.tsv"));
      WriteTrainLogTsv(log, r.log);
      std::printf("final loss %.4f, %zu utterances skipped; wrote %s/%s.ckpt\n",
                  r.log.back().loss, r.skipped_utts, g.out.c_str(), stem.c_str());
    } else if (*eval) {
      auto base = MaybeLoad(base_path);
      auto ca = MaybeLoad(ca_path);
      auto aed = MaybeLoad(aed_path);
      if (!base && !ca && !aed) Fail(ErrorKind::kUsage, "evaluate needs --base, --ca or --aed");
      Corpus test = ReadCorpus(test_path);
      RequireHypotheses(test, test_path);
      EvaluateOptions opt;
      opt.bins = bins;
      opt.thresholds = thresholds;
      opt.ece_u_mode = ece_u_mode == "bin_level" ? EceUMode::kBinLevel : EceUMode::kUtteranceMean;
      opt.noise_sigma = sigma;
      EvaluationResult r = evaluate({base ? &base->model : nullptr, aed ? &aed->model : nullptr,
                                     ca ? &ca->model : nullptr},
                                    test, opt);
      WriteEvaluation(g.out, r);
      std::vector<MetricsReport> reports;
      for (const auto &v : r.variants) reports.push_back(v.report);
      WriteSummaryTsv(std::cout, reports);
      if (!r.skipped.empty())
        std::fprintf(stderr, "%zu utterances skipped (empty hypothesis or decode)\n",
                     r.skipped.size());
    } else if (*filter) {
      std::ifstream is = OpenInput(utts_path);
      auto groups = ReadUttRecordsTsv(is);
      const auto th = EqualSpacedThresholds(thresholds);
      bool any = false;
      for (const auto &[variant, utts] : groups) {
        if (!variant_filter.empty() && variant != variant_filter) continue;
        any = true;
        auto [clean, with_del] = split_by_deletion(utts);
        const std::string stem = "filter_" + variant;
        std::ofstream a = OpenOutput(OutPath(g, stem + ".all.tsv"));
        WriteCurveTsv(a, filter_curve(utts, th));
        std::ofstream b = OpenOutput(OutPath(g, stem + ".no_deletion.tsv"));
        WriteCurveTsv(b, filter_curve(clean, th));
        std::ofstream c = OpenOutput(OutPath(g, stem + ".deletion.tsv"));
        WriteCurveTsv(c, filter_curve(with_del, th));
        std::printf("%s: %zu utterances (%zu with deletions) -> %s/%s.*.tsv\n", variant.c_str(),
                    utts.size(), with_del.size(), g.out.c_str(), stem.c_str());
      }
      if (!any) Fail(ErrorKind::kNotFound, "no records for variant '" + variant_filter + "'");
    } else if (*cs_cmd) {
      auto base = MaybeLoad(base_path);
      auto ca = MaybeLoad(ca_path);
      auto aed = MaybeLoad(aed_path);
      if (!base && !ca && !aed) Fail(ErrorKind::kUsage, "case-study needs --base, --ca or --aed");
      Corpus corpus = ReadCorpus(corpus_path);
      CaseStudy cs = case_study({base ? &base->model : nullptr, aed ? &aed->model : nullptr,
                                 ca ? &ca->model : nullptr},
                                corpus, utt_id);
      WriteCaseStudyTsv(std::cout, cs);
      std::ofstream os = OpenOutput(OutPath(g, "case_" + utt_id + ".tsv"));
      WriteCaseStudyTsv(os, cs);
      if (trace && ca) {
        std::ofstream ts = OpenOutput(OutPath(g, "case_" + utt_id + ".trace.tsv"));
        WriteFiringTrace(ts, cs.trace);
      }
    } else if (*sweep) {
      LoadedCheckpoint ca = LoadCheckpoint(ca_path);
      Corpus test = ReadCorpus(test_path);
      auto rows = noise_sweep(ca.model, test, sigmas);
      WriteNoiseSweepTsv(std::cout, rows);
      std::ofstream os = OpenOutput(OutPath(g, "noise_sweep.tsv"));
      WriteNoiseSweepTsv(os, rows);
    }
  } catch (const Error &e) {
    std::fprintf(stderr, "cacem: %s\n", e.what());
    return ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "cacem: %s\n", e.what());
    return ExitCodeFor(ErrorKind::kData);
  }
  return 0;
}
