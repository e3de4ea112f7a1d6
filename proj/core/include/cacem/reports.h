// cacem/reports.h

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

#ifndef CACEM_REPORTS_H_
#define CACEM_REPORTS_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cacem/evaluation.h"
#include "cacem/training.h"

namespace cacem {

// Every TSV starts with a header line; reals are printed in the
// shortest form that round-trips exactly.

/// utt_id, variant, position, token, score, label
void WriteTokenScoresTsv(std::ostream &os, const std::vector<TokenScoreRow> &rows);
std::vector<TokenScoreRow> ReadTokenScoresTsv(std::istream &is);

/// utt_id, variant, avg_conf, cer, has_deletion, token_count, edit_errors
void WriteUttRecordsTsv(std::ostream &os, const std::string &variant,
                        const std::vector<UttRecord> &utts);
/// Records grouped by variant name.
std::map<std::string, std::vector<UttRecord>> ReadUttRecordsTsv(std::istream &is);

/// step, loss, lr
void WriteTrainLogTsv(std::ostream &os, const std::vector<StepLog> &log);

/// `row` then one column per alignment slot, then `summary`.
void WriteCaseStudyTsv(std::ostream &os, const CaseStudy &cs);

/// sigma, cer, conf_gt, conf_hyp, n_utts, empty_decodes
void WriteNoiseSweepTsv(std::ostream &os, const std::vector<NoiseSweepRow> &rows);

/// Writes into dir: summary.tsv, report.json, tokens.tsv, utts.tsv and
/// curves/<variant>.<all|no_deletion|deletion>.tsv.
void WriteEvaluation(const std::string &dir, const EvaluationResult &result);

nlohmann::json EvaluationToJson(const EvaluationResult &result);

/// Creates the directory (and parents); kIo on failure.
void EnsureDirectory(const std::string &dir);
/// Opens for writing; kIo with the path on failure.
std::ofstream OpenOutput(const std::string &path);
std::ifstream OpenInput(const std::string &path);

}  // namespace cacem

#endif  // CACEM_REPORTS_H_
