// core/src/reports.cc

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

#include "cacem/reports.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cacem/errors.h"

namespace cacem {

namespace {

// Shortest decimal form that parses back to the same double.
struct Real {
  double v;
};

std::ostream &operator<<(std::ostream &os, Real r) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), r.v);
  return os.write(buf, res.ptr - buf);
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> ReadTable(std::istream &is, std::size_t columns,
                                                const char *what) {
  std::string line;
  if (!std::getline(is, line)) Fail(ErrorKind::kData, std::string(what) + ": missing header");
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = SplitTabs(line);
    if (fields.size() != columns)
      Fail(ErrorKind::kData, std::string(what) + ": line " + std::to_string(line_no) +
                                 " has " + std::to_string(fields.size()) +
                                 " fields, expected " + std::to_string(columns));
    rows.push_back(std::move(fields));
  }
  return rows;
}

ConfidenceVariant ParseConfidenceVariant(const std::string &name) {
  for (auto v : {ConfidenceVariant::kSoftmax, ConfidenceVariant::kHypSynchronous,
                 ConfidenceVariant::kCifAligned})
    if (name == ConfidenceVariantName(v)) return v;
  Fail(ErrorKind::kData, "unknown confidence variant '" + name + "'");
}

template <typename T>
T Parse(const std::string &s) {
  std::istringstream is(s);
  T v{};
  is >> v;
  if (is.fail()) Fail(ErrorKind::kData, "cannot parse '" + s + "'");
  return v;
}

void WriteCurve(const std::string &path, const std::vector<FilterPoint> &curve) {
  std::ofstream os = OpenOutput(path);
  WriteCurveTsv(os, curve);
}

}  // namespace

void EnsureDirectory(const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create directory " + dir + ": " + ec.message());
}

std::ofstream OpenOutput(const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  return os;
}

std::ifstream OpenInput(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open " + path);
  return is;
}

void WriteTokenScoresTsv(std::ostream &os, const std::vector<TokenScoreRow> &rows) {
  os << "utt_id\tvariant\tposition\ttoken\tscore\tlabel\n";
  for (const auto &r : rows)
    os << r.utt_id << '\t' << ConfidenceVariantName(r.variant) << '\t' << r.position
       << '\t' << r.token << '\t' << Real{r.score} << '\t' << r.label << '\n';
}

std::vector<TokenScoreRow> ReadTokenScoresTsv(std::istream &is) {
  std::vector<TokenScoreRow> out;
  for (const auto &f : ReadTable(is, 6, "token scores")) {
    TokenScoreRow r;
    r.utt_id = f[0];
    r.variant = ParseConfidenceVariant(f[1]);
    r.position = Parse<std::size_t>(f[2]);
    r.token = Parse<int>(f[3]);
    r.score = Parse<double>(f[4]);
    r.label = Parse<int>(f[5]);
    out.push_back(std::move(r));
  }
  return out;
}

void WriteUttRecordsTsv(std::ostream &os, const std::string &variant,
                        const std::vector<UttRecord> &utts) {
  os << "utt_id\tvariant\tavg_conf\tcer\thas_deletion\ttoken_count\tedit_errors\n"
    ;
  for (const auto &u : utts)
    os << u.utt_id << '\t' << variant << '\t' << Real{u.avg_conf} << '\t' << Real{u.cer} << '\t'
       << (u.has_deletion ? 1 : 0) << '\t' << u.token_count << '\t' << u.edit_errors
       << '\n';
}

std::map<std::string, std::vector<UttRecord>> ReadUttRecordsTsv(std::istream &is) {
  std::map<std::string, std::vector<UttRecord>> out;
  for (const auto &f : ReadTable(is, 7, "utterance records")) {
    UttRecord u;
    u.utt_id = f[0];
    u.avg_conf = Parse<double>(f[2]);
    u.cer = Parse<double>(f[3]);
    u.has_deletion = Parse<int>(f[4]) != 0;
    u.token_count = Parse<std::size_t>(f[5]);
    u.edit_errors = Parse<std::size_t>(f[6]);
    out[f[1]].push_back(std::move(u));
  }
  return out;
}

void WriteTrainLogTsv(std::ostream &os, const std::vector<StepLog> &log) {
  os << "step\tloss\tlr\n";
  for (const auto &s : log) os << s.step << '\t' << Real{s.loss} << '\t' << Real{s.lr} << '\n';
}

void WriteCaseStudyTsv(std::ostream &os, const CaseStudy &cs) {
  const std::size_t columns = cs.rows.empty() ? 0 : cs.rows.front().cells.size();
  os << "row";
  for (std::size_t i = 1; i <= columns; ++i) os << '\t' << i;
  os << "\tsummary\n";
  for (const auto &r : cs.rows) {
    os << r.name;
    for (const auto &c : r.cells) os << '\t' << c;
    os << '\t' << r.summary << '\n';
  }
}

void WriteNoiseSweepTsv(std::ostream &os, const std::vector<NoiseSweepRow> &rows) {
  os << "sigma\tcer\tconf_gt\tconf_hyp\tn_utts\tempty_decodes\n";
  for (const auto &r : rows)
    os << Real{r.sigma} << '\t' << Real{r.cer} << '\t' << Real{r.conf_gt} << '\t' << Real{r.conf_hyp} << '\t'
       << r.n_utts << '\t' << r.empty_decodes << '\n';
}

nlohmann::json EvaluationToJson(const EvaluationResult &result) {
  nlohmann::json j;
  j["hyp_cer"] = result.hyp_cer;
  j["skipped"] = result.skipped;
  j["auc_method"] = AucMethodName(AucMethod::kExactRank);
  j["reports"] = nlohmann::json::array();
  for (const auto &v : result.variants) j["reports"].push_back(v.report.ToJson());
  return j;
}

void WriteEvaluation(const std::string &dir, const EvaluationResult &result) {
  EnsureDirectory(dir);
  EnsureDirectory(dir + "/curves");
  std::vector<MetricsReport> reports;
  std::vector<TokenScoreRow> rows;
  for (const auto &v : result.variants) {
    reports.push_back(v.report);
    rows.insert(rows.end(), v.rows.begin(), v.rows.end());
  }
  {
    std::ofstream os = OpenOutput(dir + "/summary.tsv");
    WriteSummaryTsv(os, reports);
  }
  {
    std::ofstream os = OpenOutput(dir + "/report.json");
    os << EvaluationToJson(result).dump(2) << '\n';
  }
  {
    std::ofstream os = OpenOutput(dir + "/tokens.tsv");
    WriteTokenScoresTsv(os, rows);
  }
  {
    std::ofstream os = OpenOutput(dir + "/utts.tsv");
    os << "utt_id\tvariant\tavg_conf\tcer\thas_deletion\ttoken_count\tedit_errors\n";
    for (const auto &v : result.variants) {
      std::ostringstream body;
      WriteUttRecordsTsv(body, ConfidenceVariantName(v.variant), v.utts);
      const std::string text = body.str();
      os << text.substr(text.find('\n') + 1);
    }
  }
  for (const auto &v : result.variants) {
    const std::string base = dir + "/curves/" + ConfidenceVariantName(v.variant);
    WriteCurve(base + ".all.tsv", v.report.curve_all);
    WriteCurve(base + ".no_deletion.tsv", v.report.curve_no_deletion);
    WriteCurve(base + ".deletion.tsv", v.report.curve_deletion);
  }
}

}  // namespace cacem
