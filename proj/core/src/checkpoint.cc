// core/src/checkpoint.cc

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

#include "cacem/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cacem/errors.h"

namespace cacem {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'C', 'E', 'M', 'C', 'K', '1'};

void PutU64(std::ostream &os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf, 8);
}

void PutU32(std::ostream &os, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf, 4);
}

std::uint64_t GetU64(std::istream &is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char *>(buf), 8))
    Fail(ErrorKind::kData, "checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::uint32_t GetU32(std::istream &is) {
  unsigned char buf[4];
  if (!is.read(reinterpret_cast<char *>(buf), 4))
    Fail(ErrorKind::kData, "checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::string GetBytes(std::istream &is, std::uint64_t n) {
  if (n > (std::uint64_t{1} << 32)) Fail(ErrorKind::kData, "checkpoint field too large");
  std::string s(n, '\0');
  if (n && !is.read(s.data(), static_cast<std::streamsize>(n)))
    Fail(ErrorKind::kData, "checkpoint truncated");
  return s;
}

}  // namespace

void WriteCheckpoint(std::ostream &os, const Model &model,
                     const nlohmann::json &meta) {
  nlohmann::json header = {{"format", "cacem-checkpoint"},
                           {"version", 1},
                           {"config", model.config().ToJson()},
                           {"cem_variant", CemVariantName(model.cem_variant())},
                           {"meta", meta}};
  const std::string text = header.dump();
  os.write(kMagic, sizeof(kMagic));
  PutU64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto &entries = model.params().entries();
  PutU64(os, entries.size());
  for (const auto &[name, v] : entries) {
    PutU32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    PutU64(os, v->value.rows());
    PutU64(os, v->value.cols());
    for (double x : v->value.values()) PutU64(os, std::bit_cast<std::uint64_t>(x));
  }
  if (!os) Fail(ErrorKind::kIo, "failed writing checkpoint");
}

LoadedCheckpoint ReadCheckpoint(std::istream &is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    Fail(ErrorKind::kData, "not a cacem checkpoint (bad magic)");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(GetBytes(is, GetU64(is)));
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kData, std::string("checkpoint header: ") + e.what());
  }
  ModelConfig config = ModelConfig::FromJson(header.at("config"));
  CemVariant variant = ParseCemVariant(header.at("cem_variant").get<std::string>());
  Model model(config, 0);
  Rng rng(0);
  model.AttachCemHead(variant, rng);

  const auto &entries = model.params().entries();
  const std::uint64_t count = GetU64(is);
  if (count != entries.size())
    Fail(ErrorKind::kData, "checkpoint holds " + std::to_string(count) +
                               " parameters, model expects " +
                               std::to_string(entries.size()));
  for (const auto &[name, v] : entries) {
    const std::string stored = GetBytes(is, GetU32(is));
    if (stored != name)
      Fail(ErrorKind::kData, "checkpoint parameter '" + stored +
                                 "' where '" + name + "' was expected");
    const std::uint64_t rows = GetU64(is);
    const std::uint64_t cols = GetU64(is);
    if (rows != v->value.rows() || cols != v->value.cols())
      Fail(ErrorKind::kData, "checkpoint parameter " + name + " has shape (" +
                                 std::to_string(rows) + "x" +
                                 std::to_string(cols) + "), expected " +
                                 v->value.ShapeString());
    for (double &x : v->value.values()) x = std::bit_cast<double>(GetU64(is));
  }
  return {std::move(model), header.value("meta", nlohmann::json::object())};
}

void SaveCheckpoint(const std::string &path, const Model &model,
                    const nlohmann::json &meta) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  WriteCheckpoint(os, model, meta);
}

LoadedCheckpoint LoadCheckpoint(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open checkpoint " + path);
  try {
    return ReadCheckpoint(is);
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace cacem
