// cacem/checkpoint.h

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

#ifndef CACEM_CHECKPOINT_H_
#define CACEM_CHECKPOINT_H_

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "cacem/model.h"

namespace cacem {

/// Binary container, all integers and floats little-endian:
///   magic   8 bytes "CACEMCK1"
///   u64     header length, then header JSON (config echo, cem_variant, meta)
///   u64     parameter count
///   per parameter, in census order:
///     u32 name length, name bytes, u64 rows, u64 cols, rows*cols f64
struct LoadedCheckpoint {
  Model model;
  nlohmann::json meta;
};

void WriteCheckpoint(std::ostream &os, const Model &model,
                     const nlohmann::json &meta = nlohmann::json::object());
LoadedCheckpoint ReadCheckpoint(std::istream &is);

void SaveCheckpoint(const std::string &path, const Model &model,
                    const nlohmann::json &meta = nlohmann::json::object());
LoadedCheckpoint LoadCheckpoint(const std::string &path);

}  // namespace cacem

#endif  // CACEM_CHECKPOINT_H_
