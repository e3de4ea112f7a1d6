// core/src/errors.cc

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

#include "cacem/errors.h"

namespace cacem {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kEmptyDecode: return "empty-decode";
    case ErrorKind::kData: return "data";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return 1;
    case ErrorKind::kDivergence: return 3;
    default: return 2;
  }
}

void Fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, std::string(ErrorKindName(kind)) + " error: " + what);
}

}  // namespace cacem
