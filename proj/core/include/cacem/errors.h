// cacem/errors.h

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

#ifndef CACEM_ERRORS_H_
#define CACEM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cacem {

enum class ErrorKind {
  kDimension,     // operand shapes disagree
  kContract,      // precondition violated by the caller
  kLookup,        // id outside the vocabulary
  kDegenerate,    // input has no usable mass / class
  kEmptyInput,
  kEmptyDecode,
  kData,          // malformed or inconsistent file content
  kIo,
  kNotFound,
  kDivergence,    // NaN/Inf during training
  kUsage,
};

const char *ErrorKindName(ErrorKind kind);

/// All library failures are reported through this exception type; the kind
/// decides the process exit code in the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// 0 success, 1 usage, 2 data/contract, 3 divergence.
int ExitCodeFor(ErrorKind kind);

[[noreturn]] void Fail(ErrorKind kind, const std::string &what);

}  // namespace cacem

#endif  // CACEM_ERRORS_H_
