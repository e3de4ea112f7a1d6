// cacem/params.h

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

#ifndef CACEM_PARAMS_H_
#define CACEM_PARAMS_H_

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cacem/autograd.h"

namespace cacem {

/// Named, ordered parameter collection. Insertion order is the census order
/// used by checkpoints and the optimizer.
class ParamStore {
 public:
  Var Add(const std::string &name, DenseMatrix init);
  const Var &Get(const std::string &name) const;
  bool Has(const std::string &name) const { return index_.count(name) > 0; }

  const std::vector<std::pair<std::string, Var>> &entries() const {
    return entries_;
  }
  std::size_t size() const { return entries_.size(); }
  std::size_t ScalarCount() const;

  /// Parameters whose name starts with any of the prefixes.
  std::vector<Var> WithPrefix(std::initializer_list<std::string_view> prefixes) const;
  std::vector<Var> All() const;

  /// requires_grad on/off for every parameter under a prefix.
  void SetTrainable(std::string_view prefix, bool trainable);
  std::vector<Var> Trainable() const;

 private:
  std::vector<std::pair<std::string, Var>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cacem

#endif  // CACEM_PARAMS_H_
