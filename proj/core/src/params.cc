// core/src/params.cc

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

#include "cacem/params.h"

#include "cacem/errors.h"

namespace cacem {

Var ParamStore::Add(const std::string &name, DenseMatrix init) {
  if (Has(name)) Fail(ErrorKind::kContract, "duplicate parameter " + name);
  Var v = MakeParameter(std::move(init));
  index_.emplace(name, entries_.size());
  entries_.emplace_back(name, v);
  return v;
}

const Var &ParamStore::Get(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) Fail(ErrorKind::kNotFound, "no parameter " + name);
  return entries_[it->second].second;
}

std::size_t ParamStore::ScalarCount() const {
  std::size_t n = 0;
  for (const auto &[name, v] : entries_) n += v->value.size();
  return n;
}

std::vector<Var> ParamStore::WithPrefix(
    std::initializer_list<std::string_view> prefixes) const {
  std::vector<Var> out;
  for (const auto &[name, v] : entries_)
    for (auto p : prefixes)
      if (std::string_view(name).starts_with(p)) {
        out.push_back(v);
        break;
      }
  return out;
}

std::vector<Var> ParamStore::All() const {
  std::vector<Var> out;
  out.reserve(entries_.size());
  for (const auto &[name, v] : entries_) out.push_back(v);
  return out;
}

void ParamStore::SetTrainable(std::string_view prefix, bool trainable) {
  for (auto &[name, v] : entries_)
    if (std::string_view(name).starts_with(prefix)) {
      v->requires_grad = trainable;
      if (!trainable) v->ZeroGrad();
    }
}

std::vector<Var> ParamStore::Trainable() const {
  std::vector<Var> out;
  for (const auto &[name, v] : entries_)
    if (v->requires_grad) out.push_back(v);
  return out;
}

}  // namespace cacem
