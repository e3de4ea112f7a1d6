// cacem/rng.h

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

#ifndef CACEM_RNG_H_
#define CACEM_RNG_H_

#include <array>
#include <cstdint>

namespace cacem {

/// Portable random stream: xoshiro256** (Blackman & Vigna, 2018) whose four
/// 64-bit state words are filled by successive SplitMix64 outputs of the
/// seed.  Derived quantities are defined bit-exactly so that a seed gives the
/// same stream on every platform:
///   - Uniform(): (NextU64() >> 11) * 2^-53, in [0, 1).
///   - Below(n): rejection sampling on NextU64() with the bound
///     2^64 - (2^64 mod n), then modulo n.
///   - Normal(): Box-Muller on two Uniform() draws u1, u2 with
///     r = sqrt(-2 ln(1 - u1)), returning r cos(2 pi u2) then r sin(2 pi u2).
/// The standard library distributions are not used because their output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t NextU64();
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  std::uint64_t Below(std::uint64_t n);
  // Inclusive integer range.
  std::int64_t Range(std::int64_t lo, std::int64_t hi);
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  /// Independent child stream; the parent advances by one draw.
  Rng Fork();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t SplitMix64(std::uint64_t &state);

/// Mixes a base seed with a stream label; used to give each utterance or
/// pipeline stage its own reproducible stream.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t label);

}  // namespace cacem

#endif  // CACEM_RNG_H_
