// Copyright 2026 The Coupon Probing Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic random streams and the library's error types.

#ifndef COUPON_PROBING_RANDOM_H_
#define COUPON_PROBING_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>

namespace coupon_probing {

// Base class for every error raised by the library.
class ProbingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an exact routine is asked to enumerate a space above its cap.
class SizeLimitError : public ProbingError {
 public:
  using ProbingError::ProbingError;
};

using Rng = std::mt19937_64;

namespace internal {

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace internal

// Returns a generator whose state is a pure function of the key tuple, so
// per-sample streams do not depend on how samples are scheduled.
inline Rng StreamRng(uint64_t seed, std::initializer_list<uint64_t> keys) {
  uint64_t h = internal::SplitMix64(seed);
  for (uint64_t k : keys) h = internal::SplitMix64(h ^ internal::SplitMix64(k));
  return Rng(h);
}

// Uniform double in [0, 1) built from the top 53 bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool Bernoulli(Rng& rng, double p) { return UniformUnit(rng) < p; }

}  // namespace coupon_probing

#endif  // COUPON_PROBING_RANDOM_H_
