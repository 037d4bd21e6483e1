// Copyright 2026 The EFPSN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EFPSN_RANDOM_H_
#define EFPSN_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace efpsn {

// SplitMix64 finalizer.
constexpr uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed and a path of
// identifiers, e.g. DeriveSeed(seed, {agent, neighbor, k}). Distinct paths
// give unrelated seeds; the result depends only on its inputs.
constexpr uint64_t DeriveSeed(uint64_t seed,
                              std::initializer_list<uint64_t> path) {
  uint64_t h = Mix64(seed);
  for (uint64_t p : path) h = Mix64(h ^ Mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

// Domain tags keep streams for different purposes apart.
namespace stream {
inline constexpr uint64_t kNoiseShare = 1;
inline constexpr uint64_t kEncryptionNonce = 2;
inline constexpr uint64_t kKeygen = 3;
inline constexpr uint64_t kBaseline = 4;
inline constexpr uint64_t kTrial = 5;
inline constexpr uint64_t kBatch = 6;
inline constexpr uint64_t kDataset = 7;
inline constexpr uint64_t kAttack = 8;
inline constexpr uint64_t kBasis = 9;
}  // namespace stream

using Rng = std::mt19937_64;

inline Rng MakeRng(uint64_t seed, std::initializer_list<uint64_t> path) {
  return Rng(DeriveSeed(seed, path));
}

}  // namespace efpsn

#endif  // EFPSN_RANDOM_H_
