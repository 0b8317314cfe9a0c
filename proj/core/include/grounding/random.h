// Copyright 2026 The Grounding Authors.
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

#ifndef GROUNDING_RANDOM_H_
#define GROUNDING_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace grounding {

// 64-bit FNV-1a, used for stream derivation and config fingerprints.
uint64_t Fnv1a64(std::string_view bytes, uint64_t basis = 0xcbf29ce484222325ULL);

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// Derives the seed of a named sub-stream ("split", "init", "shuffle",
// "sampling", ...) from a global seed. Optional `index` distinguishes
// repeats of the same stream.
uint64_t DeriveSeed(uint64_t seed, std::string_view stream, uint64_t index = 0);

// Seeded generator with platform-independent draws. The standard
// distributions are implementation-defined, so bounded integers and reals
// are computed directly from the engine bits.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound). `bound` must be positive.
  uint64_t UniformInt(uint64_t bound);

  // Uniform real in [0, 1) with 53 bits of precision.
  double UniformUnit();

  double Uniform(double lo, double hi) { return lo + (hi - lo) * UniformUnit(); }

  template <typename T>
  void Shuffle(std::vector<T> &items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = UniformInt(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // `count` distinct indices drawn uniformly from [0, population), in draw
  // order. Requires count <= population.
  std::vector<size_t> SampleWithoutReplacement(size_t population, size_t count);

 private:
  std::mt19937_64 engine_;
};

}  // namespace grounding

#endif  // GROUNDING_RANDOM_H_
