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

#include "grounding/random.h"

#include <numeric>

#include "grounding/error.h"

namespace grounding {

uint64_t Fnv1a64(std::string_view bytes, uint64_t basis) {
  uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t seed, std::string_view stream, uint64_t index) {
  return Mix64(Fnv1a64(stream) ^ Mix64(seed) ^ Mix64(index + 0x51ed27ULL));
}

uint64_t Rng::UniformInt(uint64_t bound) {
  if (bound == 0) throw InvalidArgument("UniformInt bound must be positive");
  // Rejection sampling removes modulo bias.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::UniformUnit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<size_t> Rng::SampleWithoutReplacement(size_t population,
                                                  size_t count) {
  if (count > population) {
    throw InvalidArgument("cannot sample " + std::to_string(count) +
                          " items from a population of " +
                          std::to_string(population));
  }
  std::vector<size_t> pool(population);
  std::iota(pool.begin(), pool.end(), size_t{0});
  // Partial Fisher-Yates: the first `count` slots hold the draws.
  for (size_t i = 0; i < count; ++i) {
    size_t j = i + UniformInt(population - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace grounding
