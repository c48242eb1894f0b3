// Copyright 2026 The plearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PLEARN_RNG_H_
#define PLEARN_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace plearn {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a path of task
// coordinates, e.g. (master, state index, run index). Distinct paths give
// unrelated seeds; the result does not depend on which thread asks.
constexpr std::uint64_t DeriveSeed(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = Mix64(master);
  for (std::uint64_t key : path) h = Mix64(h ^ Mix64(key + 0x632be59bd9b4e019ULL));
  return h;
}

// Random stream owned by one trajectory. The engine output sequence is fixed
// by the standard; the distributions below are written out so results are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  int UniformInt(int n) {
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return static_cast<int>(r % range);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Draws an index from a probability vector by inverse CDF. Mass lost to
  // rounding at the top end goes to the last index with positive weight.
  int Categorical(std::span<const double> weights) {
    const double u = Uniform();
    double cumulative = 0.0;
    int last_positive = 0;
    for (int k = 0; k < static_cast<int>(weights.size()); ++k) {
      if (weights[k] <= 0.0) continue;
      last_positive = k;
      cumulative += weights[k];
      if (u < cumulative) return k;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace plearn

#endif  // PLEARN_RNG_H_
