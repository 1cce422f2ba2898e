// Copyright 2026 The Q3DE Simulator Authors
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

#ifndef Q3DE_RNG_H
#define Q3DE_RNG_H

#include <cstdint>
#include <initializer_list>
#include <random>

namespace q3de {

/// Mixes a 64-bit value (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a master seed and a path of integer labels
/// (experiment point, trial index, cycle, ...). Deterministic and
/// independent of the order in which children are requested.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Thin wrapper over std::mt19937_64 with the few draws the simulators need.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }

    /// Number of failures before the first success of a Bernoulli(p) process.
    /// Returns a huge value when p == 0.
    std::uint64_t geometric_skip(double p);

    /// Exponential variate with the given rate.
    double exponential(double rate);

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    std::mt19937_64 &engine() { return engine_; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace q3de

#endif  // Q3DE_RNG_H
