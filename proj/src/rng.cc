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

#include "q3de/rng.h"

#include <cmath>
#include <limits>

namespace q3de {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(master);
    for (std::uint64_t label : path) {
        h = mix64(h ^ mix64(label + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

std::uint64_t Rng::geometric_skip(double p) {
    constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max() / 4;
    if (p <= 0.0) {
        return kNever;
    }
    if (p >= 1.0) {
        return 0;
    }
    // 1 - u lies in (0, 1], so the log is finite.
    double u = 1.0 - uniform();
    double k = std::floor(std::log(u) / std::log1p(-p));
    if (!(k < static_cast<double>(kNever))) {
        return kNever;
    }
    return static_cast<std::uint64_t>(k);
}

double Rng::exponential(double rate) {
    if (rate <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log(1.0 - uniform()) / rate;
}

std::uint64_t Rng::below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(engine_);
}

}  // namespace q3de
