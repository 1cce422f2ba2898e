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

#ifndef Q3DE_MATCHING_H
#define Q3DE_MATCHING_H

#include <iosfwd>
#include <utility>
#include <vector>

#include "q3de/distance.h"

namespace q3de {

/// Indices refer to MatchingProblem::nodes.
struct MatchingResult {
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::pair<int, BoundarySide>> boundary_matches;
    double total_weight = 0.0;
};

/// Minimum-weight perfect matching where every node may alternatively match
/// its nearest boundary. Each node gets a virtual boundary twin; twins pair
/// with each other at zero cost. Costs are scaled to integers for the blossom
/// solver; the reported total uses the unscaled distances.
MatchingResult exact_mwpm(const MatchingProblem &problem);

/// Radius-growing greedy matching. For i = 1..d, nodes are scanned in order
/// and each unmatched node takes the first unmatched partner, else its
/// boundary, within i * unit. Leftovers go to their nearest boundary.
MatchingResult greedy_decode(const MatchingProblem &problem, int d, double unit);

/// Every node appears exactly once and the total matches the listed pairs.
bool is_perfect(const MatchingProblem &problem, const MatchingResult &result);

/// Parity of matches to the given boundary side.
bool boundary_parity(const MatchingResult &result, BoundarySide side);

/// Line-oriented dump: "node i ancilla layer", "boundary i weight side",
/// "edge i j weight", then "pair i j" / "bmatch i side" and "total w".
void write_matching_dump(std::ostream &out, const MatchingProblem &problem, const MatchingResult &result);

}  // namespace q3de

#endif  // Q3DE_MATCHING_H
