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

#ifndef Q3DE_BLOSSOM_H
#define Q3DE_BLOSSOM_H

#include <cstdint>
#include <vector>

namespace q3de {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    std::int64_t weight = 0;
};

/// Maximum-weight matching on a general graph (Edmonds' blossom algorithm
/// with primal-dual updates, O(n^3)). Integer weights keep the dual updates
/// exact. With max_cardinality set, the result is a maximum-weight matching
/// among maximum-cardinality matchings.
///
/// Returns mate[v] for every vertex, -1 when unmatched.
std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge> &edges,
                                     bool max_cardinality);

}  // namespace q3de

#endif  // Q3DE_BLOSSOM_H
