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

// Slow reference implementations shared by the unit and acceptance tests.

#ifndef Q3DE_TESTS_ORACLES_H
#define Q3DE_TESTS_ORACLES_H

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "q3de/distance.h"
#include "q3de/rng.h"
#include "q3de/surface_code.h"

namespace q3de::oracle {

inline double enumerate_rec(const MatchingProblem &mp, std::vector<char> &used) {
    const int n = mp.size();
    int i = 0;
    while (i < n && used[i]) {
        ++i;
    }
    if (i == n) {
        return 0.0;
    }
    used[i] = 1;
    double best = mp.boundary[i] + enumerate_rec(mp, used);
    for (int j = i + 1; j < n; ++j) {
        if (!used[j]) {
            used[j] = 1;
            best = std::min(best, mp.distance(i, j) + enumerate_rec(mp, used));
            used[j] = 0;
        }
    }
    used[i] = 0;
    return best;
}

/// Minimum total weight over every assignment of each node to a partner or
/// to its nearest boundary.
inline double enumerate_matchings(const MatchingProblem &mp) {
    std::vector<char> used(mp.size(), 0);
    return enumerate_rec(mp, used);
}

/// Bellman-Ford over the explicitly stacked space-time graph. Vertex ids are
/// t * V + v; the two boundary sinks follow.
struct StackedDistances {
    std::vector<double> dist;
    int num_vertices = 0;
    int num_layers = 0;

    double to(const Node &n) const { return dist[static_cast<std::size_t>(n.layer) * num_vertices + n.ancilla]; }
    double sink(BoundarySide s) const {
        return dist[static_cast<std::size_t>(num_layers) * num_vertices + static_cast<int>(s)];
    }
    double boundary() const { return std::min(sink(BoundarySide::kLow), sink(BoundarySide::kHigh)); }
};

inline StackedDistances bellman_ford(const DecodingGraph &graph, const WeightModel &weights, int num_layers,
                                     const Node &source) {
    struct Arc {
        int a;
        int b;
        double w;
    };
    const int nv = graph.num_vertices();
    const int total = nv * num_layers + 2;
    std::vector<Arc> arcs;
    for (int t = 0; t < num_layers; ++t) {
        for (int f = 0; f < graph.num_faults(); ++f) {
            const FaultEdge &e = graph.fault(f);
            const double w = weights.space(f, t);
            const int a = t * nv + e.u;
            const int b = e.v >= 0 ? t * nv + e.v : nv * num_layers + (e.v == kBoundaryLow ? 0 : 1);
            arcs.push_back({a, b, w});
        }
        if (t + 1 < num_layers) {
            for (int v = 0; v < nv; ++v) {
                arcs.push_back({t * nv + v, (t + 1) * nv + v, weights.time(v, t)});
            }
        }
    }
    StackedDistances out;
    out.num_vertices = nv;
    out.num_layers = num_layers;
    out.dist.assign(total, std::numeric_limits<double>::infinity());
    out.dist[static_cast<std::size_t>(source.layer) * nv + source.ancilla] = 0.0;
    for (bool changed = true; changed;) {
        changed = false;
        for (const Arc &arc : arcs) {
            const bool sink_b = arc.b >= nv * num_layers;
            if (out.dist[arc.a] + arc.w < out.dist[arc.b]) {
                out.dist[arc.b] = out.dist[arc.a] + arc.w;
                changed = true;
            }
            if (!sink_b && out.dist[arc.b] + arc.w < out.dist[arc.a]) {
                out.dist[arc.a] = out.dist[arc.b] + arc.w;
                changed = true;
            }
        }
    }
    return out;
}

/// Minimum-weight data correction reproducing a static syndrome, by
/// enumerating all 2^(d^2) flip patterns. Returns the correction with the
/// smallest weight; ties keep the first pattern in counting order.
inline std::vector<std::uint8_t> brute_force_correction(const CodeGeometry &geometry, Species s,
                                                        const std::vector<std::uint8_t> &syndrome) {
    const int n = geometry.num_data();
    std::vector<std::uint8_t> best;
    int best_weight = n + 1;
    std::vector<std::uint8_t> flips(n, 0);
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        const int w = __builtin_popcount(mask);
        if (w >= best_weight) {
            continue;
        }
        for (int q = 0; q < n; ++q) {
            flips[q] = (mask >> q) & 1U;
        }
        if (static_syndrome(geometry, s, flips) == syndrome) {
            best = flips;
            best_weight = w;
        }
    }
    return best;
}

/// Exact minimum-weight assignment by dynamic programming over subsets.
/// partner[i] is the matched node, or -1 for the boundary.
struct SubsetMatching {
    double weight = 0.0;
    std::vector<int> partner;
};

template <typename PairFn, typename BoundaryFn>
SubsetMatching subset_matching(int n, PairFn pair, BoundaryFn boundary) {
    const std::uint32_t full = (1U << n) - 1;
    std::vector<double> best(full + 1, std::numeric_limits<double>::infinity());
    std::vector<int> choice(full + 1, -2);
    best[0] = 0.0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const int i = __builtin_ctz(mask);
        const std::uint32_t rest = mask & ~(1U << i);
        double b = boundary(i) + best[rest];
        int c = -1;
        for (int j = i + 1; j < n; ++j) {
            if (rest & (1U << j)) {
                const double w = pair(i, j) + best[rest & ~(1U << j)];
                if (w < b) {
                    b = w;
                    c = j;
                }
            }
        }
        best[mask] = b;
        choice[mask] = c;
    }
    SubsetMatching out;
    out.weight = best[full];
    out.partner.assign(n, -1);
    for (std::uint32_t mask = full; mask != 0;) {
        const int i = __builtin_ctz(mask);
        const int c = choice[mask];
        mask &= ~(1U << i);
        if (c >= 0) {
            out.partner[i] = c;
            out.partner[c] = i;
            mask &= ~(1U << c);
        }
    }
    return out;
}

/// Logical flip of a minimum-weight decoding computed from scratch: stacked
/// graph distances by Bellman-Ford, subset matching, and the parity of
/// matches to the low boundary.
inline bool reference_logical_flip(const DecodingGraph &graph, const WeightModel &weights, int num_layers,
                                   const std::vector<Node> &nodes) {
    const int n = static_cast<int>(nodes.size());
    std::vector<StackedDistances> from;
    from.reserve(n);
    for (const Node &a : nodes) {
        from.push_back(bellman_ford(graph, weights, num_layers, a));
    }
    const SubsetMatching m = subset_matching(
        n, [&](int i, int j) { return from[i].to(nodes[j]); }, [&](int i) { return from[i].boundary(); });
    bool flip = false;
    for (int i = 0; i < n; ++i) {
        if (m.partner[i] < 0 && from[i].sink(BoundarySide::kLow) <= from[i].sink(BoundarySide::kHigh)) {
            flip = !flip;
        }
    }
    return flip;
}

inline std::vector<Node> random_nodes(Rng &rng, int count, int num_vertices, int num_layers) {
    std::vector<Node> nodes;
    while (static_cast<int>(nodes.size()) < count) {
        Node n{static_cast<int>(rng.below(num_vertices)), static_cast<int>(rng.below(num_layers))};
        if (std::find(nodes.begin(), nodes.end(), n) == nodes.end()) {
            nodes.push_back(n);
        }
    }
    return nodes;
}

}  // namespace q3de::oracle

#endif  // Q3DE_TESTS_ORACLES_H
