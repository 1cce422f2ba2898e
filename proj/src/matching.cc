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

#include "q3de/matching.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "q3de/blossom.h"

namespace q3de {

namespace {

int find_root(std::vector<int> &parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

MatchingResult exact_mwpm(const MatchingProblem &problem) {
    const int n = problem.size();
    MatchingResult result;
    if (n == 0) {
        return result;
    }
    double max_cost = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(problem.boundary[i])) {
            throw std::invalid_argument("node cannot reach a boundary");
        }
        max_cost = std::max(max_cost, problem.boundary[i]);
    }
    // Pairs costing at least both boundary legs never beat two boundary
    // matches, so only cheaper pairs become edges.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::pair<int, int>> useful;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double w = problem.distance(i, j);
            if (w < problem.boundary[i] + problem.boundary[j]) {
                useful.push_back({i, j});
                max_cost = std::max(max_cost, w);
                parent[find_root(parent, i)] = find_root(parent, j);
            }
        }
    }
    double scale = std::ldexp(1.0, 40);
    while (max_cost * scale > std::ldexp(1.0, 40) && scale > 1e-300) {
        scale *= 0.5;
    }
    auto quantize = [scale](double w) { return static_cast<std::int64_t>(std::llround(w * scale)); };
    const std::int64_t big = quantize(max_cost) + 1;

    std::vector<std::vector<int>> members(n);
    for (int i = 0; i < n; ++i) {
        members[find_root(parent, i)].push_back(i);
    }
    std::vector<int> local(n, -1);
    std::vector<std::vector<std::pair<int, int>>> comp_pairs(n);
    for (const auto &pr : useful) {
        comp_pairs[find_root(parent, pr.first)].push_back(pr);
    }
    for (int root = 0; root < n; ++root) {
        const auto &mem = members[root];
        if (mem.empty()) {
            continue;
        }
        const int m = static_cast<int>(mem.size());
        if (m == 1) {
            result.boundary_matches.push_back({mem[0], problem.side[mem[0]]});
            result.total_weight += problem.boundary[mem[0]];
            continue;
        }
        for (int k = 0; k < m; ++k) {
            local[mem[k]] = k;
        }
        std::vector<WeightedEdge> edges;
        for (int k = 0; k < m; ++k) {
            edges.push_back({k, m + k, big - quantize(problem.boundary[mem[k]])});
        }
        for (const auto &[i, j] : comp_pairs[root]) {
            int a = local[i];
            int b = local[j];
            edges.push_back({a, b, big - quantize(problem.distance(i, j))});
            edges.push_back({m + a, m + b, big});
        }
        auto mate = max_weight_matching(2 * m, edges, true);
        for (int k = 0; k < m; ++k) {
            int other = mate[k];
            if (other < 0) {
                throw std::logic_error("blossom solver returned an imperfect matching");
            }
            if (other == m + k) {
                result.boundary_matches.push_back({mem[k], problem.side[mem[k]]});
                result.total_weight += problem.boundary[mem[k]];
            } else if (other < m && k < other) {
                result.pairs.push_back({mem[k], mem[other]});
                result.total_weight += problem.distance(mem[k], mem[other]);
            }
        }
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    std::sort(result.boundary_matches.begin(), result.boundary_matches.end());
    return result;
}

MatchingResult greedy_decode(const MatchingProblem &problem, int d, double unit) {
    const int n = problem.size();
    MatchingResult result;
    std::vector<char> matched(n, 0);
    const double eps = 1e-9 * std::max(unit, 1e-12);
    for (int i = 1; i <= d; ++i) {
        const double th = i * unit + eps;
        for (int a = 0; a < n; ++a) {
            if (matched[a]) {
                continue;
            }
            for (int b = 0; b < n; ++b) {
                if (b != a && !matched[b] && problem.distance(a, b) <= th) {
                    matched[a] = matched[b] = 1;
                    result.pairs.push_back({std::min(a, b), std::max(a, b)});
                    result.total_weight += problem.distance(a, b);
                    break;
                }
            }
            if (!matched[a] && problem.boundary[a] <= th) {
                matched[a] = 1;
                result.boundary_matches.push_back({a, problem.side[a]});
                result.total_weight += problem.boundary[a];
            }
        }
    }
    for (int a = 0; a < n; ++a) {
        if (!matched[a]) {
            matched[a] = 1;
            result.boundary_matches.push_back({a, problem.side[a]});
            result.total_weight += problem.boundary[a];
        }
    }
    return result;
}

bool is_perfect(const MatchingProblem &problem, const MatchingResult &result) {
    std::vector<int> seen(problem.size(), 0);
    double total = 0.0;
    for (const auto &[a, b] : result.pairs) {
        ++seen[a];
        ++seen[b];
        total += problem.distance(a, b);
    }
    for (const auto &[a, side] : result.boundary_matches) {
        ++seen[a];
        total += problem.boundary[a];
    }
    bool once = std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
    return once && std::abs(total - result.total_weight) <= 1e-9 * std::max(1.0, std::abs(total));
}

bool boundary_parity(const MatchingResult &result, BoundarySide side) {
    bool parity = false;
    for (const auto &bm : result.boundary_matches) {
        if (bm.second == side) {
            parity = !parity;
        }
    }
    return parity;
}

void write_matching_dump(std::ostream &out, const MatchingProblem &problem, const MatchingResult &result) {
    const int n = problem.size();
    for (int i = 0; i < n; ++i) {
        out << "node " << i << ' ' << problem.nodes[i].ancilla << ' ' << problem.nodes[i].layer << '\n';
    }
    for (int i = 0; i < n; ++i) {
        out << "boundary " << i << ' ' << problem.boundary[i] << ' '
            << (problem.side[i] == BoundarySide::kLow ? "low" : "high") << '\n';
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            out << "edge " << i << ' ' << j << ' ' << problem.distance(i, j) << '\n';
        }
    }
    for (const auto &[a, b] : result.pairs) {
        out << "pair " << a << ' ' << b << '\n';
    }
    for (const auto &[a, side] : result.boundary_matches) {
        out << "bmatch " << a << ' ' << (side == BoundarySide::kLow ? "low" : "high") << '\n';
    }
    out << "total " << result.total_weight << '\n';
}

}  // namespace q3de
