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

#include "q3de/decoding_graph.h"

#include <deque>
#include <limits>
#include <stdexcept>

namespace q3de {

namespace {
constexpr int kUnreached = std::numeric_limits<int>::max() / 4;
}  // namespace

DecodingGraph DecodingGraph::grid(int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("grid dimensions must be positive");
    }
    DecodingGraph g;
    g.grid_rows_ = rows;
    g.grid_cols_ = cols;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            g.coords_.push_back({r, c});
        }
    }
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        g.faults_.push_back({id(r, 0), kBoundaryLow});
        for (int c = 0; c + 1 < cols; ++c) {
            g.faults_.push_back({id(r, c), id(r, c + 1)});
        }
        g.faults_.push_back({id(r, cols - 1), kBoundaryHigh});
    }
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            g.faults_.push_back({id(r, c), id(r + 1, c)});
        }
    }
    g.finalize();
    return g;
}

DecodingGraph DecodingGraph::from_code(const CodeGeometry &geometry, Species species) {
    DecodingGraph g;
    for (const auto &a : geometry.ancillas(species)) {
        g.coords_.push_back(a.plaquette);
    }
    for (int q = 0; q < geometry.num_data(); ++q) {
        auto nb = geometry.data_neighbors(species, q);
        if (nb.size() == 2) {
            g.faults_.push_back({nb[0], nb[1]});
        } else {
            g.faults_.push_back({nb[0], boundary_code(geometry.boundary_side(species, q))});
        }
    }
    g.finalize();
    return g;
}

void DecodingGraph::finalize() {
    int n = num_vertices();
    std::vector<std::vector<Incidence>> adj(n);
    for (int f = 0; f < num_faults(); ++f) {
        const auto &e = faults_[f];
        adj[e.u].push_back({e.v, f});
        if (e.v >= 0) {
            adj[e.v].push_back({e.u, f});
        }
    }
    offsets_.assign(1, 0);
    for (int v = 0; v < n; ++v) {
        incidence_.insert(incidence_.end(), adj[v].begin(), adj[v].end());
        offsets_.push_back(static_cast<int>(incidence_.size()));
    }

    hops_.assign(static_cast<std::size_t>(n) * n, kUnreached);
    std::deque<int> queue;
    for (int s = 0; s < n; ++s) {
        int *row = hops_.data() + static_cast<std::size_t>(s) * n;
        row[s] = 0;
        queue.assign(1, s);
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (const auto &inc : incident(u)) {
                if (inc.other >= 0 && row[inc.other] == kUnreached) {
                    row[inc.other] = row[u] + 1;
                    queue.push_back(inc.other);
                }
            }
        }
    }

    boundary_hops_.assign(2 * static_cast<std::size_t>(n), kUnreached);
    for (int side = 0; side < 2; ++side) {
        int code = side == 0 ? kBoundaryLow : kBoundaryHigh;
        queue.clear();
        for (int v = 0; v < n; ++v) {
            for (const auto &inc : incident(v)) {
                if (inc.other == code) {
                    boundary_hops_[2 * v + side] = 1;
                    queue.push_back(v);
                    break;
                }
            }
        }
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (const auto &inc : incident(u)) {
                if (inc.other >= 0 && boundary_hops_[2 * inc.other + side] == kUnreached) {
                    boundary_hops_[2 * inc.other + side] = boundary_hops_[2 * u + side] + 1;
                    queue.push_back(inc.other);
                }
            }
        }
    }
}

}  // namespace q3de
