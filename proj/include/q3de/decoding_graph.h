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

#ifndef Q3DE_DECODING_GRAPH_H
#define Q3DE_DECODING_GRAPH_H

#include <cstdint>
#include <span>
#include <vector>

#include "q3de/surface_code.h"

namespace q3de {

/// Encodes a boundary endpoint in FaultEdge::v / Incidence::other.
inline constexpr int kBoundaryLow = -1;
inline constexpr int kBoundaryHigh = -2;

inline int boundary_code(BoundarySide s) { return s == BoundarySide::kLow ? kBoundaryLow : kBoundaryHigh; }
inline BoundarySide boundary_of_code(int code) {
    return code == kBoundaryLow ? BoundarySide::kLow : BoundarySide::kHigh;
}

/// One error mechanism: flips detector u and detector v (or a boundary).
struct FaultEdge {
    int u = 0;
    int v = 0;
};

struct Incidence {
    int other = 0;
    int fault = 0;
};

/// Spatial matching graph of one species. The spacetime graph is this graph
/// stacked over layers with time-like edges between copies of each vertex.
class DecodingGraph {
   public:
    /// rows x cols Manhattan lattice. Boundary edges leave column 0 to the low
    /// side and column cols-1 to the high side.
    static DecodingGraph grid(int rows, int cols);
    /// Matching graph of one ancilla species of a rotated surface code. Fault
    /// index equals data-qubit index.
    static DecodingGraph from_code(const CodeGeometry &geometry, Species species);

    int num_vertices() const { return static_cast<int>(coords_.size()); }
    int num_faults() const { return static_cast<int>(faults_.size()); }
    Coord coord(int v) const { return coords_[v]; }
    const FaultEdge &fault(int f) const { return faults_[f]; }
    std::span<const Incidence> incident(int v) const {
        return {incidence_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
    }

    /// Spatial hop count between two vertices (boundaries are not passable).
    int hops(int u, int v) const { return hops_[static_cast<std::size_t>(u) * num_vertices() + v]; }
    /// Hops from v to a boundary side, counting the final boundary edge.
    int boundary_hops(int v, BoundarySide side) const { return boundary_hops_[2 * v + static_cast<int>(side)]; }

    bool is_grid() const { return grid_rows_ > 0; }
    int grid_rows() const { return grid_rows_; }
    int grid_cols() const { return grid_cols_; }

   private:
    void finalize();

    std::vector<Coord> coords_;
    std::vector<FaultEdge> faults_;
    std::vector<int> offsets_;
    std::vector<Incidence> incidence_;
    std::vector<int> hops_;
    std::vector<int> boundary_hops_;
    int grid_rows_ = 0;
    int grid_cols_ = 0;
};

}  // namespace q3de

#endif  // Q3DE_DECODING_GRAPH_H
