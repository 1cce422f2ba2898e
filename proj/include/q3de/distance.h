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

#ifndef Q3DE_DISTANCE_H
#define Q3DE_DISTANCE_H

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "q3de/decoding_graph.h"

namespace q3de {

/// A detector node: graph vertex (ancilla index) and time layer.
using Node = DetectorNode;

/// Deterministic (layer, row, col) order used for scanning and tie-breaks.
inline bool node_before(const Node &a, const Node &b) {
    return a.layer != b.layer ? a.layer < b.layer : a.ancilla < b.ancilla;
}

/// -log(p / (1 - p)), clamped to be finite and nonnegative.
double log_odds_weight(double p);

/// Inclusive box [r0, r1] x [c0, c1] x [t0, t1] on a grid graph. The column
/// range may extend to -1 or cols to include boundary edges.
struct GridBox {
    int r0 = 0;
    int r1 = 0;
    int c0 = 0;
    int c1 = 0;
    int t0 = 0;
    int t1 = 0;
};

/// Space-time extent of one anomalous region on a decoding graph. A space
/// edge at layer t is anomalous when its fault is masked and t lies in
/// [first_layer, last_layer]; a time edge t -> t+1 when its vertex is masked
/// and both layers lie in that range.
struct SpacetimeRegion {
    std::vector<std::uint8_t> fault_mask;
    std::vector<std::uint8_t> vertex_mask;
    int first_layer = 0;
    int last_layer = 0;
    std::optional<GridBox> box;

    /// Box semantics: an edge is anomalous iff both endpoints lie in the box.
    static SpacetimeRegion from_box(const DecodingGraph &graph, const GridBox &box);
    /// Faults on data sites covered by the region and ancillas inside it,
    /// over the layers the region is active (clipped to num_layers).
    static SpacetimeRegion from_anomaly(const CodeGeometry &geometry, Species species, const AnomalousRegion &region,
                                        int num_layers);

    bool space_anomalous(int fault, int layer) const {
        return fault_mask[fault] != 0 && layer >= first_layer && layer <= last_layer;
    }
    bool time_anomalous(int vertex, int layer) const {
        return vertex_mask[vertex] != 0 && layer >= first_layer && layer + 1 <= last_layer;
    }
};

struct WeightModel {
    double space_normal = 1.0;
    double time_normal = 1.0;
    double space_ano = 1.0;
    double time_ano = 1.0;
    std::optional<SpacetimeRegion> region;

    static WeightModel uniform(double p, double p_meas);
    static WeightModel anomalous(double p, double p_meas, double p_ano, double p_meas_ano, SpacetimeRegion region);
    static WeightModel unit() { return WeightModel{}; }

    double space(int fault, int layer) const {
        return region && region->space_anomalous(fault, layer) ? space_ano : space_normal;
    }
    double time(int vertex, int layer) const {
        return region && region->time_anomalous(vertex, layer) ? time_ano : time_normal;
    }
    /// Closed forms and the region table assume anomalous edges are cheaper.
    bool anomalous_cheaper() const { return space_ano <= space_normal && time_ano <= time_normal; }
};

struct BoundaryChoice {
    double weight = 0.0;
    BoundarySide side = BoundarySide::kLow;
};

/// Dense distance data for one set of active nodes, nodes in node_before order.
struct MatchingProblem {
    std::vector<Node> nodes;
    std::vector<double> pair;
    std::vector<double> boundary;
    std::vector<BoundarySide> side;

    int size() const { return static_cast<int>(nodes.size()); }
    double distance(int i, int j) const { return pair[static_cast<std::size_t>(i) * nodes.size() + j]; }
};

class DistanceModel {
   public:
    virtual ~DistanceModel() = default;
    virtual double pair(const Node &a, const Node &b) const = 0;
    virtual BoundaryChoice boundary(const Node &a) const = 0;
    /// Unit used by the greedy threshold schedule.
    virtual double normal_unit() const = 0;
    /// Sorts the nodes and fills the dense matrices.
    virtual MatchingProblem problem(std::span<const Node> nodes) const;
};

/// Hop-count metric: spatial hops times the space weight plus |dt| times the
/// time weight. On a grid this is the weighted 3D Manhattan distance.
class UniformDistance : public DistanceModel {
   public:
    UniformDistance(const DecodingGraph &graph, double w_space, double w_time)
        : graph_(&graph), w_space_(w_space), w_time_(w_time) {}
    double pair(const Node &a, const Node &b) const override;
    BoundaryChoice boundary(const Node &a) const override;
    double to_side(const Node &a, BoundarySide side) const;
    double normal_unit() const override { return w_space_; }

   private:
    const DecodingGraph *graph_;
    double w_space_;
    double w_time_;
};

struct PathStep {
    bool time_like = false;
    /// Fault index for space steps, vertex index for time steps.
    int index = 0;
    /// Layer of a space step, lower layer of a time step.
    int layer = 0;
};

struct PathResult {
    double weight = 0.0;
    std::vector<PathStep> steps;
};

/// Exact shortest paths on the stacked graph with region-dependent weights.
/// Boundary sides are sinks and are never expanded.
class DijkstraDistance : public DistanceModel {
   public:
    DijkstraDistance(const DecodingGraph &graph, WeightModel weights, int num_layers);
    double pair(const Node &a, const Node &b) const override { return path(a, b).weight; }
    BoundaryChoice boundary(const Node &a) const override;
    double normal_unit() const override { return weights_.space_normal; }

    PathResult path(const Node &a, const Node &b) const;
    PathResult path_to_boundary(const Node &a, BoundarySide side) const;
    /// Distances from a to every stacked vertex (t * V + v), then the low and
    /// high sinks.
    std::vector<double> single_source(const Node &a) const;

    const WeightModel &weights() const { return weights_; }
    const DecodingGraph &graph() const { return *graph_; }
    int num_layers() const { return layers_; }

   private:
    PathResult search(const Node &a, int target) const;

    const DecodingGraph *graph_;
    WeightModel weights_;
    int layers_;
};

/// Closed-form region-aware distance on a grid graph with a single box
/// region: the direct Manhattan geodesic versus the geodesic that enters the
/// box at the projection of each endpoint and crosses it at anomalous cost.
class CandidateDistance : public DistanceModel {
   public:
    CandidateDistance(const DecodingGraph &graph, WeightModel weights, int num_layers);
    double pair(const Node &a, const Node &b) const override;
    BoundaryChoice boundary(const Node &a) const override;
    double to_side(const Node &a, BoundarySide side) const;
    double normal_unit() const override { return weights_.space_normal; }

   private:
    const DecodingGraph *graph_;
    WeightModel weights_;
    bool active_ = false;
    GridBox box_;
};

/// Exact region-aware distance for an arbitrary decoding graph. Distances
/// among vertices touching anomalous edges are precomputed by Dijkstra;
/// queries combine them with hop-count distances outside the region.
class RegionDistance : public DistanceModel {
   public:
    RegionDistance(const DecodingGraph &graph, WeightModel weights, int num_layers);
    double pair(const Node &a, const Node &b) const override;
    BoundaryChoice boundary(const Node &a) const override;
    double normal_unit() const override { return weights_.space_normal; }
    MatchingProblem problem(std::span<const Node> nodes) const override;

    int portal_count() const { return static_cast<int>(portals_.size()); }

   private:
    double uniform(int x, int y) const;
    double uniform_sink(int x, int side) const;
    std::vector<double> entry_profile(int x) const;
    double pair_with_profile(const std::vector<double> &prof_a, int a_id, int b_id) const;
    BoundaryChoice boundary_with_profile(const std::vector<double> &prof_a, int a_id) const;

    const DecodingGraph *graph_;
    WeightModel weights_;
    int layers_;
    int stacked_;
    std::vector<int> portals_;     // stacked ids, sinks encoded as stacked_ + side
    std::vector<int> portal_of_;   // stacked id -> portal index or -1
    std::vector<int> entries_;     // portal indices that border non-portal vertices
    std::array<int, 2> sink_portal_{-1, -1};
    std::vector<double> table_;    // non-sink portal x portal
};

/// Convenience wrappers matching the operation names used by the tools.
double uniform_distance(const DecodingGraph &graph, double w_space, double w_time, const Node &a, const Node &b);
BoundaryChoice uniform_boundary_distance(const DecodingGraph &graph, double w_space, double w_time, const Node &a);
PathResult dijkstra_distance(const DecodingGraph &graph, const WeightModel &weights, int num_layers, const Node &a,
                             const Node &b);
PathResult dijkstra_boundary_distance(const DecodingGraph &graph, const WeightModel &weights, int num_layers,
                                      const Node &a, BoundarySide side);
double candidate_distance(const DecodingGraph &graph, const WeightModel &weights, int num_layers, const Node &a,
                          const Node &b);

}  // namespace q3de

#endif  // Q3DE_DISTANCE_H
