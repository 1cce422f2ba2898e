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

#include "q3de/distance.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace q3de {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundaryChoice pick_side(double low, double high) {
    return high < low ? BoundaryChoice{high, BoundarySide::kHigh} : BoundaryChoice{low, BoundarySide::kLow};
}

}  // namespace

double log_odds_weight(double p) {
    constexpr double kFloor = 1e-15;
    p = std::clamp(p, kFloor, 0.5);
    return std::max(0.0, -std::log(p / (1.0 - p)));
}

SpacetimeRegion SpacetimeRegion::from_box(const DecodingGraph &graph, const GridBox &box) {
    if (!graph.is_grid()) {
        throw std::invalid_argument("box regions need a grid graph");
    }
    SpacetimeRegion r;
    r.box = box;
    r.first_layer = box.t0;
    r.last_layer = box.t1;
    auto in_box = [&](int row, int col) {
        return row >= box.r0 && row <= box.r1 && col >= box.c0 && col <= box.c1;
    };
    r.vertex_mask.assign(graph.num_vertices(), 0);
    for (int v = 0; v < graph.num_vertices(); ++v) {
        r.vertex_mask[v] = in_box(graph.coord(v).row, graph.coord(v).col) ? 1 : 0;
    }
    r.fault_mask.assign(graph.num_faults(), 0);
    for (int f = 0; f < graph.num_faults(); ++f) {
        const auto &e = graph.fault(f);
        Coord cu = graph.coord(e.u);
        Coord cv = e.v >= 0 ? graph.coord(e.v) : Coord{cu.row, e.v == kBoundaryLow ? -1 : graph.grid_cols()};
        r.fault_mask[f] = in_box(cu.row, cu.col) && in_box(cv.row, cv.col) ? 1 : 0;
    }
    return r;
}

SpacetimeRegion SpacetimeRegion::from_anomaly(const CodeGeometry &geometry, Species species,
                                              const AnomalousRegion &region, int num_layers) {
    SpacetimeRegion r;
    r.fault_mask.assign(geometry.num_data(), 0);
    for (int q = 0; q < geometry.num_data(); ++q) {
        r.fault_mask[q] = region.covers_data(geometry.data_sites()[q]) ? 1 : 0;
    }
    const auto &anc = geometry.ancillas(species);
    r.vertex_mask.assign(anc.size(), 0);
    for (std::size_t i = 0; i < anc.size(); ++i) {
        r.vertex_mask[i] = region.covers_ancilla(anc[i].plaquette) ? 1 : 0;
    }
    r.first_layer = std::max(0, region.start_cycle);
    long last = region.duration_cycles < 0 ? num_layers - 1 : long{region.start_cycle} + region.duration_cycles;
    r.last_layer = static_cast<int>(std::min<long>(last, num_layers - 1));
    return r;
}

WeightModel WeightModel::uniform(double p, double p_meas) {
    WeightModel w;
    w.space_normal = w.space_ano = log_odds_weight(p);
    w.time_normal = w.time_ano = log_odds_weight(p_meas);
    return w;
}

WeightModel WeightModel::anomalous(double p, double p_meas, double p_ano, double p_meas_ano, SpacetimeRegion region) {
    WeightModel w = uniform(p, p_meas);
    w.space_ano = log_odds_weight(p_ano);
    w.time_ano = log_odds_weight(p_meas_ano);
    w.region = std::move(region);
    return w;
}

MatchingProblem DistanceModel::problem(std::span<const Node> nodes) const {
    MatchingProblem mp;
    mp.nodes.assign(nodes.begin(), nodes.end());
    std::sort(mp.nodes.begin(), mp.nodes.end(), node_before);
    std::size_t n = mp.nodes.size();
    mp.pair.assign(n * n, 0.0);
    mp.boundary.resize(n);
    mp.side.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        BoundaryChoice b = boundary(mp.nodes[i]);
        mp.boundary[i] = b.weight;
        mp.side[i] = b.side;
        for (std::size_t j = i + 1; j < n; ++j) {
            double w = pair(mp.nodes[i], mp.nodes[j]);
            mp.pair[i * n + j] = w;
            mp.pair[j * n + i] = w;
        }
    }
    return mp;
}

double UniformDistance::pair(const Node &a, const Node &b) const {
    return w_space_ * graph_->hops(a.ancilla, b.ancilla) + w_time_ * std::abs(a.layer - b.layer);
}

double UniformDistance::to_side(const Node &a, BoundarySide side) const {
    return w_space_ * graph_->boundary_hops(a.ancilla, side);
}

BoundaryChoice UniformDistance::boundary(const Node &a) const {
    return pick_side(to_side(a, BoundarySide::kLow), to_side(a, BoundarySide::kHigh));
}

DijkstraDistance::DijkstraDistance(const DecodingGraph &graph, WeightModel weights, int num_layers)
    : graph_(&graph), weights_(std::move(weights)), layers_(num_layers) {
    if (num_layers < 1) {
        throw std::invalid_argument("need at least one layer");
    }
}

PathResult DijkstraDistance::search(const Node &a, int target) const {
    const int nv = graph_->num_vertices();
    const int stacked = nv * layers_;
    const int total = stacked + 2;
    std::vector<double> dist(total, kInf);
    std::vector<int> pred(total, -1);
    std::vector<PathStep> pred_step(total);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    int src = a.layer * nv + a.ancilla;
    dist[src] = 0.0;
    heap.push({0.0, src});
    auto relax = [&](int from, int to, double w, PathStep step) {
        double nd = dist[from] + w;
        if (nd < dist[to]) {
            dist[to] = nd;
            pred[to] = from;
            pred_step[to] = step;
            if (to < stacked) {
                heap.push({nd, to});
            }
        }
    };
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (du > dist[u]) {
            continue;
        }
        if (u == target) {
            break;
        }
        int t = u / nv;
        int v = u % nv;
        for (const auto &inc : graph_->incident(v)) {
            int to = inc.other >= 0 ? t * nv + inc.other : stacked + (inc.other == kBoundaryLow ? 0 : 1);
            relax(u, to, weights_.space(inc.fault, t), PathStep{false, inc.fault, t});
        }
        if (t + 1 < layers_) {
            relax(u, u + nv, weights_.time(v, t), PathStep{true, v, t});
        }
        if (t > 0) {
            relax(u, u - nv, weights_.time(v, t - 1), PathStep{true, v, t - 1});
        }
    }
    PathResult out;
    if (target < 0) {
        return out;
    }
    if (!(dist[target] < kInf)) {
        throw std::runtime_error("target unreachable in decoding graph");
    }
    out.weight = dist[target];
    for (int x = target; x != src; x = pred[x]) {
        out.steps.push_back(pred_step[x]);
    }
    std::reverse(out.steps.begin(), out.steps.end());
    return out;
}

std::vector<double> DijkstraDistance::single_source(const Node &a) const {
    const int nv = graph_->num_vertices();
    const int stacked = nv * layers_;
    std::vector<double> dist(stacked + 2, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    int src = a.layer * nv + a.ancilla;
    dist[src] = 0.0;
    heap.push({0.0, src});
    auto relax = [&](int to, double nd) {
        if (nd < dist[to]) {
            dist[to] = nd;
            if (to < stacked) {
                heap.push({nd, to});
            }
        }
    };
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (du > dist[u]) {
            continue;
        }
        int t = u / nv;
        int v = u % nv;
        for (const auto &inc : graph_->incident(v)) {
            int to = inc.other >= 0 ? t * nv + inc.other : stacked + (inc.other == kBoundaryLow ? 0 : 1);
            relax(to, du + weights_.space(inc.fault, t));
        }
        if (t + 1 < layers_) {
            relax(u + nv, du + weights_.time(v, t));
        }
        if (t > 0) {
            relax(u - nv, du + weights_.time(v, t - 1));
        }
    }
    return dist;
}

PathResult DijkstraDistance::path(const Node &a, const Node &b) const {
    return search(a, b.layer * graph_->num_vertices() + b.ancilla);
}

PathResult DijkstraDistance::path_to_boundary(const Node &a, BoundarySide side) const {
    return search(a, graph_->num_vertices() * layers_ + static_cast<int>(side));
}

BoundaryChoice DijkstraDistance::boundary(const Node &a) const {
    auto dist = single_source(a);
    int stacked = graph_->num_vertices() * layers_;
    return pick_side(dist[stacked], dist[stacked + 1]);
}

CandidateDistance::CandidateDistance(const DecodingGraph &graph, WeightModel weights, int num_layers)
    : graph_(&graph), weights_(std::move(weights)) {
    if (!graph.is_grid()) {
        throw std::invalid_argument("candidate distance needs a grid graph");
    }
    if (!weights_.region) {
        return;
    }
    if (!weights_.region->box) {
        throw std::invalid_argument("candidate distance needs a single box region");
    }
    if (!weights_.anomalous_cheaper()) {
        throw std::invalid_argument("candidate distance needs anomalous weights below normal weights");
    }
    GridBox b = *weights_.region->box;
    b.r0 = std::max(b.r0, 0);
    b.r1 = std::min(b.r1, graph.grid_rows() - 1);
    b.c0 = std::max(b.c0, -1);
    b.c1 = std::min(b.c1, graph.grid_cols());
    b.t0 = std::max(b.t0, 0);
    b.t1 = std::min(b.t1, num_layers - 1);
    active_ = b.r0 <= b.r1 && std::max(b.c0, 0) <= std::min(b.c1, graph.grid_cols() - 1) && b.t0 <= b.t1;
    box_ = b;
}

double CandidateDistance::pair(const Node &a, const Node &b) const {
    Coord ca = graph_->coord(a.ancilla);
    Coord cb = graph_->coord(b.ancilla);
    const double ws = weights_.space_normal;
    const double wt = weights_.time_normal;
    double direct = ws * (std::abs(ca.row - cb.row) + std::abs(ca.col - cb.col)) + wt * std::abs(a.layer - b.layer);
    if (!active_) {
        return direct;
    }
    auto axis = [](int x, int y, int lo, int hi, double wn, double wa) {
        int px = std::clamp(x, lo, hi);
        int py = std::clamp(y, lo, hi);
        return wn * (std::abs(x - px) + std::abs(y - py)) + wa * std::abs(px - py);
    };
    double via = axis(ca.row, cb.row, box_.r0, box_.r1, ws, weights_.space_ano) +
                 axis(ca.col, cb.col, box_.c0, box_.c1, ws, weights_.space_ano) +
                 axis(a.layer, b.layer, box_.t0, box_.t1, wt, weights_.time_ano);
    return std::min(direct, via);
}

double CandidateDistance::to_side(const Node &a, BoundarySide side) const {
    Coord c = graph_->coord(a.ancilla);
    const double ws = weights_.space_normal;
    const double wa = weights_.space_ano;
    const int cols = graph_->grid_cols();
    double direct = side == BoundarySide::kLow ? ws * (c.col + 1) : ws * (cols - c.col);
    if (!active_) {
        return direct;
    }
    int pr = std::clamp(c.row, box_.r0, box_.r1);
    int pc = std::clamp(c.col, box_.c0, box_.c1);
    int pt = std::clamp(a.layer, box_.t0, box_.t1);
    double approach = ws * (std::abs(c.row - pr) + std::abs(c.col - pc)) + weights_.time_normal * std::abs(a.layer - pt);
    double cross = side == BoundarySide::kLow ? wa * (pc - box_.c0) + ws * (box_.c0 + 1)
                                              : wa * (box_.c1 - pc) + ws * (cols - box_.c1);
    return std::min(direct, approach + cross);
}

BoundaryChoice CandidateDistance::boundary(const Node &a) const {
    return pick_side(to_side(a, BoundarySide::kLow), to_side(a, BoundarySide::kHigh));
}

RegionDistance::RegionDistance(const DecodingGraph &graph, WeightModel weights, int num_layers)
    : graph_(&graph), weights_(std::move(weights)), layers_(num_layers), stacked_(graph.num_vertices() * num_layers) {
    if (weights_.region && !weights_.anomalous_cheaper()) {
        throw std::invalid_argument("region distance needs anomalous weights below normal weights");
    }
    portal_of_.assign(stacked_ + 2, -1);
    auto add = [&](int id) {
        if (portal_of_[id] < 0) {
            portal_of_[id] = static_cast<int>(portals_.size());
            portals_.push_back(id);
        }
    };
    if (weights_.region) {
        const auto &r = *weights_.region;
        const int nv = graph.num_vertices();
        int t_lo = std::max(0, r.first_layer);
        int t_hi = std::min(layers_ - 1, r.last_layer);
        for (int t = t_lo; t <= t_hi; ++t) {
            for (int f = 0; f < graph.num_faults(); ++f) {
                if (!r.space_anomalous(f, t)) {
                    continue;
                }
                const auto &e = graph.fault(f);
                add(t * nv + e.u);
                add(e.v >= 0 ? t * nv + e.v : stacked_ + (e.v == kBoundaryLow ? 0 : 1));
            }
            for (int v = 0; v < nv; ++v) {
                if (t + 1 < layers_ && r.time_anomalous(v, t)) {
                    add(t * nv + v);
                    add((t + 1) * nv + v);
                }
            }
        }
    }
    const int np = static_cast<int>(portals_.size());
    for (int side = 0; side < 2; ++side) {
        sink_portal_[side] = portal_of_[stacked_ + side];
    }
    table_.assign(static_cast<std::size_t>(np) * np, kInf);
    DijkstraDistance dijkstra(graph, weights_, layers_);
    const int nv = graph.num_vertices();
    for (int pi = 0; pi < np; ++pi) {
        int id = portals_[pi];
        if (id >= stacked_) {
            continue;
        }
        auto dist = dijkstra.single_source(Node{id % nv, id / nv});
        for (int qi = 0; qi < np; ++qi) {
            table_[static_cast<std::size_t>(pi) * np + qi] = dist[portals_[qi]];
        }
        int t = id / nv;
        int v = id % nv;
        bool border = false;
        for (const auto &inc : graph.incident(v)) {
            if (inc.other >= 0 && portal_of_[t * nv + inc.other] < 0) {
                border = true;
            }
        }
        if ((t + 1 < layers_ && portal_of_[id + nv] < 0) || (t > 0 && portal_of_[id - nv] < 0)) {
            border = true;
        }
        if (border) {
            entries_.push_back(pi);
        }
    }
}

double RegionDistance::uniform(int x, int y) const {
    const int nv = graph_->num_vertices();
    return weights_.space_normal * graph_->hops(x % nv, y % nv) + weights_.time_normal * std::abs(x / nv - y / nv);
}

double RegionDistance::uniform_sink(int x, int side) const {
    return weights_.space_normal * graph_->boundary_hops(x % graph_->num_vertices(), static_cast<BoundarySide>(side));
}

std::vector<double> RegionDistance::entry_profile(int x) const {
    const int np = static_cast<int>(portals_.size());
    if (portal_of_[x] >= 0) {
        const double *row = table_.data() + static_cast<std::size_t>(portal_of_[x]) * np;
        return std::vector<double>(row, row + np);
    }
    std::vector<double> prof(np, kInf);
    for (int e : entries_) {
        double base = uniform(x, portals_[e]);
        const double *row = table_.data() + static_cast<std::size_t>(e) * np;
        for (int q = 0; q < np; ++q) {
            prof[q] = std::min(prof[q], base + row[q]);
        }
    }
    return prof;
}

double RegionDistance::pair_with_profile(const std::vector<double> &prof_a, int a_id, int b_id) const {
    if (portal_of_[b_id] >= 0) {
        return prof_a[portal_of_[b_id]];
    }
    double best = uniform(a_id, b_id);
    for (int q = 0; q < static_cast<int>(portals_.size()); ++q) {
        if (portals_[q] < stacked_) {
            best = std::min(best, prof_a[q] + uniform(portals_[q], b_id));
        }
    }
    return best;
}

BoundaryChoice RegionDistance::boundary_with_profile(const std::vector<double> &prof_a, int a_id) const {
    double w[2];
    for (int side = 0; side < 2; ++side) {
        double best = uniform_sink(a_id, side);
        for (int q = 0; q < static_cast<int>(portals_.size()); ++q) {
            if (portals_[q] < stacked_) {
                best = std::min(best, prof_a[q] + uniform_sink(portals_[q], side));
            }
        }
        if (sink_portal_[side] >= 0) {
            best = std::min(best, prof_a[sink_portal_[side]]);
        }
        w[side] = best;
    }
    return pick_side(w[0], w[1]);
}

double RegionDistance::pair(const Node &a, const Node &b) const {
    const int nv = graph_->num_vertices();
    int a_id = a.layer * nv + a.ancilla;
    int b_id = b.layer * nv + b.ancilla;
    if (portals_.empty()) {
        return uniform(a_id, b_id);
    }
    return pair_with_profile(entry_profile(a_id), a_id, b_id);
}

BoundaryChoice RegionDistance::boundary(const Node &a) const {
    const int nv = graph_->num_vertices();
    int a_id = a.layer * nv + a.ancilla;
    if (portals_.empty()) {
        return pick_side(uniform_sink(a_id, 0), uniform_sink(a_id, 1));
    }
    return boundary_with_profile(entry_profile(a_id), a_id);
}

MatchingProblem RegionDistance::problem(std::span<const Node> nodes) const {
    if (portals_.empty()) {
        return DistanceModel::problem(nodes);
    }
    MatchingProblem mp;
    mp.nodes.assign(nodes.begin(), nodes.end());
    std::sort(mp.nodes.begin(), mp.nodes.end(), node_before);
    const std::size_t n = mp.nodes.size();
    const int nv = graph_->num_vertices();
    std::vector<int> ids(n);
    std::vector<std::vector<double>> prof(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = mp.nodes[i].layer * nv + mp.nodes[i].ancilla;
        prof[i] = entry_profile(ids[i]);
    }
    mp.pair.assign(n * n, 0.0);
    mp.boundary.resize(n);
    mp.side.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        BoundaryChoice b = boundary_with_profile(prof[i], ids[i]);
        mp.boundary[i] = b.weight;
        mp.side[i] = b.side;
        for (std::size_t j = i + 1; j < n; ++j) {
            // Query from the portal side when possible: that is a table lookup.
            double w = portal_of_[ids[j]] >= 0 ? prof[i][portal_of_[ids[j]]]
                       : portal_of_[ids[i]] >= 0 ? prof[j][portal_of_[ids[i]]]
                                                 : pair_with_profile(prof[i], ids[i], ids[j]);
            mp.pair[i * n + j] = w;
            mp.pair[j * n + i] = w;
        }
    }
    return mp;
}

double uniform_distance(const DecodingGraph &graph, double w_space, double w_time, const Node &a, const Node &b) {
    return UniformDistance(graph, w_space, w_time).pair(a, b);
}

BoundaryChoice uniform_boundary_distance(const DecodingGraph &graph, double w_space, double w_time, const Node &a) {
    return UniformDistance(graph, w_space, w_time).boundary(a);
}

PathResult dijkstra_distance(const DecodingGraph &graph, const WeightModel &weights, int num_layers, const Node &a,
                             const Node &b) {
    return DijkstraDistance(graph, weights, num_layers).path(a, b);
}

PathResult dijkstra_boundary_distance(const DecodingGraph &graph, const WeightModel &weights, int num_layers,
                                      const Node &a, BoundarySide side) {
    return DijkstraDistance(graph, weights, num_layers).path_to_boundary(a, side);
}

double candidate_distance(const DecodingGraph &graph, const WeightModel &weights, int num_layers, const Node &a,
                          const Node &b) {
    return CandidateDistance(graph, weights, num_layers).pair(a, b);
}

}  // namespace q3de
