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

#include "q3de/decoder.h"

#include <stdexcept>

namespace q3de {

DecoderConfig decoder_config_from_name(const std::string &name, double p, double p_meas,
                                       std::optional<AnomalousRegion> region) {
    DecoderConfig c;
    c.p = p;
    c.p_meas = p_meas;
    c.region = std::move(region);
    if (name == "uniform_exact") {
        c.mode = DecodeMode::kUniform;
        c.matcher = MatcherKind::kExact;
    } else if (name == "uniform_greedy") {
        c.mode = DecodeMode::kUniform;
        c.matcher = MatcherKind::kGreedy;
    } else if (name == "aware_exact") {
        c.mode = DecodeMode::kAware;
        c.matcher = MatcherKind::kExact;
    } else if (name == "aware_greedy") {
        c.mode = DecodeMode::kAware;
        c.matcher = MatcherKind::kGreedy;
    } else {
        throw std::invalid_argument("unknown decoder mode '" + name + "'");
    }
    return c;
}

WeightModel weights_for(const CodeGeometry &geometry, Species species, int num_layers, const DecoderConfig &config) {
    if (config.mode == DecodeMode::kUniform) {
        return WeightModel::uniform(config.p, config.p_meas);
    }
    if (!config.region) {
        throw std::invalid_argument("anomaly-aware decoding needs a region");
    }
    const auto &r = *config.region;
    return WeightModel::anomalous(config.p, config.p_meas, r.p_ano, r.meas_rate(),
                                  SpacetimeRegion::from_anomaly(geometry, species, r, num_layers));
}

SpeciesDecoder::SpeciesDecoder(const CodeGeometry &geometry, Species species, int num_layers,
                               const DecoderConfig &config)
    : geometry_(&geometry),
      species_(species),
      layers_(num_layers),
      config_(config),
      graph_(DecodingGraph::from_code(geometry, species)) {
    WeightModel w = weights_for(geometry, species, num_layers, config);
    if (config.mode == DecodeMode::kUniform) {
        metric_ = std::make_unique<UniformDistance>(graph_, w.space_normal, w.time_normal);
    } else {
        metric_ = std::make_unique<RegionDistance>(graph_, w, num_layers);
    }
    paths_ = std::make_unique<DijkstraDistance>(graph_, std::move(w), num_layers);
}

MatchingResult SpeciesDecoder::match(const MatchingProblem &problem) const {
    if (config_.matcher == MatcherKind::kExact) {
        return exact_mwpm(problem);
    }
    return greedy_decode(problem, geometry_->distance(), metric_->normal_unit());
}

bool SpeciesDecoder::logical_flip(std::span<const Node> active) const {
    if (active.empty()) {
        return false;
    }
    return boundary_parity(match(problem(active)), BoundarySide::kLow);
}

void materialize_paths(const DijkstraDistance &paths, const CodeGeometry &geometry, int num_layers,
                       SpeciesCorrection &out) {
    const int nv = paths.graph().num_vertices();
    const int nd = geometry.num_data();
    std::vector<std::uint8_t> data(static_cast<std::size_t>(num_layers) * nd, 0);
    std::vector<std::uint8_t> meas(static_cast<std::size_t>(num_layers) * nv, 0);
    auto apply = [&](const PathResult &path) {
        for (const auto &step : path.steps) {
            if (step.time_like) {
                meas[static_cast<std::size_t>(step.layer) * nv + step.index] ^= 1U;
            } else {
                data[static_cast<std::size_t>(step.layer) * nd + step.index] ^= 1U;
            }
        }
    };
    const auto &nodes = out.problem.nodes;
    for (const auto &[a, b] : out.matching.pairs) {
        apply(paths.path(nodes[a], nodes[b]));
    }
    for (const auto &[a, side] : out.matching.boundary_matches) {
        apply(paths.path_to_boundary(nodes[a], side));
    }
    out.data_flips_per_layer.assign(num_layers, {});
    out.meas_flips.clear();
    out.data_flips.assign(nd, 0);
    for (int t = 0; t < num_layers; ++t) {
        for (int q = 0; q < nd; ++q) {
            if (data[static_cast<std::size_t>(t) * nd + q] != 0) {
                out.data_flips_per_layer[t].push_back(q);
                out.data_flips[q] ^= 1U;
            }
        }
        for (int v = 0; v < nv; ++v) {
            if (meas[static_cast<std::size_t>(t) * nv + v] != 0) {
                out.meas_flips.push_back({v, t});
            }
        }
    }
}

SpeciesCorrection SpeciesDecoder::correct(const DetectorLattice &lattice) const {
    SpeciesCorrection out;
    auto active = lattice.active_nodes();
    out.problem = metric_->problem(active);
    out.matching = match(out.problem);
    materialize_paths(*paths_, *geometry_, layers_, out);
    return out;
}

Correction decode_and_correct(const CodeGeometry &geometry, const DetectorPair &lattices, const DecoderConfig &config) {
    Correction out;
    for (Species s : {Species::kZ, Species::kX}) {
        const DetectorLattice &lat = lattices.of(s);
        SpeciesDecoder dec(geometry, s, lat.num_layers(), config);
        SpeciesCorrection c = dec.correct(lat);
        DetectorLattice check = detectors_of(geometry, s, lat.num_layers(), c.data_flips_per_layer, c.meas_flips);
        if (!(check == lat)) {
            throw std::runtime_error("decoder correction does not reproduce the observed detectors");
        }
        (s == Species::kZ ? out.z : out.x) = std::move(c);
    }
    return out;
}

}  // namespace q3de
