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

#ifndef Q3DE_DECODER_H
#define Q3DE_DECODER_H

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "q3de/distance.h"
#include "q3de/matching.h"
#include "q3de/surface_code.h"

namespace q3de {

enum class DecodeMode { kUniform, kAware };
enum class MatcherKind { kExact, kGreedy };

struct DecoderConfig {
    DecodeMode mode = DecodeMode::kUniform;
    MatcherKind matcher = MatcherKind::kExact;
    double p = 1e-3;
    double p_meas = 1e-3;
    /// Required in aware mode.
    std::optional<AnomalousRegion> region;
};

/// Parses "uniform_exact", "uniform_greedy", "aware_exact", "aware_greedy".
DecoderConfig decoder_config_from_name(const std::string &name, double p, double p_meas,
                                       std::optional<AnomalousRegion> region);

/// Correction for one species: the matching plus the space-time paths it
/// implies, folded into data flips per layer and measurement flips.
struct SpeciesCorrection {
    MatchingProblem problem;
    MatchingResult matching;
    std::vector<std::vector<int>> data_flips_per_layer;
    std::vector<DetectorNode> meas_flips;
    /// Net data correction after all layers.
    std::vector<std::uint8_t> data_flips;
};

struct Correction {
    SpeciesCorrection z;
    SpeciesCorrection x;
    const SpeciesCorrection &of(Species s) const { return s == Species::kZ ? z : x; }
};

/// Decoder for one species with a fixed configuration and lattice depth.
/// The distance model is built once and reused across shots.
class SpeciesDecoder {
   public:
    SpeciesDecoder(const CodeGeometry &geometry, Species species, int num_layers, const DecoderConfig &config);

    MatchingProblem problem(std::span<const Node> active) const { return metric_->problem(active); }
    MatchingResult match(const MatchingProblem &problem) const;
    /// Logical flip implied by matching these nodes: matches to the low
    /// boundary cross the dual logical support once each, pairs never do.
    bool logical_flip(std::span<const Node> active) const;
    SpeciesCorrection correct(const DetectorLattice &lattice) const;

    const DecodingGraph &graph() const { return graph_; }
    const DistanceModel &metric() const { return *metric_; }
    const DijkstraDistance &paths() const { return *paths_; }

   private:
    const CodeGeometry *geometry_;
    Species species_;
    int layers_;
    DecoderConfig config_;
    DecodingGraph graph_;
    std::unique_ptr<DistanceModel> metric_;
    std::unique_ptr<DijkstraDistance> paths_;
};

/// Weight model a decoder of this configuration uses on the given graph.
WeightModel weights_for(const CodeGeometry &geometry, Species species, int num_layers, const DecoderConfig &config);

/// Decodes both species independently. Throws std::runtime_error if a
/// correction fails to reproduce the observed detectors.
Correction decode_and_correct(const CodeGeometry &geometry, const DetectorPair &lattices, const DecoderConfig &config);

/// Fills data_flips_per_layer, meas_flips and data_flips from matched paths.
void materialize_paths(const DijkstraDistance &paths, const CodeGeometry &geometry, int num_layers,
                       SpeciesCorrection &out);

}  // namespace q3de

#endif  // Q3DE_DECODER_H
