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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "q3de/surface_code.h"

namespace q3de {
namespace {

ErrorHistory quiet_history(const CodeGeometry &geo, int cycles) {
    ErrorHistory h(cycles);
    for (auto &c : h) {
        c.data.assign(geo.num_data(), Pauli::I);
        c.meas_flip[0].assign(geo.num_ancillas(Species::kZ), 0);
        c.meas_flip[1].assign(geo.num_ancillas(Species::kX), 0);
    }
    return h;
}

int bulk_site(const CodeGeometry &geo) {
    const int d = geo.distance();
    return geo.data_index({d / 2, d / 2});
}

TEST(CodeGeometry, CountsForOddDistances) {
    for (int d : {3, 5, 7, 9, 21}) {
        const CodeGeometry geo = CodeGeometry::build(d);
        EXPECT_EQ(geo.num_data(), d * d);
        EXPECT_EQ(static_cast<int>(geo.data_sites().size()), d * d);
        EXPECT_EQ(geo.num_ancillas(Species::kZ), (d * d - 1) / 2);
        EXPECT_EQ(geo.num_ancillas(Species::kX), (d * d - 1) / 2);
    }
}

TEST(CodeGeometry, DistanceFive) {
    const CodeGeometry geo = CodeGeometry::build(5);
    EXPECT_EQ(geo.num_data(), 25);
    EXPECT_EQ(geo.num_ancillas(Species::kZ), 12);
    EXPECT_EQ(geo.num_ancillas(Species::kX), 12);
}

TEST(CodeGeometry, DistanceTwentyOne) {
    const CodeGeometry geo = CodeGeometry::build(21);
    EXPECT_EQ(geo.num_data(), 441);
    EXPECT_EQ(geo.num_ancillas(Species::kZ), 220);
    EXPECT_EQ(geo.num_ancillas(Species::kX), 220);
}

TEST(CodeGeometry, DistanceTwoHasThreeChecks) {
    const CodeGeometry geo = CodeGeometry::build(2);
    EXPECT_EQ(geo.num_data(), 4);
    EXPECT_EQ(geo.num_ancillas(Species::kZ) + geo.num_ancillas(Species::kX), 3);
    int weight_four = 0;
    for (Species s : {Species::kZ, Species::kX}) {
        for (const Ancilla &a : geo.ancillas(s)) {
            weight_four += a.data.size() == 4 ? 1 : 0;
        }
    }
    EXPECT_EQ(weight_four, 1);
}

TEST(CodeGeometry, AncillaWeightsAndDataDegrees) {
    for (int d : {3, 5, 9}) {
        const CodeGeometry geo = CodeGeometry::build(d);
        for (Species s : {Species::kZ, Species::kX}) {
            for (const Ancilla &a : geo.ancillas(s)) {
                EXPECT_TRUE(a.data.size() == 2 || a.data.size() == 4);
            }
        }
        for (int q = 0; q < geo.num_data(); ++q) {
            const Coord c = geo.data_sites()[q];
            if (c.row > 0 && c.row < d - 1 && c.col > 0 && c.col < d - 1) {
                EXPECT_EQ(geo.data_neighbors(Species::kZ, q).size(), 2U);
                EXPECT_EQ(geo.data_neighbors(Species::kX, q).size(), 2U);
            }
        }
    }
}

TEST(CodeGeometry, ChecksCommute) {
    const CodeGeometry geo = CodeGeometry::build(7);
    for (const Ancilla &z : geo.ancillas(Species::kZ)) {
        for (const Ancilla &x : geo.ancillas(Species::kX)) {
            int overlap = 0;
            for (int q : z.data) {
                overlap += std::count(x.data.begin(), x.data.end(), q);
            }
            EXPECT_EQ(overlap % 2, 0);
        }
    }
}

TEST(CodeGeometry, LogicalSupports) {
    for (int d : {3, 5, 11}) {
        const CodeGeometry geo = CodeGeometry::build(d);
        const auto &lx = geo.logical_x_support();
        const auto &lz = geo.logical_z_support();
        EXPECT_EQ(static_cast<int>(lx.size()), d);
        EXPECT_EQ(static_cast<int>(lz.size()), d);
        std::set<int> sx(lx.begin(), lx.end());
        int common = 0;
        for (int q : lz) {
            common += sx.count(q) ? 1 : 0;
        }
        EXPECT_EQ(common, 1);
        // Logical X commutes with every Z check.
        std::vector<std::uint8_t> flips(geo.num_data(), 0);
        for (int q : lx) {
            flips[q] = 1;
        }
        for (auto bit : static_syndrome(geo, Species::kZ, flips)) {
            EXPECT_EQ(bit, 0);
        }
    }
}

TEST(SampleCycleErrors, ZeroNoiseIsIdentity) {
    const CodeGeometry geo = CodeGeometry::build(5);
    Rng rng(1);
    const CycleErrors e = sample_cycle_errors(geo, NoiseModel::phenomenological(0.0), 0, rng);
    EXPECT_TRUE(std::all_of(e.data.begin(), e.data.end(), [](Pauli p) { return p == Pauli::I; }));
    for (const auto &f : e.meas_flip) {
        EXPECT_TRUE(std::all_of(f.begin(), f.end(), [](std::uint8_t b) { return b == 0; }));
    }
}

TEST(SampleCycleErrors, TwoThirdsAlwaysErrs) {
    const CodeGeometry geo = CodeGeometry::build(5);
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const CycleErrors e = sample_cycle_errors(geo, NoiseModel{2.0 / 3.0, 0.0, {}}, t, rng);
        EXPECT_TRUE(std::all_of(e.data.begin(), e.data.end(), [](Pauli p) { return p != Pauli::I; }));
    }
}

TEST(SampleCycleErrors, XMarginalFrequency) {
    const CodeGeometry geo = CodeGeometry::build(10);
    Rng rng(3);
    const double p = 1e-3;
    long hits = 0;
    long n = 0;
    for (int t = 0; t < 10000; ++t) {
        const CycleErrors e = sample_cycle_errors(geo, NoiseModel::phenomenological(p), t, rng);
        for (Pauli q : e.data) {
            hits += has_x(q) ? 1 : 0;
        }
        n += geo.num_data();
    }
    ASSERT_EQ(n, 1000000);
    const double sigma = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(hits) / n, p, 3 * sigma);
}

TEST(NoiseModel, RegionRates) {
    AnomalousRegion r;
    r.center = {4, 4};
    r.size = 4;
    r.p_ano = 0.5;
    r.start_cycle = 10;
    r.duration_cycles = 5;
    NoiseModel n{1e-3, 2e-3, {r}};
    EXPECT_EQ(n.data_rate({4, 4}, 12), 0.5);
    EXPECT_EQ(n.data_rate({4, 4}, 9), 1e-3);
    EXPECT_EQ(n.data_rate({4, 4}, 15), 1e-3);
    EXPECT_EQ(n.data_rate({0, 0}, 12), 1e-3);
    EXPECT_EQ(n.data_rate({2, 2}, 12), 0.5);
    EXPECT_EQ(n.data_rate({6, 6}, 12), 1e-3);
    EXPECT_EQ(n.meas_rate({3, 3}, 12), 0.5);
    EXPECT_EQ(n.meas_rate({5, 5}, 12), 2e-3);
}

TEST(NoiseModel, RejectsOverlappingRegions) {
    AnomalousRegion a;
    a.center = {4, 4};
    a.size = 4;
    AnomalousRegion b = a;
    b.center = {5, 5};
    EXPECT_THROW((NoiseModel{1e-3, 1e-3, {a, b}}.validate()), std::invalid_argument);
    b.start_cycle = 100;
    a.duration_cycles = 50;
    EXPECT_NO_THROW((NoiseModel{1e-3, 1e-3, {a, b}}.validate()));
    EXPECT_THROW((NoiseModel{0.9, 1e-3, {}}.validate()), std::invalid_argument);
}

TEST(ExtractDetectors, BulkDataErrorLightsTwoNodes) {
    const CodeGeometry geo = CodeGeometry::build(5);
    ErrorHistory h = quiet_history(geo, 5);
    const int q = bulk_site(geo);
    h[2].data[q] = Pauli::X;
    const DetectorPair lat = extract_detectors(geo, h);
    const auto nodes = lat.z.active_nodes();
    ASSERT_EQ(nodes.size(), 2U);
    const auto nb = geo.data_neighbors(Species::kZ, q);
    for (const DetectorNode &n : nodes) {
        EXPECT_EQ(n.layer, 2);
        EXPECT_NE(std::find(nb.begin(), nb.end(), n.ancilla), nb.end());
    }
    EXPECT_TRUE(lat.x.active_nodes().empty());
}

TEST(ExtractDetectors, MeasurementFlipIsTimeLikePair) {
    const CodeGeometry geo = CodeGeometry::build(5);
    ErrorHistory h = quiet_history(geo, 5);
    h[1].meas_flip[species_index(Species::kZ)][3] = 1;
    const DetectorPair lat = extract_detectors(geo, h);
    EXPECT_EQ(lat.z.active_nodes(), (std::vector<DetectorNode>{{3, 1}, {3, 2}}));
}

TEST(ExtractDetectors, YErrorLightsBothSpecies) {
    const CodeGeometry geo = CodeGeometry::build(5);
    ErrorHistory h = quiet_history(geo, 3);
    h[0].data[bulk_site(geo)] = Pauli::Y;
    const DetectorPair lat = extract_detectors(geo, h);
    EXPECT_EQ(lat.z.active_nodes().size(), 2U);
    EXPECT_EQ(lat.x.active_nodes().size(), 2U);
}

TEST(ExtractDetectors, DetectorsOfReproducesExtraction) {
    const CodeGeometry geo = CodeGeometry::build(5);
    Rng rng(4);
    const ErrorHistory h = sample_history(geo, NoiseModel::phenomenological(0.03), 6, rng);
    const DetectorPair lat = extract_detectors(geo, h);
    for (Species s : {Species::kZ, Species::kX}) {
        std::vector<std::vector<int>> data(7);
        std::vector<DetectorNode> meas;
        for (int t = 0; t < 6; ++t) {
            for (int q = 0; q < geo.num_data(); ++q) {
                if (flips(s, h[t].data[q])) {
                    data[t].push_back(q);
                }
            }
            for (int i = 0; i < geo.num_ancillas(s); ++i) {
                if (h[t].meas_flip[species_index(s)][i]) {
                    meas.push_back({i, t});
                }
            }
        }
        EXPECT_EQ(detectors_of(geo, s, 7, data, meas), lat.of(s));
    }
}

TEST(LogicalFailure, NoErrorsNoFailure) {
    const CodeGeometry geo = CodeGeometry::build(5);
    const ErrorHistory h = quiet_history(geo, 5);
    const std::vector<std::uint8_t> none(geo.num_data(), 0);
    EXPECT_FALSE(logical_failure(geo, h, none, Species::kZ));
    EXPECT_FALSE(logical_failure(geo, h, none, Species::kX));
}

TEST(LogicalFailure, UndetectedLogicalChain) {
    const CodeGeometry geo = CodeGeometry::build(5);
    ErrorHistory h = quiet_history(geo, 5);
    for (int q : geo.logical_x_support()) {
        h[1].data[q] = Pauli::X;
    }
    const DetectorPair lat = extract_detectors(geo, h);
    EXPECT_TRUE(lat.z.active_nodes().empty());
    EXPECT_TRUE(logical_failure(geo, h, std::vector<std::uint8_t>(geo.num_data(), 0), Species::kZ));
}

TEST(LogicalFailure, RejectsCorrectionWithWrongSyndrome) {
    const CodeGeometry geo = CodeGeometry::build(5);
    ErrorHistory h = quiet_history(geo, 2);
    h[0].data[bulk_site(geo)] = Pauli::X;
    EXPECT_THROW(logical_failure(geo, h, std::vector<std::uint8_t>(geo.num_data(), 0), Species::kZ),
                 std::invalid_argument);
}

TEST(SpeciesSampler, MatchesFullExtractionStatistics) {
    const CodeGeometry geo = CodeGeometry::build(5);
    const NoiseModel noise = NoiseModel::phenomenological(0.01);
    SpeciesSampler sampler(geo, noise, Species::kZ, 5);
    EXPECT_EQ(sampler.num_layers(), 6);
    Rng a(5);
    Rng b(6);
    SpeciesSampler::Shot shot;
    double sampled = 0.0;
    double extracted = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        sampler.sample(a, shot);
        sampled += static_cast<double>(shot.active.size());
        extracted += static_cast<double>(extract_detectors(geo, sample_history(geo, noise, 5, b)).z.active_nodes().size());
    }
    // Mean active-node counts agree to within a few percent.
    EXPECT_NEAR(sampled / n, extracted / n, 0.05 * extracted / n);
}

TEST(SpeciesSampler, QuietCodeHasNoEvents) {
    const CodeGeometry geo = CodeGeometry::build(7);
    SpeciesSampler sampler(geo, NoiseModel::phenomenological(0.0), Species::kX, 7);
    Rng rng(7);
    SpeciesSampler::Shot shot;
    sampler.sample(rng, shot);
    EXPECT_TRUE(shot.active.empty());
    EXPECT_FALSE(shot.logical_parity);
}

TEST(DetectorCsv, OneRowPerBit) {
    DetectorLattice lat(Species::kZ, 3, 2);
    lat.set(1, 1, 1);
    std::ostringstream out;
    write_detector_csv(out, lat);
    EXPECT_EQ(out.str(), "ancilla,layer,bit\n0,0,0\n1,0,0\n2,0,0\n0,1,0\n1,1,1\n2,1,0\n");
}

}  // namespace
}  // namespace q3de
