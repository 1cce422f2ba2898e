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

#include "q3de/surface_code.h"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace q3de {

namespace {

bool is_z_plaquette(int a, int b) { return ((a + b) % 2 + 2) % 2 == 0; }

void validate_rate(double r, const char *what) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
    if (1.5 * r > 1.0 + 1e-12) {
        throw std::invalid_argument(std::string(what) + " exceeds 2/3: three Paulis at rate/2 overflow");
    }
}

bool overlaps_in_time(const AnomalousRegion &a, const AnomalousRegion &b) {
    long a_end = a.duration_cycles < 0 ? std::numeric_limits<long>::max() : long{a.start_cycle} + a.duration_cycles;
    long b_end = b.duration_cycles < 0 ? std::numeric_limits<long>::max() : long{b.start_cycle} + b.duration_cycles;
    return a.start_cycle < b_end && b.start_cycle < a_end;
}

bool overlaps_in_space(const AnomalousRegion &a, const AnomalousRegion &b) {
    return a.row_begin() < b.row_end() && b.row_begin() < a.row_end() && a.col_begin() < b.col_end() &&
           b.col_begin() < a.col_end();
}

}  // namespace

CodeGeometry CodeGeometry::build(int d) {
    if (d < 2) {
        throw std::invalid_argument("code distance must be at least 2");
    }
    CodeGeometry g;
    g.d_ = d;
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            g.data_sites_.push_back({r, c});
        }
    }
    auto add = [&](Species s, int a, int b) {
        Ancilla anc;
        anc.plaquette = {a, b};
        for (int dr = 0; dr <= 1; ++dr) {
            for (int dc = 0; dc <= 1; ++dc) {
                int r = a + dr;
                int c = b + dc;
                if (r >= 0 && r < d && c >= 0 && c < d) {
                    anc.data.push_back(r * d + c);
                }
            }
        }
        g.ancillas_[species_index(s)].push_back(std::move(anc));
    };
    // Row-major plaquette order keeps ancilla indices sorted by (row, col).
    for (int a = -1; a < d; ++a) {
        for (int b = -1; b < d; ++b) {
            bool top_bottom = (a == -1 || a == d - 1);
            bool left_right = (b == -1 || b == d - 1);
            if (top_bottom && left_right) {
                continue;
            }
            if (is_z_plaquette(a, b)) {
                if (!left_right) {
                    add(Species::kZ, a, b);
                }
            } else if (!top_bottom) {
                add(Species::kX, a, b);
            }
        }
    }
    for (Species s : {Species::kZ, Species::kX}) {
        int si = species_index(s);
        std::vector<std::vector<int>> touch(d * d);
        const auto &anc = g.ancillas_[si];
        for (int i = 0; i < static_cast<int>(anc.size()); ++i) {
            for (int q : anc[i].data) {
                touch[q].push_back(i);
            }
        }
        g.neighbor_offsets_[si].assign(1, 0);
        g.boundary_side_[si].assign(d * d, BoundarySide::kLow);
        for (int q = 0; q < d * d; ++q) {
            if (touch[q].empty() || touch[q].size() > 2) {
                throw std::logic_error("inconsistent surface code layout");
            }
            for (int i : touch[q]) {
                g.neighbor_list_[si].push_back(i);
            }
            g.neighbor_offsets_[si].push_back(static_cast<int>(g.neighbor_list_[si].size()));
            if (touch[q].size() == 1) {
                int along = s == Species::kZ ? q % d : q / d;
                g.boundary_side_[si][q] = along == 0 ? BoundarySide::kLow : BoundarySide::kHigh;
            }
        }
    }
    for (int k = 0; k < d; ++k) {
        g.logical_x_.push_back(k);
        g.logical_z_.push_back(k * d);
    }
    return g;
}

std::span<const int> CodeGeometry::data_neighbors(Species s, int q) const {
    int si = species_index(s);
    const auto &off = neighbor_offsets_[si];
    return {neighbor_list_[si].data() + off[q], static_cast<std::size_t>(off[q + 1] - off[q])};
}

BoundarySide CodeGeometry::boundary_side(Species s, int q) const { return boundary_side_[species_index(s)][q]; }

void NoiseModel::validate() const {
    validate_rate(p, "p");
    if (!(p_meas >= 0.0 && p_meas <= 1.0)) {
        throw std::invalid_argument("p_meas must lie in [0, 1]");
    }
    for (const auto &r : regions) {
        if (r.size < 1) {
            throw std::invalid_argument("anomaly size must be at least 1");
        }
        validate_rate(r.p_ano, "p_ano");
        if (r.meas_rate() > 1.0) {
            throw std::invalid_argument("p_meas_ano must lie in [0, 1]");
        }
    }
    for (std::size_t i = 0; i < regions.size(); ++i) {
        for (std::size_t j = i + 1; j < regions.size(); ++j) {
            if (overlaps_in_time(regions[i], regions[j]) && overlaps_in_space(regions[i], regions[j])) {
                throw std::invalid_argument("simultaneous anomalous regions overlap");
            }
        }
    }
}

double NoiseModel::data_rate(Coord q, int cycle) const {
    for (const auto &r : regions) {
        if (r.active_at(cycle) && r.covers_data(q)) {
            return r.p_ano;
        }
    }
    return p;
}

double NoiseModel::meas_rate(Coord plaquette, int cycle) const {
    for (const auto &r : regions) {
        if (r.active_at(cycle) && r.covers_ancilla(plaquette)) {
            return r.meas_rate();
        }
    }
    return p_meas;
}

CycleErrors sample_cycle_errors(const CodeGeometry &geometry, const NoiseModel &noise, int cycle, Rng &rng) {
    CycleErrors out;
    const auto &sites = geometry.data_sites();
    out.data.assign(sites.size(), Pauli::I);
    for (std::size_t q = 0; q < sites.size(); ++q) {
        double r = noise.data_rate(sites[q], cycle);
        if (r <= 0.0) {
            continue;
        }
        double u = rng.uniform();
        double half = 0.5 * r;
        if (u < half) {
            out.data[q] = Pauli::X;
        } else if (u < 2.0 * half) {
            out.data[q] = Pauli::Y;
        } else if (u < 3.0 * half) {
            out.data[q] = Pauli::Z;
        }
    }
    for (Species s : {Species::kZ, Species::kX}) {
        const auto &anc = geometry.ancillas(s);
        auto &flip = out.meas_flip[species_index(s)];
        flip.assign(anc.size(), 0);
        for (std::size_t i = 0; i < anc.size(); ++i) {
            flip[i] = rng.bernoulli(noise.meas_rate(anc[i].plaquette, cycle)) ? 1 : 0;
        }
    }
    return out;
}

ErrorHistory sample_history(const CodeGeometry &geometry, const NoiseModel &noise, int cycles, Rng &rng) {
    noise.validate();
    ErrorHistory h;
    h.reserve(cycles);
    for (int t = 0; t < cycles; ++t) {
        h.push_back(sample_cycle_errors(geometry, noise, t, rng));
    }
    return h;
}

std::vector<DetectorNode> DetectorLattice::active_nodes() const {
    std::vector<DetectorNode> out;
    for (int t = 0; t < num_layers_; ++t) {
        for (int i = 0; i < num_ancillas_; ++i) {
            if (bits_[index(i, t)] != 0) {
                out.push_back({i, t});
            }
        }
    }
    return out;
}

DetectorPair extract_detectors(const CodeGeometry &geometry, const ErrorHistory &history, SyndromeRecord *record) {
    int cycles = static_cast<int>(history.size());
    int layers = cycles + 1;
    DetectorPair out{DetectorLattice(Species::kZ, geometry.num_ancillas(Species::kZ), layers),
                     DetectorLattice(Species::kX, geometry.num_ancillas(Species::kX), layers)};
    for (Species s : {Species::kZ, Species::kX}) {
        int si = species_index(s);
        const auto &anc = geometry.ancillas(s);
        std::vector<std::uint8_t> acc(geometry.num_data(), 0);
        std::vector<std::uint8_t> prev(anc.size(), 0);
        DetectorLattice &lat = s == Species::kZ ? out.z : out.x;
        if (record != nullptr) {
            record->measured[si].assign(layers, {});
        }
        for (int t = 0; t < layers; ++t) {
            if (t < cycles) {
                const auto &data = history[t].data;
                for (std::size_t q = 0; q < data.size(); ++q) {
                    acc[q] ^= flips(s, data[q]) ? 1 : 0;
                }
            }
            std::vector<std::uint8_t> meas(anc.size(), 0);
            for (std::size_t i = 0; i < anc.size(); ++i) {
                std::uint8_t bit = 0;
                for (int q : anc[i].data) {
                    bit ^= acc[q];
                }
                if (t < cycles) {
                    bit ^= history[t].meas_flip[si][i];
                }
                meas[i] = bit;
                lat.set(static_cast<int>(i), t, bit ^ prev[i]);
            }
            prev = meas;
            if (record != nullptr) {
                record->measured[si][t] = std::move(meas);
            }
        }
    }
    return out;
}

DetectorLattice detectors_of(const CodeGeometry &geometry, Species species, int num_layers,
                             std::span<const std::vector<int>> data_flips_per_layer,
                             std::span<const DetectorNode> meas_flips) {
    DetectorLattice lat(species, geometry.num_ancillas(species), num_layers);
    for (int t = 0; t < static_cast<int>(data_flips_per_layer.size()) && t < num_layers; ++t) {
        for (int q : data_flips_per_layer[t]) {
            for (int i : geometry.data_neighbors(species, q)) {
                lat.toggle(i, t);
            }
        }
    }
    for (const auto &m : meas_flips) {
        lat.toggle(m.ancilla, m.layer);
        if (m.layer + 1 < num_layers) {
            lat.toggle(m.ancilla, m.layer + 1);
        }
    }
    return lat;
}

std::vector<std::uint8_t> accumulated_flips(const CodeGeometry &geometry, const ErrorHistory &history, Species s) {
    std::vector<std::uint8_t> acc(geometry.num_data(), 0);
    for (const auto &cycle : history) {
        for (std::size_t q = 0; q < cycle.data.size(); ++q) {
            acc[q] ^= flips(s, cycle.data[q]) ? 1 : 0;
        }
    }
    return acc;
}

std::vector<std::uint8_t> static_syndrome(const CodeGeometry &geometry, Species s,
                                          std::span<const std::uint8_t> flips) {
    const auto &anc = geometry.ancillas(s);
    std::vector<std::uint8_t> syn(anc.size(), 0);
    for (std::size_t i = 0; i < anc.size(); ++i) {
        for (int q : anc[i].data) {
            syn[i] ^= flips[q];
        }
    }
    return syn;
}

bool logical_failure_of_residual(const CodeGeometry &geometry, std::span<const std::uint8_t> accumulated,
                                 std::span<const std::uint8_t> correction, Species s) {
    if (accumulated.size() != correction.size() || accumulated.size() != static_cast<std::size_t>(geometry.num_data())) {
        throw std::invalid_argument("correction size does not match the code");
    }
    std::vector<std::uint8_t> residual(accumulated.size());
    for (std::size_t q = 0; q < residual.size(); ++q) {
        residual[q] = accumulated[q] ^ correction[q];
    }
    for (std::uint8_t bit : static_syndrome(geometry, s, residual)) {
        if (bit != 0) {
            throw std::invalid_argument("residual error has a nonzero syndrome");
        }
    }
    std::uint8_t parity = 0;
    for (int q : geometry.dual_logical_support(s)) {
        parity ^= residual[q];
    }
    return parity != 0;
}

bool logical_failure(const CodeGeometry &geometry, const ErrorHistory &history,
                     std::span<const std::uint8_t> correction, Species s) {
    auto acc = accumulated_flips(geometry, history, s);
    return logical_failure_of_residual(geometry, acc, correction, s);
}

void write_detector_csv(std::ostream &out, const DetectorLattice &lattice) {
    out << "ancilla,layer,bit\n";
    for (int t = 0; t < lattice.num_layers(); ++t) {
        for (int i = 0; i < lattice.num_ancillas(); ++i) {
            out << i << ',' << t << ',' << static_cast<int>(lattice.get(i, t)) << '\n';
        }
    }
}

SpeciesSampler::SpeciesSampler(const CodeGeometry &geometry, const NoiseModel &noise, Species species,
                               int noisy_cycles)
    : geometry_(&geometry),
      species_(species),
      cycles_(noisy_cycles),
      data_rate_(noise.p),
      meas_rate_(noise.p_meas),
      data_in_region_(geometry.num_data(), 0),
      anc_in_region_(geometry.num_ancillas(species), 0),
      on_logical_(geometry.num_data(), 0),
      scratch_(species, geometry.num_ancillas(species), noisy_cycles + 1) {
    noise.validate();
    auto clamp_cycle = [&](const AnomalousRegion &r, int &begin, int &end) {
        begin = std::clamp(r.start_cycle, 0, cycles_);
        end = r.duration_cycles < 0 ? cycles_ : std::clamp(r.start_cycle + r.duration_cycles, 0, cycles_);
    };
    for (const auto &r : noise.regions) {
        int begin = 0;
        int end = 0;
        clamp_cycle(r, begin, end);
        if (begin >= end) {
            continue;
        }
        for (int q = 0; q < geometry.num_data(); ++q) {
            if (r.covers_data(geometry.data_sites()[q])) {
                data_in_region_[q] = 1;
                region_data_.push_back({q, begin, end, r.p_ano});
            }
        }
        const auto &anc = geometry.ancillas(species);
        for (int i = 0; i < static_cast<int>(anc.size()); ++i) {
            if (r.covers_ancilla(anc[i].plaquette)) {
                anc_in_region_[i] = 1;
                region_anc_.push_back({i, begin, end, r.meas_rate()});
            }
        }
    }
    for (int q : geometry.dual_logical_support(species)) {
        on_logical_[q] = 1;
    }
}

void SpeciesSampler::flip_data(int q, int cycle, Shot &shot) {
    for (int i : geometry_->data_neighbors(species_, q)) {
        scratch_.toggle(i, cycle);
    }
    if (on_logical_[q] != 0) {
        shot.logical_parity = !shot.logical_parity;
    }
}

void SpeciesSampler::flip_meas(int ancilla, int cycle) {
    scratch_.toggle(ancilla, cycle);
    scratch_.toggle(ancilla, cycle + 1);
}

void SpeciesSampler::sample(Rng &rng, Shot &shot) {
    shot.active.clear();
    shot.logical_parity = false;
    const int n_data = geometry_->num_data();
    const int n_anc = scratch_.num_ancillas();

    auto in_region_window = [](const std::vector<RegionSite> &sites, int index, int cycle) {
        for (const auto &s : sites) {
            if (s.index == index && cycle >= s.cycle_begin && cycle < s.cycle_end) {
                return true;
            }
        }
        return false;
    };

    std::uint64_t total = static_cast<std::uint64_t>(n_data) * cycles_;
    for (std::uint64_t pos = rng.geometric_skip(data_rate_); pos < total; pos += 1 + rng.geometric_skip(data_rate_)) {
        int cycle = static_cast<int>(pos / n_data);
        int q = static_cast<int>(pos % n_data);
        if (data_in_region_[q] != 0 && in_region_window(region_data_, q, cycle)) {
            continue;
        }
        flip_data(q, cycle, shot);
    }
    total = static_cast<std::uint64_t>(n_anc) * cycles_;
    for (std::uint64_t pos = rng.geometric_skip(meas_rate_); pos < total; pos += 1 + rng.geometric_skip(meas_rate_)) {
        int cycle = static_cast<int>(pos / n_anc);
        int i = static_cast<int>(pos % n_anc);
        if (anc_in_region_[i] != 0 && in_region_window(region_anc_, i, cycle)) {
            continue;
        }
        flip_meas(i, cycle);
    }
    for (const auto &s : region_data_) {
        for (int t = s.cycle_begin; t < s.cycle_end; ++t) {
            if (rng.bernoulli(s.rate)) {
                flip_data(s.index, t, shot);
            }
        }
    }
    for (const auto &s : region_anc_) {
        for (int t = s.cycle_begin; t < s.cycle_end; ++t) {
            if (rng.bernoulli(s.rate)) {
                flip_meas(s.index, t);
            }
        }
    }
    for (int t = 0; t < scratch_.num_layers(); ++t) {
        for (int i = 0; i < n_anc; ++i) {
            if (scratch_.get(i, t) != 0) {
                shot.active.push_back({i, t});
                scratch_.set(i, t, 0);
            }
        }
    }
}

}  // namespace q3de
