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

#ifndef Q3DE_SURFACE_CODE_H
#define Q3DE_SURFACE_CODE_H

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "q3de/rng.h"

namespace q3de {

struct Coord {
    int row = 0;
    int col = 0;
    auto operator<=>(const Coord &) const = default;
};

/// Bit 0 is the X component, bit 1 the Z component.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline bool has_x(Pauli p) { return (static_cast<std::uint8_t>(p) & 1U) != 0; }
inline bool has_z(Pauli p) { return (static_cast<std::uint8_t>(p) & 2U) != 0; }

/// Ancilla species. Z-type ancillas detect X (and Y) errors; X-type ancillas
/// detect Z (and Y) errors.
enum class Species : std::uint8_t { kZ = 0, kX = 1 };

inline int species_index(Species s) { return static_cast<int>(s); }

/// Which half of a data qubit's Pauli a species of ancilla is sensitive to.
inline bool flips(Species s, Pauli p) { return s == Species::kZ ? has_x(p) : has_z(p); }

enum class BoundarySide : std::uint8_t { kLow = 0, kHigh = 1 };

struct Ancilla {
    /// Plaquette index (a, b): the check covers data (a..a+1, b..b+1).
    Coord plaquette;
    std::vector<int> data;
};

/// Rotated surface code layout of distance d.
///
/// Data qubits sit on a d x d grid. Plaquettes with (a + b) even are Z checks,
/// odd are X checks; weight-2 Z checks sit on the top and bottom edges and
/// weight-2 X checks on the left and right edges. The Z-check matching graph
/// therefore terminates on the left/right columns and the X-check graph on the
/// top/bottom rows.
class CodeGeometry {
   public:
    static CodeGeometry build(int d);

    int distance() const { return d_; }
    int num_data() const { return d_ * d_; }
    const std::vector<Coord> &data_sites() const { return data_sites_; }
    int data_index(Coord c) const { return c.row * d_ + c.col; }

    const std::vector<Ancilla> &ancillas(Species s) const { return ancillas_[species_index(s)]; }
    int num_ancillas(Species s) const { return static_cast<int>(ancillas(s).size()); }

    /// Ancillas of species s touching data qubit q (one or two entries).
    std::span<const int> data_neighbors(Species s, int q) const;
    /// Only meaningful when data_neighbors(s, q).size() == 1.
    BoundarySide boundary_side(Species s, int q) const;

    /// Support of the logical X operator (a row) and logical Z operator (a column).
    const std::vector<int> &logical_x_support() const { return logical_x_; }
    const std::vector<int> &logical_z_support() const { return logical_z_; }

    /// Data support of the logical operator that anticommutes with errors
    /// detected by species s.
    const std::vector<int> &dual_logical_support(Species s) const {
        return s == Species::kZ ? logical_z_ : logical_x_;
    }

   private:
    int d_ = 0;
    std::vector<Coord> data_sites_;
    std::array<std::vector<Ancilla>, 2> ancillas_;
    std::array<std::vector<int>, 2> neighbor_offsets_;
    std::array<std::vector<int>, 2> neighbor_list_;
    std::array<std::vector<BoundarySide>, 2> boundary_side_;
    std::vector<int> logical_x_;
    std::vector<int> logical_z_;
};

/// d_ano x d_ano square of data sites with an elevated error rate.
struct AnomalousRegion {
    Coord center;
    int size = 1;
    double p_ano = 0.5;
    /// Measurement flip rate inside the region; negative means "same as p_ano".
    double p_meas_ano = -1.0;
    int start_cycle = 0;
    /// Negative means the region never expires.
    int duration_cycles = -1;

    int row_begin() const { return center.row - size / 2; }
    int col_begin() const { return center.col - size / 2; }
    int row_end() const { return row_begin() + size; }
    int col_end() const { return col_begin() + size; }

    double meas_rate() const { return p_meas_ano < 0.0 ? p_ano : p_meas_ano; }
    bool active_at(int cycle) const {
        return cycle >= start_cycle && (duration_cycles < 0 || cycle < start_cycle + duration_cycles);
    }
    bool covers_data(Coord q) const {
        return q.row >= row_begin() && q.row < row_end() && q.col >= col_begin() && q.col < col_end();
    }
    /// An ancilla is anomalous when all four corners of its plaquette are
    /// region sites, i.e. it sits strictly inside the square.
    bool covers_ancilla(Coord plaquette) const {
        return plaquette.row >= row_begin() && plaquette.row + 1 < row_end() && plaquette.col >= col_begin() &&
               plaquette.col + 1 < col_end();
    }
    /// Geometric center of the footprint in data-site coordinates.
    double center_row() const { return row_begin() + (size - 1) / 2.0; }
    double center_col() const { return col_begin() + (size - 1) / 2.0; }
};

struct NoiseModel {
    double p = 0.0;
    double p_meas = 0.0;
    std::vector<AnomalousRegion> regions;

    /// Uses p_meas = p (measurement flips as likely as data flips).
    static NoiseModel phenomenological(double p) { return NoiseModel{p, p, {}}; }
    /// Throws std::invalid_argument on out-of-range rates or overlapping
    /// simultaneous regions.
    void validate() const;
    /// Data error rate at site q in a given cycle.
    double data_rate(Coord q, int cycle) const;
    double meas_rate(Coord plaquette, int cycle) const;
};

/// Pauli errors of one cycle plus the outcome-flip bit of every ancilla.
struct CycleErrors {
    std::vector<Pauli> data;
    std::array<std::vector<std::uint8_t>, 2> meas_flip;
};

using ErrorHistory = std::vector<CycleErrors>;

/// Each data site gets X, Y or Z with probability rate/2 each; each ancilla
/// flips its outcome with its measurement rate.
CycleErrors sample_cycle_errors(const CodeGeometry &geometry, const NoiseModel &noise, int cycle, Rng &rng);

ErrorHistory sample_history(const CodeGeometry &geometry, const NoiseModel &noise, int cycles, Rng &rng);

/// Space x space x time lattice of detector bits for one species.
struct DetectorNode {
    int ancilla = 0;
    int layer = 0;
    auto operator<=>(const DetectorNode &) const = default;
};

class DetectorLattice {
   public:
    DetectorLattice() = default;
    DetectorLattice(Species species, int num_ancillas, int num_layers)
        : species_(species), num_ancillas_(num_ancillas), num_layers_(num_layers),
          bits_(static_cast<std::size_t>(num_ancillas) * num_layers, 0) {}

    Species species() const { return species_; }
    int num_ancillas() const { return num_ancillas_; }
    int num_layers() const { return num_layers_; }
    std::size_t size() const { return bits_.size(); }

    std::uint8_t get(int ancilla, int layer) const { return bits_[index(ancilla, layer)]; }
    void set(int ancilla, int layer, std::uint8_t v) { bits_[index(ancilla, layer)] = v; }
    void toggle(int ancilla, int layer) { bits_[index(ancilla, layer)] ^= 1U; }

    /// Active nodes in (layer, row, col) order; ancilla indices are already
    /// row-major in plaquette coordinates.
    std::vector<DetectorNode> active_nodes() const;
    std::span<const std::uint8_t> layer(int t) const {
        return {bits_.data() + static_cast<std::size_t>(t) * num_ancillas_, static_cast<std::size_t>(num_ancillas_)};
    }
    bool operator==(const DetectorLattice &) const = default;

   private:
    std::size_t index(int ancilla, int layer) const {
        return static_cast<std::size_t>(layer) * num_ancillas_ + ancilla;
    }
    Species species_ = Species::kZ;
    int num_ancillas_ = 0;
    int num_layers_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Raw outcomes s[i][t] per species, including the terminal perfect round.
struct SyndromeRecord {
    std::array<std::vector<std::vector<std::uint8_t>>, 2> measured;
};

struct DetectorPair {
    DetectorLattice z;  // Z checks, sensitive to X errors
    DetectorLattice x;  // X checks, sensitive to Z errors
    const DetectorLattice &of(Species s) const { return s == Species::kZ ? z : x; }
};

/// Builds s[i][t] = (parity of accumulated errors on the check) xor flip bit,
/// appends one noiseless round, and returns v[i][t] = s[i][t] xor s[i][t-1].
DetectorPair extract_detectors(const CodeGeometry &geometry, const ErrorHistory &history,
                               SyndromeRecord *record = nullptr);

/// Detector events caused by an explicit set of data flips (per layer) and
/// measurement flips, used to recompute the syndrome of a correction.
DetectorLattice detectors_of(const CodeGeometry &geometry, Species species, int num_layers,
                             std::span<const std::vector<int>> data_flips_per_layer,
                             std::span<const DetectorNode> meas_flips);

/// Accumulated flips of species-relevant Pauli components over the history.
std::vector<std::uint8_t> accumulated_flips(const CodeGeometry &geometry, const ErrorHistory &history, Species s);

/// Syndrome of a static set of data flips for species s.
std::vector<std::uint8_t> static_syndrome(const CodeGeometry &geometry, Species s,
                                          std::span<const std::uint8_t> flips);

/// True iff (accumulated errors xor correction) anticommutes with the dual
/// logical operator. Throws std::invalid_argument if the residual has a
/// nonzero syndrome (the correction did not match the observed defects).
bool logical_failure(const CodeGeometry &geometry, const ErrorHistory &history,
                     std::span<const std::uint8_t> correction, Species s);

/// Same check from an already accumulated error pattern.
bool logical_failure_of_residual(const CodeGeometry &geometry, std::span<const std::uint8_t> accumulated,
                                 std::span<const std::uint8_t> correction, Species s);

/// Writes "ancilla,layer,bit" rows for every node of the lattice.
void write_detector_csv(std::ostream &out, const DetectorLattice &lattice);

/// Fast single-species sampler: only the flips one species can see (data rate
/// p for X-or-Y at p/2 each) are drawn, with geometric skipping over quiet
/// sites. Equivalent in distribution to sampling full Pauli errors and
/// projecting onto that species.
class SpeciesSampler {
   public:
    SpeciesSampler(const CodeGeometry &geometry, const NoiseModel &noise, Species species, int noisy_cycles);

    struct Shot {
        std::vector<DetectorNode> active;
        /// Parity of true flips on the dual logical support.
        bool logical_parity = false;
    };

    void sample(Rng &rng, Shot &shot);
    int num_layers() const { return cycles_ + 1; }

   private:
    struct RegionSite {
        int index;
        int cycle_begin;
        int cycle_end;
        double rate;
    };
    void flip_data(int q, int cycle, Shot &shot);
    void flip_meas(int ancilla, int cycle);

    const CodeGeometry *geometry_;
    Species species_;
    int cycles_;
    double data_rate_;
    double meas_rate_;
    std::vector<std::uint8_t> data_in_region_;
    std::vector<std::uint8_t> anc_in_region_;
    std::vector<RegionSite> region_data_;
    std::vector<RegionSite> region_anc_;
    std::vector<std::uint8_t> on_logical_;
    DetectorLattice scratch_;
};

}  // namespace q3de

#endif  // Q3DE_SURFACE_CODE_H
