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

#ifndef Q3DE_ANOMALY_DETECTION_H
#define Q3DE_ANOMALY_DETECTION_H

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "q3de/rng.h"
#include "q3de/surface_code.h"

namespace q3de {

/// Inverse error function on (-1, 1).
double erfinv(double x);

struct DetectionConfig {
    int c_win = 300;
    double alpha = 0.01;
    int n_th = 20;
    double mu = 0.0;
    double sigma = 0.0;
    int mask_duration = 25000;
    /// Latency subtracted from the detection cycle to estimate the onset.
    int c_lat = 0;

    void validate() const;
};

/// V_th = c_win * mu + sqrt(2 * c_win * sigma^2) * erfinv(1 - alpha).
double detection_threshold(double mu, double sigma, int c_win, double alpha);

struct Calibration {
    double mu = 0.0;
    double sigma = 0.0;
};

/// Pooled mean and standard deviation of detector bits over positions and
/// cycles, dropping the first and last layer. Layers are dense 0/1 vectors.
/// Throws if fewer than 10 * c_win layers are given.
Calibration calibrate(std::span<const std::vector<std::uint8_t>> layers, int c_win);

/// Sum of v[i][t - 2j] for j = 0..c_win. Requires t >= 2 * c_win.
int even_cycle_statistic(std::span<const std::vector<std::uint8_t>> layers, int i, int t, int c_win);

/// Detector positions on the data plane: plaquette centers of both species,
/// Z ancillas first.
struct PositionMap {
    std::vector<double> row;
    std::vector<double> col;
    int z_count = 0;

    static PositionMap of(const CodeGeometry &geometry);
    int size() const { return static_cast<int>(row.size()); }
    int position(Species s, int ancilla) const { return s == Species::kZ ? ancilla : z_count + ancilla; }
};

struct DetectionEvent {
    int detect_cycle = 0;
    int estimated_start = 0;
    double center_row = 0.0;
    double center_col = 0.0;
    std::vector<int> members;
};

/// Sliding-window counters over every cycle with CLT-derived thresholds.
/// Positions over threshold are counted; when more than n_th unmasked
/// positions exceed, an event is emitted and its members masked.
class AnomalyDetector {
   public:
    AnomalyDetector(PositionMap positions, DetectionConfig config);

    /// Adds the next layer, given as the list of active positions, and drops
    /// the layer that left the window.
    void update(std::span<const int> active);
    /// Threshold test for the current cycle; no events before warm-up.
    std::optional<DetectionEvent> scan();
    std::optional<DetectionEvent> push(std::span<const int> active) {
        update(active);
        return scan();
    }

    /// Number of layers consumed so far; the last one has index cycle() - 1.
    int cycle() const { return cycle_; }
    const std::vector<int> &counts() const { return counts_; }
    double threshold() const { return threshold_; }
    int over_threshold_unmasked() const { return n_over_; }
    bool masked(int position) const { return mask_until_[position] > cycle_ - 1; }
    const DetectionConfig &config() const { return config_; }

   private:
    void set_over(int i, bool over);
    void expire_masks();

    PositionMap positions_;
    DetectionConfig config_;
    double threshold_;
    int cut_;  // smallest count strictly above the threshold
    int cycle_ = 0;
    std::vector<int> counts_;
    std::deque<std::vector<int>> window_;
    std::vector<char> over_;
    std::vector<int> mask_until_;
    std::deque<std::pair<int, int>> expiries_;
    int n_over_ = 0;
};

/// Lower median per coordinate of the given positions.
std::pair<double, double> median_center(const PositionMap &positions, std::span<const int> members);

/// Streams merged detector layers of both species from full Pauli noise,
/// drawing only the sites that err. Keeps the true accumulated flips.
class DetectorStream {
   public:
    DetectorStream(const CodeGeometry &geometry, NoiseModel noise, std::uint64_t seed);

    /// Detector events of the next cycle, as merged positions.
    const std::vector<int> &next();
    /// Per-species active ancillas of the most recent layer.
    const std::vector<int> &last_species(Species s) const { return last_[species_index(s)]; }
    int cycle() const { return cycle_; }
    const NoiseModel &noise() const { return noise_; }
    void set_noise(NoiseModel noise);
    /// Accumulated true flips seen by species s.
    const std::vector<std::uint8_t> &true_flips(Species s) const { return truth_[species_index(s)]; }

   private:
    void flip_data(int q, Pauli p);

    const CodeGeometry *geometry_;
    NoiseModel noise_;
    Rng rng_;
    PositionMap positions_;
    int cycle_ = 0;
    std::array<std::vector<std::uint8_t>, 2> pending_;  // measurement flips carried into the next layer
    std::array<std::vector<std::uint8_t>, 2> bits_;
    std::array<std::vector<int>, 2> last_;
    std::array<std::vector<std::uint8_t>, 2> truth_;
    std::vector<int> merged_;
    std::vector<int> touched_[2];
};

/// Smallest c_win in [lo, hi] whose estimated error rates both lie below
/// target, assuming the rates fall as the window grows. rates(c_win)
/// returns (false_positive_rate, true_negative_rate). Returns -1 if even hi
/// fails.
int select_window(const std::function<std::pair<double, double>(int)> &rates, int lo, int hi, double target);

/// CSV header and row for detection events.
void write_detection_header(std::ostream &out);
void write_detection_row(std::ostream &out, const DetectionEvent &event);

}  // namespace q3de

#endif  // Q3DE_ANOMALY_DETECTION_H
