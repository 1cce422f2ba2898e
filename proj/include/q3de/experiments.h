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

#ifndef Q3DE_EXPERIMENTS_H
#define Q3DE_EXPERIMENTS_H

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "q3de/analysis.h"
#include "q3de/anomaly_detection.h"
#include "q3de/surface_code.h"

namespace q3de {

/// Runs task(chunk) for chunk in [0, num_chunks) on up to `workers`
/// threads. Chunks are claimed dynamically; the first exception thrown is
/// rethrown after all threads join.
void parallel_for(int num_chunks, int workers, const std::function<void(int)> &task);

/// Square region of side d_ano centered on the patch, active for the whole
/// run.
AnomalousRegion centered_region(int d, int d_ano, double p_ano);

struct PlRequest {
    int d = 5;
    double p = 1e-3;
    /// Negative means equal to p.
    double p_meas = -1.0;
    /// uniform_exact, uniform_greedy, aware_exact or aware_greedy.
    std::string mode = "uniform_exact";
    std::optional<AnomalousRegion> region;
    long trials = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    /// Per-cycle rate as 1 - (1 - P)^(1/d) instead of P / d.
    bool exact_conversion = false;
    long chunk = 2000;
};

struct PlEstimate {
    double pl = 0.0;
    double standard_error = 0.0;
    long failures = 0;
    long trials = 0;
};

/// Logical X failure rate per cycle over d noisy cycles and a perfect final
/// round. Results depend only on the seed, not on the worker count.
PlEstimate estimate_pl(const PlRequest &request);

/// Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(long k, long n, double z);

struct DetectionEvalConfig {
    int d = 21;
    double p = 1e-3;
    double p_ano_ratio = 500.0;
    int d_ano = 4;
    double alpha = 0.01;
    int n_th = 20;
    /// Zero selects the window automatically in [c_win_lo, c_win_hi].
    int c_win = 0;
    int c_win_lo = 10;
    int c_win_hi = 1000;
    double target = 0.01;
    int selection_trials = 200;
    int trials = 1000;
    int calibration_cycles = 200000;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct DetectionRates {
    double false_positive = 0.0;
    double true_negative = 0.0;
    int trials = 0;
};

struct DetectionEvalResult {
    Calibration calibration;
    int c_win = 0;
    double threshold = 0.0;
    DetectionRates rates;
    /// Over detected region trials.
    double median_position_error = 0.0;
    double median_latency = 0.0;
    int max_latency = -1;
    int detected = 0;
};

/// Calibrates on a quiet stream of the given length.
Calibration calibrate_stream(const CodeGeometry &geometry, double p, int cycles, std::uint64_t seed);

/// Each trial warms up for c_win cycles and then observes c_win cycles. A
/// quiet trial with any event is a false positive; a trial with a region
/// starting at the observation onset and no event in the window is a true
/// negative. Region centers are drawn uniformly so the square fits.
DetectionRates detection_rates(const CodeGeometry &geometry, const DetectionEvalConfig &config,
                               const Calibration &calibration, int c_win, int trials, std::uint64_t seed,
                               std::vector<double> *position_errors = nullptr, std::vector<int> *latencies = nullptr);

DetectionEvalResult detection_eval(const DetectionEvalConfig &config);

struct RollbackCompareRow {
    int d = 0;
    double p = 0.0;
    int d_ano = 0;
    double p_ano = 0.0;
    PlEstimate normal;       // no anomaly, distance d
    PlEstimate normal_m2;    // no anomaly, distance d - 2
    PlEstimate uniform;      // anomaly, uniform decoding
    PlEstimate aware;        // anomaly, re-weighted decoding
    DistanceReduction reduction_uniform;
    DistanceReduction reduction_aware;
};

RollbackCompareRow rollback_compare(int d, double p, int d_ano, double p_ano, long trials, std::uint64_t seed,
                                    int workers, const std::string &matcher = "exact");

}  // namespace q3de

#endif  // Q3DE_EXPERIMENTS_H
