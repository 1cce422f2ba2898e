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

#include "q3de/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "q3de/decoder.h"
#include "q3de/rng.h"

namespace q3de {

void parallel_for(int num_chunks, int workers, const std::function<void(int)> &task) {
    workers = std::max(1, std::min(workers, num_chunks));
    if (workers == 1) {
        for (int k = 0; k < num_chunks; ++k) {
            task(k);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (int k = next++; k < num_chunks; k = next++) {
            try {
                task(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = num_chunks;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back(run);
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

AnomalousRegion centered_region(int d, int d_ano, double p_ano) {
    AnomalousRegion r;
    r.center = {(d - 1) / 2, (d - 1) / 2};
    r.size = d_ano;
    r.p_ano = p_ano;
    return r;
}

PlEstimate estimate_pl(const PlRequest &req) {
    if (req.trials < 1 || req.d < 2 || req.chunk < 1) {
        throw std::invalid_argument("estimate_pl needs trials >= 1 and d >= 2");
    }
    const CodeGeometry geometry = CodeGeometry::build(req.d);
    const double p_meas = req.p_meas < 0.0 ? req.p : req.p_meas;
    NoiseModel noise{req.p, p_meas, {}};
    if (req.region) {
        noise.regions.push_back(*req.region);
    }
    noise.validate();
    const SpeciesSampler prototype(geometry, noise, Species::kZ, req.d);
    const DecoderConfig config = decoder_config_from_name(req.mode, req.p, p_meas, req.region);
    const SpeciesDecoder decoder(geometry, Species::kZ, prototype.num_layers(), config);

    const int chunks = static_cast<int>((req.trials + req.chunk - 1) / req.chunk);
    std::vector<long> failures(chunks, 0);
    parallel_for(chunks, req.workers, [&](int k) {
        SpeciesSampler sampler = prototype;
        Rng rng(derive_seed(req.seed, {static_cast<std::uint64_t>(k)}));
        const long n = std::min(req.chunk, req.trials - k * req.chunk);
        SpeciesSampler::Shot shot;
        long f = 0;
        for (long i = 0; i < n; ++i) {
            sampler.sample(rng, shot);
            if (shot.logical_parity != decoder.logical_flip(shot.active)) {
                ++f;
            }
        }
        failures[k] = f;
    });

    PlEstimate out;
    out.trials = req.trials;
    for (long f : failures) {
        out.failures += f;
    }
    const double big_p = static_cast<double>(out.failures) / static_cast<double>(out.trials);
    const double se_p = std::sqrt(big_p * (1.0 - big_p) / static_cast<double>(out.trials));
    if (req.exact_conversion) {
        out.pl = 1.0 - std::pow(1.0 - big_p, 1.0 / req.d);
        out.standard_error = big_p < 1.0 ? std::pow(1.0 - big_p, 1.0 / req.d - 1.0) * se_p / req.d : 0.0;
    } else {
        out.pl = big_p / req.d;
        out.standard_error = se_p / req.d;
    }
    return out;
}

std::pair<double, double> wilson_interval(long k, long n, double z) {
    if (n <= 0) {
        return {0.0, 1.0};
    }
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (ph + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Calibration calibrate_stream(const CodeGeometry &geometry, double p, int cycles, std::uint64_t seed) {
    DetectorStream stream(geometry, NoiseModel::phenomenological(p), seed);
    const PositionMap positions = PositionMap::of(geometry);
    std::vector<std::vector<std::uint8_t>> layers(cycles, std::vector<std::uint8_t>(positions.size(), 0));
    for (int t = 0; t < cycles; ++t) {
        for (int i : stream.next()) {
            layers[t][i] = 1;
        }
    }
    return calibrate(layers, std::max(1, cycles / 10));
}

namespace {

double lower_median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace

DetectionRates detection_rates(const CodeGeometry &geometry, const DetectionEvalConfig &config,
                               const Calibration &calibration, int c_win, int trials, std::uint64_t seed,
                               std::vector<double> *position_errors, std::vector<int> *latencies) {
    const int d = geometry.distance();
    if (config.d_ano < 1 || config.d_ano > d) {
        throw std::invalid_argument("d_ano must lie in [1, d]");
    }
    const PositionMap positions = PositionMap::of(geometry);
    DetectionConfig dc;
    dc.c_win = c_win;
    dc.alpha = config.alpha;
    dc.n_th = config.n_th;
    dc.mu = calibration.mu;
    dc.sigma = calibration.sigma;
    dc.validate();
    const int onset = c_win + 1;
    const int end = onset + c_win;
    const double p_ano = std::min(config.p * config.p_ano_ratio, 2.0 / 3.0);

    std::vector<char> false_pos(trials, 0);
    std::vector<char> missed(trials, 0);
    std::vector<double> errors(trials, -1.0);
    std::vector<int> lat(trials, -1);
    parallel_for(trials, config.workers, [&](int k) {
        const auto kk = static_cast<std::uint64_t>(k);
        {
            AnomalyDetector det(positions, dc);
            DetectorStream stream(geometry, NoiseModel::phenomenological(config.p), derive_seed(seed, {0, kk}));
            for (int t = 0; t < end; ++t) {
                auto ev = det.push(stream.next());
                if (ev && t >= onset) {
                    false_pos[k] = 1;
                    break;
                }
            }
        }
        Rng place(derive_seed(seed, {1, kk}));
        AnomalousRegion region;
        region.size = config.d_ano;
        region.p_ano = p_ano;
        region.start_cycle = onset;
        const int span = d - config.d_ano + 1;
        region.center = {static_cast<int>(place.below(span)) + config.d_ano / 2,
                         static_cast<int>(place.below(span)) + config.d_ano / 2};
        NoiseModel noise = NoiseModel::phenomenological(config.p);
        noise.regions.push_back(region);
        AnomalyDetector det(positions, dc);
        DetectorStream stream(geometry, noise, derive_seed(seed, {2, kk}));
        missed[k] = 1;
        for (int t = 0; t < end; ++t) {
            auto ev = det.push(stream.next());
            if (ev && t >= onset) {
                missed[k] = 0;
                lat[k] = t - onset;
                errors[k] = std::max(std::abs(ev->center_row - region.center_row()),
                                     std::abs(ev->center_col - region.center_col()));
                break;
            }
        }
    });
    DetectionRates r;
    r.trials = trials;
    for (int k = 0; k < trials; ++k) {
        r.false_positive += false_pos[k];
        r.true_negative += missed[k];
        if (!missed[k]) {
            if (position_errors) {
                position_errors->push_back(errors[k]);
            }
            if (latencies) {
                latencies->push_back(lat[k]);
            }
        }
    }
    r.false_positive /= trials;
    r.true_negative /= trials;
    return r;
}

DetectionEvalResult detection_eval(const DetectionEvalConfig &config) {
    if (config.trials < 1 || config.selection_trials < 1) {
        throw std::invalid_argument("detection_eval needs at least one trial");
    }
    const CodeGeometry geometry = CodeGeometry::build(config.d);
    DetectionEvalResult out;
    const int cal_cycles = std::max(config.calibration_cycles, 10 * std::max(config.c_win, config.c_win_hi) + 2);
    out.calibration = calibrate_stream(geometry, config.p, cal_cycles, derive_seed(config.seed, {0xca1ULL}));
    out.c_win = config.c_win;
    if (out.c_win <= 0) {
        out.c_win = select_window(
            [&](int c) {
                auto r = detection_rates(geometry, config, out.calibration, c, config.selection_trials,
                                         derive_seed(config.seed, {0x5e1ULL, static_cast<std::uint64_t>(c)}));
                return std::make_pair(r.false_positive, r.true_negative);
            },
            config.c_win_lo, config.c_win_hi, config.target);
        if (out.c_win < 0) {
            // No window met the target; evaluate at the largest one.
            out.c_win = config.c_win_hi;
        }
    }
    out.threshold = detection_threshold(out.calibration.mu, out.calibration.sigma, out.c_win, config.alpha);
    std::vector<double> errors;
    std::vector<int> latencies;
    out.rates = detection_rates(geometry, config, out.calibration, out.c_win, config.trials,
                                derive_seed(config.seed, {0xe7aULL}), &errors, &latencies);
    out.detected = static_cast<int>(latencies.size());
    out.median_position_error = lower_median(errors);
    out.median_latency = lower_median(std::vector<double>(latencies.begin(), latencies.end()));
    out.max_latency = latencies.empty() ? -1 : *std::max_element(latencies.begin(), latencies.end());
    return out;
}

RollbackCompareRow rollback_compare(int d, double p, int d_ano, double p_ano, long trials, std::uint64_t seed,
                                    int workers, const std::string &matcher) {
    if (d < 5 || d_ano < 1 || d_ano >= d) {
        throw std::invalid_argument("rollback_compare needs d >= 5 and 1 <= d_ano < d");
    }
    RollbackCompareRow row;
    row.d = d;
    row.p = p;
    row.d_ano = d_ano;
    row.p_ano = p_ano;
    PlRequest req;
    req.p = p;
    req.trials = trials;
    req.workers = workers;
    const std::string suffix = "_" + matcher;

    req.d = d;
    req.mode = "uniform" + suffix;
    req.seed = derive_seed(seed, {1});
    row.normal = estimate_pl(req);
    req.d = d - 2;
    req.seed = derive_seed(seed, {2});
    row.normal_m2 = estimate_pl(req);

    req.d = d;
    req.region = centered_region(d, d_ano, p_ano);
    req.seed = derive_seed(seed, {3});
    row.uniform = estimate_pl(req);
    req.mode = "aware" + suffix;
    row.aware = estimate_pl(req);

    row.reduction_uniform =
        effective_distance_estimate(row.uniform.pl, row.uniform.standard_error, row.normal.pl,
                                    row.normal.standard_error, row.normal_m2.pl, row.normal_m2.standard_error);
    row.reduction_aware =
        effective_distance_estimate(row.aware.pl, row.aware.standard_error, row.normal.pl, row.normal.standard_error,
                                    row.normal_m2.pl, row.normal_m2.standard_error);
    return row;
}

}  // namespace q3de
