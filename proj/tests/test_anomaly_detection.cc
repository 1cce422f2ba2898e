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

#include <cmath>
#include <numeric>
#include <sstream>

#include "q3de/anomaly_detection.h"
#include "q3de/experiments.h"

namespace q3de {
namespace {

using Layers = std::vector<std::vector<std::uint8_t>>;

// Reference values of erfinv from a 50-digit evaluation.
struct ErfinvCase {
    double x;
    double y;
};
constexpr ErfinvCase kErfinv[] = {
    {0.0, 0.0},
    {0.1, 0.088855990494257687},
    {0.5, 0.47693627620446987},
    {-0.5, -0.47693627620446987},
    {0.9, 1.1630871536766741},
    {0.99, 1.8213863677184496},
    {0.999, 2.3267537655135246},
};

bool same_two_figures(double a, double b) {
    const double unit = std::pow(10.0, std::floor(std::log10(std::abs(a))) - 1.0);
    return std::abs(a - b) <= unit;
}

TEST(Erfinv, ReferenceValues) {
    for (const auto &c : kErfinv) {
        EXPECT_NEAR(erfinv(c.x), c.y, 1e-9) << "x = " << c.x;
    }
}

TEST(Erfinv, RoundTripOnGrid) {
    for (double x = -0.999; x <= 0.999; x += 0.001) {
        const double y = erfinv(x);
        EXPECT_NEAR(std::erf(y), x, 1e-12);
    }
}

TEST(Threshold, AlphaOneIsMean) {
    EXPECT_DOUBLE_EQ(detection_threshold(0.01, 0.1, 300, 1.0), 3.0);
}

TEST(Threshold, ZeroSigmaIsMean) {
    for (double alpha : {0.001, 0.01, 0.3}) {
        EXPECT_DOUBLE_EQ(detection_threshold(0.02, 0.0, 100, alpha), 2.0);
    }
}

TEST(Threshold, WorkedExample) {
    const double th = detection_threshold(0.01, 0.0995, 300, 0.01);
    EXPECT_NEAR(th, 3.0 + std::sqrt(2.0 * 300 * 0.0995 * 0.0995) * 1.8213863677184496, 1e-9);
    EXPECT_NEAR(th, 7.439, 1e-3);
}

TEST(Threshold, RejectsBadAlpha) {
    EXPECT_THROW(detection_threshold(0.01, 0.1, 300, 0.0), std::invalid_argument);
    EXPECT_THROW(detection_threshold(0.01, 0.1, 300, 1.5), std::invalid_argument);
}

TEST(Calibrate, QuietStreamIsZero) {
    const Layers layers(100, std::vector<std::uint8_t>(20, 0));
    const Calibration c = calibrate(layers, 10);
    EXPECT_EQ(c.mu, 0.0);
    EXPECT_EQ(c.sigma, 0.0);
}

TEST(Calibrate, BernoulliMoments) {
    Rng rng(31);
    const double q = 0.03;
    Layers layers(3000, std::vector<std::uint8_t>(200, 0));
    for (auto &l : layers) {
        for (auto &b : l) {
            b = rng.bernoulli(q) ? 1 : 0;
        }
    }
    const Calibration c = calibrate(layers, 100);
    const double n = 2998.0 * 200.0;
    const double se_mu = std::sqrt(q * (1 - q) / n);
    EXPECT_NEAR(c.mu, q, 3 * se_mu);
    const double sigma = std::sqrt(q * (1 - q));
    EXPECT_NEAR(c.sigma, sigma, 3 * se_mu * std::abs(1 - 2 * q) / (2 * sigma));
}

TEST(Calibrate, RejectsShortStream) {
    const Layers layers(99, std::vector<std::uint8_t>(4, 0));
    EXPECT_THROW(calibrate(layers, 10), std::invalid_argument);
}

TEST(Calibrate, StableAcrossSeeds) {
    const CodeGeometry geo = CodeGeometry::build(21);
    const Calibration a = calibrate_stream(geo, 1e-3, 20000, 1);
    for (std::uint64_t seed : {2, 3}) {
        const Calibration b = calibrate_stream(geo, 1e-3, 20000, seed);
        EXPECT_TRUE(std::isfinite(b.mu) && std::isfinite(b.sigma));
        EXPECT_TRUE(same_two_figures(a.mu, b.mu)) << a.mu << " vs " << b.mu;
        EXPECT_TRUE(same_two_figures(a.sigma, b.sigma)) << a.sigma << " vs " << b.sigma;
    }
}

DetectionConfig small_config(int c_win) {
    DetectionConfig dc;
    dc.c_win = c_win;
    dc.mu = 0.01;
    dc.sigma = 0.1;
    dc.n_th = 3;
    return dc;
}

PositionMap line_positions(int n) {
    PositionMap m;
    for (int i = 0; i < n; ++i) {
        m.row.push_back(0.0);
        m.col.push_back(i);
    }
    m.z_count = n;
    return m;
}

TEST(AnomalyDetector, QuietLayersKeepZeroCounts) {
    AnomalyDetector det(line_positions(8), small_config(5));
    for (int t = 0; t < 30; ++t) {
        EXPECT_FALSE(det.push({}).has_value());
    }
    for (int v : det.counts()) {
        EXPECT_EQ(v, 0);
    }
}

TEST(AnomalyDetector, AllOnesSaturateAtWindow) {
    DetectionConfig dc = small_config(7);
    dc.n_th = 100;
    AnomalyDetector det(line_positions(6), dc);
    std::vector<int> all(6);
    std::iota(all.begin(), all.end(), 0);
    for (int t = 0; t < 25; ++t) {
        det.push(all);
        for (int v : det.counts()) {
            EXPECT_EQ(v, std::min(t + 1, 7));
        }
    }
}

TEST(AnomalyDetector, IncrementalMatchesResummation) {
    Rng rng(32);
    const int n = 30;
    const int c_win = 13;
    DetectionConfig dc = small_config(c_win);
    dc.n_th = 1000;
    AnomalyDetector det(line_positions(n), dc);
    Layers history;
    for (int t = 0; t < 400; ++t) {
        std::vector<int> active;
        std::vector<std::uint8_t> dense(n, 0);
        for (int i = 0; i < n; ++i) {
            if (rng.bernoulli(0.2)) {
                active.push_back(i);
                dense[i] = 1;
            }
        }
        history.push_back(dense);
        det.push(active);
        for (int i = 0; i < n; ++i) {
            int sum = 0;
            for (int j = std::max(0, t - c_win + 1); j <= t; ++j) {
                sum += history[j][i];
            }
            ASSERT_EQ(det.counts()[i], sum) << "t=" << t << " i=" << i;
        }
    }
}

TEST(AnomalyDetector, MedianCenterAndMasking) {
    DetectionConfig dc = small_config(4);
    dc.n_th = 3;
    dc.mask_duration = 10;
    AnomalyDetector det(line_positions(10), dc);
    const std::vector<int> burst{2, 3, 4, 5};
    std::optional<DetectionEvent> ev;
    for (int t = 0; t < 4 && !ev; ++t) {
        ev = det.push(burst);
    }
    ASSERT_TRUE(ev.has_value());
    EXPECT_EQ(ev->members, burst);
    // Lower median of columns 2, 3, 4, 5.
    EXPECT_EQ(ev->center_col, 3.0);
    EXPECT_EQ(ev->estimated_start, ev->detect_cycle);
    // Masked positions do not trigger again before expiry.
    for (int t = 0; t < 8; ++t) {
        EXPECT_FALSE(det.push(burst).has_value());
        for (int i : burst) {
            EXPECT_TRUE(det.masked(i));
        }
    }
    bool again = false;
    for (int t = 0; t < 6; ++t) {
        again = again || det.push(burst).has_value();
    }
    EXPECT_TRUE(again);
}

TEST(AnomalyDetector, NoEventBeforeWarmUp) {
    DetectionConfig dc = small_config(50);
    dc.n_th = 1;
    AnomalyDetector det(line_positions(5), dc);
    const std::vector<int> all{0, 1, 2, 3, 4};
    for (int t = 0; t < 49; ++t) {
        EXPECT_FALSE(det.push(all).has_value());
    }
    EXPECT_TRUE(det.push(all).has_value());
}

TEST(AnomalyDetector, QuietStreamHasNoEventOverLongRuns) {
    const CodeGeometry geo = CodeGeometry::build(21);
    const Calibration cal = calibrate_stream(geo, 1e-3, 200000, 41);
    DetectionConfig dc;
    dc.c_win = 1000;
    dc.mu = cal.mu;
    dc.sigma = cal.sigma;
    const int runs = 50;
    int quiet = 0;
    for (int r = 0; r < runs; ++r) {
        AnomalyDetector det(PositionMap::of(geo), dc);
        DetectorStream stream(geo, NoiseModel::phenomenological(1e-3), derive_seed(42, {static_cast<std::uint64_t>(r)}));
        bool fired = false;
        for (int t = 0; t < 100000 && !fired; ++t) {
            fired = det.push(stream.next()).has_value();
        }
        quiet += fired ? 0 : 1;
    }
    // At least 99% event-free runs, less three binomial standard errors.
    const double floor = 0.99 - 3.0 * std::sqrt(0.99 * 0.01 / runs);
    EXPECT_GE(static_cast<double>(quiet) / runs, floor) << quiet << " of " << runs << " runs were event-free";
}

AnomalousRegion square(int row, int col, int start) {
    AnomalousRegion r;
    r.center = {row, col};
    r.size = 4;
    r.p_ano = 0.5;
    r.start_cycle = start;
    return r;
}

std::optional<DetectionEvent> first_event_after(AnomalyDetector &det, DetectorStream &stream, int onset, int until) {
    while (stream.cycle() < until) {
        auto ev = det.push(stream.next());
        if (ev && ev->detect_cycle >= onset) {
            return ev;
        }
    }
    return std::nullopt;
}

TEST(AnomalyDetector, LocatesInjectedRegion) {
    const CodeGeometry geo = CodeGeometry::build(21);
    const Calibration cal = calibrate_stream(geo, 1e-3, 20000, 51);
    DetectionConfig dc;
    dc.c_win = 300;
    dc.mu = cal.mu;
    dc.sigma = cal.sigma;
    const AnomalousRegion region = square(9, 12, 10000);
    NoiseModel noise = NoiseModel::phenomenological(1e-3);
    noise.regions.push_back(region);
    AnomalyDetector det(PositionMap::of(geo), dc);
    DetectorStream stream(geo, noise, 52);
    const auto ev = first_event_after(det, stream, region.start_cycle, region.start_cycle + dc.c_win);
    ASSERT_TRUE(ev.has_value());
    EXPECT_LE(std::abs(ev->center_row - region.center_row()), 1.0);
    EXPECT_LE(std::abs(ev->center_col - region.center_col()), 1.0);
}

TEST(AnomalyDetector, SecondRegionDetectedAfterFirst) {
    const CodeGeometry geo = CodeGeometry::build(21);
    const Calibration cal = calibrate_stream(geo, 1e-3, 20000, 61);
    DetectionConfig dc;
    dc.c_win = 300;
    dc.mu = cal.mu;
    dc.sigma = cal.sigma;
    const AnomalousRegion a = square(5, 5, 2000);
    const AnomalousRegion b = square(15, 15, 2000 + 2 * dc.c_win);
    NoiseModel noise = NoiseModel::phenomenological(1e-3);
    noise.regions = {a, b};
    AnomalyDetector det(PositionMap::of(geo), dc);
    DetectorStream stream(geo, noise, 62);
    const auto first = first_event_after(det, stream, a.start_cycle, b.start_cycle);
    ASSERT_TRUE(first.has_value());
    EXPECT_LE(std::abs(first->center_row - a.center_row()), 1.0);
    const auto second = first_event_after(det, stream, b.start_cycle, b.start_cycle + dc.c_win);
    ASSERT_TRUE(second.has_value());
    EXPECT_LE(std::abs(second->center_row - b.center_row()), 1.0);
    EXPECT_LE(std::abs(second->center_col - b.center_col()), 1.0);
}

TEST(EvenCycleStatistic, ZeroAndOnes) {
    const Layers zeros(50, std::vector<std::uint8_t>(3, 0));
    const Layers ones(50, std::vector<std::uint8_t>(3, 1));
    EXPECT_EQ(even_cycle_statistic(zeros, 1, 40, 10), 0);
    EXPECT_EQ(even_cycle_statistic(ones, 1, 40, 10), 11);
    EXPECT_THROW(even_cycle_statistic(ones, 1, 19, 10), std::out_of_range);
}

TEST(EvenCycleStatistic, CalibrationIsSoundAtWindow300) {
    const CodeGeometry geo = CodeGeometry::build(21);
    const int c_win = 300;
    const Calibration cal = calibrate_stream(geo, 1e-3, 20000, 71);
    const double th = detection_threshold(cal.mu, cal.sigma, c_win, 0.01);
    DetectorStream stream(geo, NoiseModel::phenomenological(1e-3), 72);
    const PositionMap pm = PositionMap::of(geo);
    Layers layers(12 * (2 * c_win + 1), std::vector<std::uint8_t>(pm.size(), 0));
    for (auto &l : layers) {
        for (int i : stream.next()) {
            l[i] = 1;
        }
    }
    long over = 0;
    long n = 0;
    for (int t = 2 * c_win; t < static_cast<int>(layers.size()); t += 2 * c_win + 1) {
        for (int i = 0; i < pm.size(); ++i) {
            over += even_cycle_statistic(layers, i, t, c_win) > th ? 1 : 0;
            ++n;
        }
    }
    const double rate = static_cast<double>(over) / n;
    EXPECT_LE(rate, 0.01 + 3.0 * std::sqrt(0.01 * 0.99 / n));
}

TEST(SelectWindow, BinarySearchOnMonotoneRates) {
    int calls = 0;
    auto rates = [&](int c) {
        ++calls;
        return std::make_pair(1.0 / c, 0.001);
    };
    EXPECT_EQ(select_window(rates, 10, 1000, 0.01), 101);
    EXPECT_LT(calls, 15);
    EXPECT_EQ(select_window(rates, 10, 50, 0.01), -1);
}

TEST(PositionMap, MergesSpecies) {
    const CodeGeometry geo = CodeGeometry::build(5);
    const PositionMap pm = PositionMap::of(geo);
    EXPECT_EQ(pm.size(), 24);
    EXPECT_EQ(pm.z_count, 12);
    EXPECT_EQ(pm.position(Species::kX, 3), 15);
}

TEST(DetectionLog, CsvRow) {
    DetectionEvent ev;
    ev.detect_cycle = 1200;
    ev.estimated_start = 1100;
    ev.center_row = 4.5;
    ev.center_col = 7.5;
    ev.members = {1, 2, 3};
    std::ostringstream out;
    write_detection_header(out);
    write_detection_row(out, ev);
    EXPECT_EQ(out.str(), "detect_cycle,estimated_start,center_row,center_col,members\n1200,1100,4.5,7.5,3\n");
}

}  // namespace
}  // namespace q3de
