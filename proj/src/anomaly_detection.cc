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

#include "q3de/anomaly_detection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace q3de {

double erfinv(double x) {
    if (!(x > -1.0 && x < 1.0)) {
        if (x == 1.0) {
            return std::numeric_limits<double>::infinity();
        }
        if (x == -1.0) {
            return -std::numeric_limits<double>::infinity();
        }
        throw std::domain_error("erfinv argument outside [-1, 1]");
    }
    // Giles' single-precision rational approximation.
    double w = -std::log((1.0 - x) * (1.0 + x));
    double p;
    if (w < 5.0) {
        w -= 2.5;
        p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
    } else {
        w = std::sqrt(w) - 3.0;
        p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
    }
    double y = p * x;
    // Newton step on erf(y) - x.
    y -= (std::erf(y) - x) / (2.0 / std::sqrt(std::numbers::pi) * std::exp(-y * y));
    return y;
}

void DetectionConfig::validate() const {
    if (c_win < 1) {
        throw std::invalid_argument("c_win must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (n_th < 1) {
        throw std::invalid_argument("n_th must be at least 1");
    }
    if (sigma < 0.0) {
        throw std::invalid_argument("sigma must be nonnegative");
    }
    if (mask_duration < 0) {
        throw std::invalid_argument("mask_duration must be nonnegative");
    }
}

double detection_threshold(double mu, double sigma, int c_win, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (c_win < 1) {
        throw std::invalid_argument("c_win must be at least 1");
    }
    return c_win * mu + std::sqrt(2.0 * c_win * sigma * sigma) * erfinv(1.0 - alpha);
}

Calibration calibrate(std::span<const std::vector<std::uint8_t>> layers, int c_win) {
    if (c_win < 1 || layers.size() < 10 * static_cast<std::size_t>(c_win)) {
        throw std::invalid_argument("calibration stream must span at least 10 * c_win cycles");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    double count = 0.0;
    for (std::size_t t = 1; t + 1 < layers.size(); ++t) {
        for (std::uint8_t b : layers[t]) {
            sum += b;
            sum_sq += static_cast<double>(b) * b;
            count += 1.0;
        }
    }
    Calibration c;
    if (count > 0.0) {
        c.mu = sum / count;
        c.sigma = std::sqrt(std::max(0.0, sum_sq / count - c.mu * c.mu));
    }
    return c;
}

int even_cycle_statistic(std::span<const std::vector<std::uint8_t>> layers, int i, int t, int c_win) {
    if (t < 2 * c_win || t >= static_cast<int>(layers.size())) {
        throw std::out_of_range("even-cycle window leaves the stream");
    }
    int v = 0;
    for (int j = 0; j <= c_win; ++j) {
        v += layers[t - 2 * j][i];
    }
    return v;
}

PositionMap PositionMap::of(const CodeGeometry &geometry) {
    PositionMap m;
    for (Species s : {Species::kZ, Species::kX}) {
        for (const auto &a : geometry.ancillas(s)) {
            m.row.push_back(a.plaquette.row + 0.5);
            m.col.push_back(a.plaquette.col + 0.5);
        }
        if (s == Species::kZ) {
            m.z_count = m.size();
        }
    }
    return m;
}

std::pair<double, double> median_center(const PositionMap &positions, std::span<const int> members) {
    if (members.empty()) {
        return {0.0, 0.0};
    }
    std::vector<double> r;
    std::vector<double> c;
    for (int i : members) {
        r.push_back(positions.row[i]);
        c.push_back(positions.col[i]);
    }
    std::size_t k = (members.size() - 1) / 2;
    std::nth_element(r.begin(), r.begin() + k, r.end());
    std::nth_element(c.begin(), c.begin() + k, c.end());
    return {r[k], c[k]};
}

AnomalyDetector::AnomalyDetector(PositionMap positions, DetectionConfig config)
    : positions_(std::move(positions)), config_(config) {
    config_.validate();
    threshold_ = detection_threshold(config_.mu, config_.sigma, config_.c_win, config_.alpha);
    cut_ = static_cast<int>(std::floor(threshold_)) + 1;
    counts_.assign(positions_.size(), 0);
    over_.assign(positions_.size(), 0);
    mask_until_.assign(positions_.size(), -1);
}

void AnomalyDetector::set_over(int i, bool over) {
    if (static_cast<bool>(over_[i]) == over) {
        return;
    }
    over_[i] = over ? 1 : 0;
    if (!masked(i)) {
        n_over_ += over ? 1 : -1;
    }
}

void AnomalyDetector::expire_masks() {
    while (!expiries_.empty() && expiries_.front().first <= cycle_ - 1) {
        int i = expiries_.front().second;
        expiries_.pop_front();
        if (mask_until_[i] <= cycle_ - 1 && mask_until_[i] >= 0) {
            mask_until_[i] = -1;
            if (over_[i]) {
                ++n_over_;
            }
        }
    }
}

void AnomalyDetector::update(std::span<const int> active) {
    ++cycle_;
    expire_masks();
    for (int i : active) {
        set_over(i, ++counts_[i] >= cut_);
    }
    window_.emplace_back(active.begin(), active.end());
    if (static_cast<int>(window_.size()) > config_.c_win) {
        for (int i : window_.front()) {
            set_over(i, --counts_[i] >= cut_);
        }
        window_.pop_front();
    }
}

std::optional<DetectionEvent> AnomalyDetector::scan() {
    if (cycle_ < config_.c_win || n_over_ <= config_.n_th) {
        return std::nullopt;
    }
    DetectionEvent ev;
    ev.detect_cycle = cycle_ - 1;
    ev.estimated_start = ev.detect_cycle - config_.c_lat;
    for (int i = 0; i < positions_.size(); ++i) {
        if (over_[i] && !masked(i)) {
            ev.members.push_back(i);
        }
    }
    auto [r, c] = median_center(positions_, ev.members);
    ev.center_row = r;
    ev.center_col = c;
    int until = ev.detect_cycle + config_.mask_duration;
    for (int i : ev.members) {
        mask_until_[i] = until;
        --n_over_;
        expiries_.push_back({until, i});
    }
    return ev;
}

DetectorStream::DetectorStream(const CodeGeometry &geometry, NoiseModel noise, std::uint64_t seed)
    : geometry_(&geometry), noise_(std::move(noise)), rng_(seed), positions_(PositionMap::of(geometry)) {
    noise_.validate();
    for (Species s : {Species::kZ, Species::kX}) {
        int si = species_index(s);
        pending_[si].assign(geometry.num_ancillas(s), 0);
        bits_[si].assign(geometry.num_ancillas(s), 0);
        truth_[si].assign(geometry.num_data(), 0);
    }
}

void DetectorStream::set_noise(NoiseModel noise) {
    noise.validate();
    noise_ = std::move(noise);
}

void DetectorStream::flip_data(int q, Pauli p) {
    for (Species s : {Species::kZ, Species::kX}) {
        if (!flips(s, p)) {
            continue;
        }
        int si = species_index(s);
        truth_[si][q] ^= 1U;
        for (int i : geometry_->data_neighbors(s, q)) {
            bits_[si][i] ^= 1U;
            touched_[si].push_back(i);
        }
    }
}

const std::vector<int> &DetectorStream::next() {
    const int t = cycle_;
    for (int si = 0; si < 2; ++si) {
        for (int i : touched_[si]) {
            bits_[si][i] = 0;
        }
        touched_[si].clear();
        for (int i = 0; i < static_cast<int>(pending_[si].size()); ++i) {
            if (pending_[si][i]) {
                pending_[si][i] = 0;
                bits_[si][i] ^= 1U;
                touched_[si].push_back(i);
            }
        }
    }
    auto in_active_region_data = [&](int q) {
        Coord c = geometry_->data_sites()[q];
        for (const auto &r : noise_.regions) {
            if (r.active_at(t) && r.covers_data(c)) {
                return true;
            }
        }
        return false;
    };
    auto pick = [&]() {
        std::uint64_t k = rng_.below(3);
        return k == 0 ? Pauli::X : (k == 1 ? Pauli::Y : Pauli::Z);
    };
    const int nd = geometry_->num_data();
    const double site_rate = std::min(1.0, 1.5 * noise_.p);
    for (std::uint64_t q = rng_.geometric_skip(site_rate); q < static_cast<std::uint64_t>(nd);
         q += 1 + rng_.geometric_skip(site_rate)) {
        if (!in_active_region_data(static_cast<int>(q))) {
            flip_data(static_cast<int>(q), pick());
        }
    }
    for (const auto &r : noise_.regions) {
        if (!r.active_at(t)) {
            continue;
        }
        for (int row = std::max(0, r.row_begin()); row < std::min(geometry_->distance(), r.row_end()); ++row) {
            for (int col = std::max(0, r.col_begin()); col < std::min(geometry_->distance(), r.col_end()); ++col) {
                if (rng_.bernoulli(std::min(1.0, 1.5 * r.p_ano))) {
                    flip_data(geometry_->data_index({row, col}), pick());
                }
            }
        }
    }
    const int nz = geometry_->num_ancillas(Species::kZ);
    const int na = nz + geometry_->num_ancillas(Species::kX);
    auto meas_flip = [&](int pos) {
        int si = pos < nz ? 0 : 1;
        int i = pos < nz ? pos : pos - nz;
        bits_[si][i] ^= 1U;
        touched_[si].push_back(i);
        pending_[si][i] ^= 1U;
    };
    auto region_rate = [&](int pos) -> double {
        Species s = pos < nz ? Species::kZ : Species::kX;
        int i = pos < nz ? pos : pos - nz;
        Coord pl = geometry_->ancillas(s)[i].plaquette;
        for (const auto &r : noise_.regions) {
            if (r.active_at(t) && r.covers_ancilla(pl)) {
                return r.meas_rate();
            }
        }
        return -1.0;
    };
    for (std::uint64_t pos = rng_.geometric_skip(noise_.p_meas); pos < static_cast<std::uint64_t>(na);
         pos += 1 + rng_.geometric_skip(noise_.p_meas)) {
        if (region_rate(static_cast<int>(pos)) < 0.0) {
            meas_flip(static_cast<int>(pos));
        }
    }
    if (!noise_.regions.empty()) {
        for (int pos = 0; pos < na; ++pos) {
            double rr = region_rate(pos);
            if (rr >= 0.0 && rng_.bernoulli(rr)) {
                meas_flip(pos);
            }
        }
    }
    merged_.clear();
    for (int si = 0; si < 2; ++si) {
        auto &tl = touched_[si];
        std::sort(tl.begin(), tl.end());
        tl.erase(std::unique(tl.begin(), tl.end()), tl.end());
        last_[si].clear();
        for (int i : tl) {
            if (bits_[si][i]) {
                last_[si].push_back(i);
                merged_.push_back(si == 0 ? i : nz + i);
            }
        }
    }
    ++cycle_;
    return merged_;
}

int select_window(const std::function<std::pair<double, double>(int)> &rates, int lo, int hi, double target) {
    auto ok = [&](int c) {
        auto [fp, tn] = rates(c);
        return fp < target && tn < target;
    };
    if (lo > hi || !ok(hi)) {
        return -1;
    }
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        if (ok(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

void write_detection_header(std::ostream &out) {
    out << "detect_cycle,estimated_start,center_row,center_col,members\n";
}

void write_detection_row(std::ostream &out, const DetectionEvent &event) {
    out << event.detect_cycle << ',' << event.estimated_start << ',' << event.center_row << ','
        << event.center_col << ',' << event.members.size() << '\n';
}

}  // namespace q3de
