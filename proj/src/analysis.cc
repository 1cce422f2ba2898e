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

#include "q3de/analysis.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "q3de/rng.h"

namespace q3de {

EffectiveRate effective_rate(double p_l, double p_l_ano, double f_ano, double tau_ano) {
    if (p_l < 0.0 || p_l > 1.0 || p_l_ano < 0.0 || p_l_ano > 1.0) {
        throw std::invalid_argument("logical error rates must lie in [0, 1]");
    }
    const double exposure = f_ano * tau_ano;
    if (f_ano < 0.0 || tau_ano < 0.0 || exposure > 1.0) {
        throw std::invalid_argument("f_ano * tau_ano must lie in [0, 1]");
    }
    EffectiveRate out;
    out.rate = (1.0 - exposure) * p_l + exposure * p_l_ano;
    if (p_l > 0.0) {
        out.ratio = exposure * p_l_ano / p_l;
        out.ratio_defined = true;
    }
    return out;
}

FirstOrderExponents first_order_exponents(int d, int d_ano) {
    if (d < 1 || d_ano < 0 || d_ano >= d) {
        throw std::invalid_argument("first_order_exponents needs 0 <= d_ano < d");
    }
    FirstOrderExponents e;
    e.normal = d / 2 + 1;
    e.uniform = d / 2 + 1 - d_ano;
    e.aware = (d - d_ano) / 2 + 1;
    e.defeated = e.uniform <= 0;
    return e;
}

DistanceReduction effective_distance_estimate(double pl_ano, double se_ano, double pl, double se, double pl_m2,
                                              double se_m2) {
    DistanceReduction out;
    if (pl_ano <= 0.0 || pl <= 0.0 || pl_m2 <= pl) {
        return out;
    }
    const double num = std::log(pl_ano) - std::log(pl);
    const double den = std::log(pl_m2) - std::log(pl);
    out.reduction = 2.0 * num / den;
    // Partial derivatives with respect to the logarithms of the three rates.
    const double g_ano = 2.0 / den;
    const double g_m2 = -2.0 * num / (den * den);
    const double g_pl = 2.0 * (num - den) / (den * den);
    const double s_ano = g_ano * se_ano / pl_ano;
    const double s_m2 = g_m2 * se_m2 / pl_m2;
    const double s_pl = g_pl * se / pl;
    out.standard_error = std::sqrt(s_ano * s_ano + s_m2 * s_m2 + s_pl * s_pl);
    out.valid = true;
    out.reportable = out.standard_error < 4.0;
    return out;
}

void MbbeParameters::validate() const {
    if (!(f_ano >= 0.0) || !(tau_ano > 0.0) || !(tau_cyc > 0.0) || !(p_over_pth > 0.0) || c_lat < 0 ||
        !(d_ano >= 0.0)) {
        throw std::invalid_argument("MBBE parameters must be positive");
    }
    if (f_ano * tau_ano >= 1.0) {
        throw std::invalid_argument("f_ano * tau_ano must be below 1");
    }
}

double scaling_logical_rate(double d_eff, double p_over_pth) {
    const double k = std::floor((d_eff + 1.0) / 2.0);
    return std::min(1.0, 0.1 * std::pow(p_over_pth, k));
}

double average_logical_rate(int d, double region_size, double events_per_cycle, double exposure_cycles, bool q3de,
                            double p_over_pth, double sim_cycles, std::uint64_t seed) {
    const double base = scaling_logical_rate(d, p_over_pth);
    if (events_per_cycle <= 0.0 || exposure_cycles <= 0.0 || region_size <= 0.0) {
        return base;
    }
    struct Hit {
        double begin;
        double end;
        double lo;
        double hi;
    };
    Rng rng(seed);
    std::vector<Hit> hits;
    for (double t = rng.exponential(events_per_cycle); t < sim_cycles; t += rng.exponential(events_per_cycle)) {
        const double x = -region_size + rng.uniform() * (d + region_size);
        hits.push_back({t, std::min(t + exposure_cycles, sim_cycles), std::max(x, 0.0), std::min(x + region_size,
                                                                                                double(d))});
    }
    if (hits.empty()) {
        return base;
    }
    std::vector<std::pair<double, int>> marks;  // (time, +/-(index+1))
    marks.reserve(2 * hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        marks.emplace_back(hits[i].begin, static_cast<int>(i) + 1);
        marks.emplace_back(hits[i].end, -static_cast<int>(i) - 1);
    }
    std::sort(marks.begin(), marks.end());
    const double factor = q3de ? 1.0 : 2.0;
    std::vector<int> active;
    double total = 0.0;
    double last = 0.0;
    for (const auto &[time, tag] : marks) {
        if (time > last) {
            double rate = base;
            if (!active.empty()) {
                std::vector<std::pair<double, double>> spans;
                for (int i : active) {
                    spans.emplace_back(hits[i].lo, hits[i].hi);
                }
                std::sort(spans.begin(), spans.end());
                double covered = 0.0;
                double lo = spans[0].first;
                double hi = spans[0].second;
                for (const auto &[a, b] : spans) {
                    if (a > hi) {
                        covered += hi - lo;
                        lo = a;
                        hi = b;
                    } else {
                        hi = std::max(hi, b);
                    }
                }
                covered += hi - lo;
                rate = scaling_logical_rate(d - factor * covered, p_over_pth);
            }
            total += (time - last) * rate;
            last = time;
        }
        if (tag > 0) {
            active.push_back(tag - 1);
        } else {
            active.erase(std::find(active.begin(), active.end(), -tag - 1));
        }
    }
    total += (sim_cycles - last) * base;
    return total / sim_cycles;
}

std::vector<ScalabilityPoint> scalability_sweep(const ScalabilityConfig &config) {
    config.params.validate();
    if (config.d_start < 1 || config.density_cap <= 0.0 || config.sim_cycles <= 0.0) {
        throw std::invalid_argument("invalid scalability configuration");
    }
    const auto &prm = config.params;
    std::vector<ScalabilityPoint> out;
    for (std::size_t ai = 0; ai < config.area_ratios.size(); ++ai) {
        const double area = config.area_ratios[ai];
        if (!(area > 0.0)) {
            throw std::invalid_argument("area ratios must be positive");
        }
        const double events = prm.f_ano * area * prm.tau_cyc;
        const double exposure =
            config.q3de ? std::min<double>(prm.c_lat, prm.tau_ano / prm.tau_cyc) : prm.tau_ano / prm.tau_cyc;
        const std::uint64_t seed = derive_seed(config.seed, {0x5ca1eULL, ai});
        ScalabilityPoint pt;
        pt.area_ratio = area;
        pt.q3de = config.q3de;
        pt.saturated = true;
        for (int d = config.d_start;; d += 2) {
            const double ratio = static_cast<double>(d) / config.d_start;
            const double density = ratio * ratio / area;
            if (density > config.density_cap) {
                break;
            }
            const double pl = average_logical_rate(d, prm.d_ano * std::sqrt(density), events, exposure, config.q3de,
                                                   prm.p_over_pth, config.sim_cycles, seed);
            pt.d = d;
            pt.density_ratio = density;
            pt.achieved_pl = pl;
            if (pl < config.target) {
                pt.saturated = false;
                break;
            }
        }
        if (pt.saturated) {
            pt.density_ratio = config.density_cap;
        }
        out.push_back(pt);
    }
    return out;
}

void write_scalability_header(std::ostream &out) { out << "area_ratio,density_ratio,mode,achieved_pl,d,saturated\n"; }

void write_scalability_row(std::ostream &out, const ScalabilityPoint &p) {
    out << p.area_ratio << ',' << p.density_ratio << ',' << (p.q3de ? "q3de" : "no_q3de") << ',' << p.achieved_pl
        << ',' << p.d << ',' << (p.saturated ? 1 : 0) << '\n';
}

}  // namespace q3de
