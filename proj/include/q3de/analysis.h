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

#ifndef Q3DE_ANALYSIS_H
#define Q3DE_ANALYSIS_H

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace q3de {

struct EffectiveRate {
    double rate = 0.0;
    /// f_ano * tau_ano * p_L_ano / p_L; meaningless when ratio_defined is false.
    double ratio = 0.0;
    bool ratio_defined = false;
};

/// (1 - f tau) p_L + f tau p_L_ano, with the increase ratio.
EffectiveRate effective_rate(double p_l, double p_l_ano, double f_ano, double tau_ano);

struct FirstOrderExponents {
    int normal = 0;        // no anomaly
    int uniform = 0;       // anomaly, decoder unaware
    int aware = 0;         // anomaly, decoder re-weighted
    bool defeated = false; // uniform <= 0
};

/// Minimum number of normal-qubit errors causing a logical error:
/// floor(d/2)+1, floor(d/2)+1-d_ano and floor((d-d_ano)/2)+1.
FirstOrderExponents first_order_exponents(int d, int d_ano);

struct DistanceReduction {
    double reduction = 0.0;
    double standard_error = 0.0;
    /// False when p_L(d-2) <= p_L(d) or any rate is nonpositive.
    bool valid = false;
    /// valid and standard_error < 4.
    bool reportable = false;
};

/// d - d_eff = ln(pL_ano / pL) / (ln(pL(d-2) / pL) / 2), with first-order
/// error propagation of the three standard errors.
DistanceReduction effective_distance_estimate(double pl_ano, double se_ano, double pl, double se, double pl_m2,
                                              double se_m2);

struct MbbeParameters {
    double f_ano = 0.1;
    double tau_ano = 25e-3;
    double tau_cyc = 1e-6;
    double p_over_pth = 0.1;
    int c_lat = 30;
    double d_ano = 4.0;

    void validate() const;
};

/// 0.1 (p/p_th)^floor((d_eff+1)/2), capped at 1.
double scaling_logical_rate(double d_eff, double p_over_pth);

struct ScalabilityConfig {
    MbbeParameters params;
    std::vector<double> area_ratios;
    bool q3de = true;
    double target = 1e-10;
    int d_start = 11;
    double density_cap = 1e4;
    double sim_cycles = 1e8;
    std::uint64_t seed = 1;
};

struct ScalabilityPoint {
    double area_ratio = 0.0;
    double density_ratio = 0.0;
    bool q3de = true;
    double achieved_pl = 0.0;
    int d = 0;
    bool saturated = false;
};

/// Time-averaged logical error rate of one block at distance d with
/// anomalies arriving as a Poisson process. Each anomaly removes the part
/// of the logical path it overlaps (length c) for its exposure time; the
/// effective distance is d - c with awareness and d - 2c without.
double average_logical_rate(int d, double region_size, double events_per_cycle, double exposure_cycles, bool q3de,
                            double p_over_pth, double sim_cycles, std::uint64_t seed);

/// For each area ratio A, scans odd d upward from d_start with density
/// (d / d_start)^2 / A, anomaly rate f_ano * A and region size d_ano *
/// density, and reports the first d whose averaged rate is below target.
/// Points whose density would exceed the cap are saturated.
std::vector<ScalabilityPoint> scalability_sweep(const ScalabilityConfig &config);

void write_scalability_header(std::ostream &out);
void write_scalability_row(std::ostream &out, const ScalabilityPoint &point);

}  // namespace q3de

#endif  // Q3DE_ANALYSIS_H
