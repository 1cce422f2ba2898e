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

// Experiment harness. Each experiment is a subcommand; options may also come
// from an INI file with one [section] per experiment.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "q3de/analysis.h"
#include "q3de/csv.h"
#include "q3de/experiments.h"
#include "q3de/logical_plane.h"
#include "q3de/pipeline.h"
#include "q3de/rng.h"

#ifndef Q3DE_VERSION
#define Q3DE_VERSION "0.0.0"
#endif

namespace {

using q3de::CsvFile;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out;
    long trials = 0;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
}

template <typename T>
void require_nonempty(const std::vector<T> &v, const std::string &name) {
    if (v.empty()) {
        throw ConfigError(name + " must not be empty");
    }
}

void require(bool ok, const std::string &message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

long trials_or(const Globals &g, long fallback) { return g.trials > 0 ? g.trials : fallback; }

// ---------------------------------------------------------------------------

struct SweepOptions {
    std::vector<int> d{5, 7, 9};
    std::vector<double> p{5e-3, 1e-2, 2e-2};
    std::vector<std::string> modes{"uniform_exact"};
    int d_ano = 0;
    double p_ano = 0.5;
    bool exact_conversion = false;
};

void run_logical_error_sweep(const SweepOptions &o, const Globals &g, CsvFile &csv) {
    require_nonempty(o.d, "d");
    require_nonempty(o.p, "p");
    require_nonempty(o.modes, "modes");
    for (int d : o.d) {
        require(d >= 2, "d must be at least 2");
        require(o.d_ano >= 0 && o.d_ano <= d, "d_ano must lie in [0, d]");
    }
    for (double p : o.p) {
        require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
        require(o.d_ano == 0 || (o.p_ano >= p && o.p_ano <= 1.0), "p_ano must lie in [p, 1]");
    }
    for (const auto &m : o.modes) {
        q3de::decoder_config_from_name(m, 1e-3, 1e-3, std::nullopt);
    }
    const long trials = trials_or(g, 100000);
    csv.row({"d", "p", "mode", "d_ano", "p_ano", "trials", "failures", "pl", "pl_se"});
    for (std::size_t di = 0; di < o.d.size(); ++di) {
        for (std::size_t pi = 0; pi < o.p.size(); ++pi) {
            for (std::size_t mi = 0; mi < o.modes.size(); ++mi) {
                q3de::PlRequest req;
                req.d = o.d[di];
                req.p = o.p[pi];
                req.mode = o.modes[mi];
                req.trials = trials;
                req.workers = g.workers;
                req.exact_conversion = o.exact_conversion;
                if (o.d_ano > 0) {
                    req.region = q3de::centered_region(req.d, o.d_ano, o.p_ano);
                }
                req.seed = q3de::derive_seed(g.seed, {di, pi, mi});
                const q3de::PlEstimate e = q3de::estimate_pl(req);
                csv.row({std::to_string(req.d), fmt(req.p), req.mode, std::to_string(o.d_ano),
                         fmt(o.d_ano > 0 ? o.p_ano : 0.0), std::to_string(e.trials), std::to_string(e.failures),
                         fmt(e.pl), fmt(e.standard_error)});
            }
        }
    }
}

// ---------------------------------------------------------------------------

void run_detection_eval(q3de::DetectionEvalConfig o, const Globals &g, CsvFile &csv) {
    require(o.d >= 3, "d must be at least 3");
    require(o.p > 0.0 && o.p < 1.0, "p must lie in (0, 1)");
    require(o.p_ano_ratio >= 1.0, "p_ano_ratio must be at least 1");
    require(o.d_ano >= 1 && o.d_ano <= o.d, "d_ano must lie in [1, d]");
    require(o.alpha > 0.0 && o.alpha < 1.0, "alpha must lie in (0, 1)");
    require(o.n_th >= 1, "n_th must be positive");
    require(o.c_win >= 0, "c_win must be non-negative");
    require(o.c_win_lo >= 1 && o.c_win_lo <= o.c_win_hi, "need 1 <= c_win_lo <= c_win_hi");
    o.trials = static_cast<int>(trials_or(g, o.trials));
    o.seed = g.seed;
    o.workers = g.workers;
    const q3de::DetectionEvalResult r = q3de::detection_eval(o);
    csv.row({"d", "p", "p_ano", "d_ano", "alpha", "n_th", "c_win", "threshold", "mu", "sigma", "trials",
             "false_positive", "true_negative", "detected", "median_position_error", "median_latency",
             "max_latency"});
    csv.row({std::to_string(o.d), fmt(o.p), fmt(std::min(o.p * o.p_ano_ratio, 2.0 / 3.0)), std::to_string(o.d_ano),
             fmt(o.alpha), std::to_string(o.n_th), std::to_string(r.c_win), fmt(r.threshold), fmt(r.calibration.mu),
             fmt(r.calibration.sigma), std::to_string(r.rates.trials), fmt(r.rates.false_positive),
             fmt(r.rates.true_negative), std::to_string(r.detected), fmt(r.median_position_error),
             fmt(r.median_latency), std::to_string(r.max_latency)});
}

// ---------------------------------------------------------------------------

struct RollbackOptions {
    std::vector<int> d{9, 11, 13};
    std::vector<double> p{1e-3};
    std::vector<int> d_ano{2, 4};
    double p_ano = 0.5;
    std::string matcher = "exact";
};

void run_rollback_compare(const RollbackOptions &o, const Globals &g, CsvFile &csv) {
    require_nonempty(o.d, "d");
    require_nonempty(o.p, "p");
    require_nonempty(o.d_ano, "d_ano");
    require(o.matcher == "exact" || o.matcher == "greedy", "matcher must be exact or greedy");
    for (int d : o.d) {
        require(d >= 5, "d must be at least 5");
        for (int a : o.d_ano) {
            require(a >= 1 && a < d, "d_ano must lie in [1, d)");
        }
    }
    for (double p : o.p) {
        require(p > 0.0 && p <= o.p_ano && o.p_ano <= 1.0, "need 0 < p <= p_ano <= 1");
    }
    const long trials = trials_or(g, 100000);
    csv.row({"d", "p", "d_ano", "p_ano", "trials", "pl_normal", "pl_normal_se", "pl_normal_m2", "pl_normal_m2_se",
             "pl_uniform", "pl_uniform_se", "pl_aware", "pl_aware_se", "reduction_uniform", "reduction_uniform_se",
             "reduction_aware", "reduction_aware_se"});
    for (std::size_t di = 0; di < o.d.size(); ++di) {
        for (std::size_t pi = 0; pi < o.p.size(); ++pi) {
            for (std::size_t ai = 0; ai < o.d_ano.size(); ++ai) {
                const auto row = q3de::rollback_compare(o.d[di], o.p[pi], o.d_ano[ai], o.p_ano, trials,
                                                        q3de::derive_seed(g.seed, {di, pi, ai}), g.workers,
                                                        o.matcher);
                auto red = [](const q3de::DistanceReduction &r) {
                    return r.valid ? fmt(r.reduction) : std::string("nan");
                };
                auto red_se = [](const q3de::DistanceReduction &r) {
                    return r.valid ? fmt(r.standard_error) : std::string("nan");
                };
                csv.row({std::to_string(row.d), fmt(row.p), std::to_string(row.d_ano), fmt(row.p_ano),
                         std::to_string(trials), fmt(row.normal.pl), fmt(row.normal.standard_error),
                         fmt(row.normal_m2.pl), fmt(row.normal_m2.standard_error), fmt(row.uniform.pl),
                         fmt(row.uniform.standard_error), fmt(row.aware.pl), fmt(row.aware.standard_error),
                         red(row.reduction_uniform), red_se(row.reduction_uniform), red(row.reduction_aware),
                         red_se(row.reduction_aware)});
            }
        }
    }
}

// ---------------------------------------------------------------------------

struct MbbeOptions {
    std::string preset = "standard";
    double f_ano = -1.0;
    double tau_ano = 25e-3;
    double tau_cyc = 1e-6;
    double p_over_pth = 0.1;
    int c_lat = 30;
    double d_ano = 4.0;

    q3de::MbbeParameters params() const {
        q3de::MbbeParameters prm;
        if (preset == "standard") {
            prm.f_ano = 0.1;
        } else if (preset == "observed_x10") {
            prm.f_ano = 1.0;
        } else {
            throw ConfigError("preset must be standard or observed_x10");
        }
        if (f_ano >= 0.0) {
            prm.f_ano = f_ano;
        }
        prm.tau_ano = tau_ano;
        prm.tau_cyc = tau_cyc;
        prm.p_over_pth = p_over_pth;
        prm.c_lat = c_lat;
        prm.d_ano = d_ano;
        try {
            prm.validate();
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
        return prm;
    }
};

void add_mbbe_options(CLI::App *sub, MbbeOptions &o) {
    sub->add_option("--preset", o.preset, "standard (f_ano = 0.1 Hz) or observed_x10 (f_ano = 1 Hz)")
        ->capture_default_str();
    sub->add_option("--f_ano", o.f_ano, "MBBE frequency per unit area in Hz; overrides the preset");
    sub->add_option("--tau_ano", o.tau_ano, "MBBE lifetime in seconds")->capture_default_str();
    sub->add_option("--tau_cyc", o.tau_cyc, "code cycle in seconds")->capture_default_str();
    sub->add_option("--p_over_pth", o.p_over_pth, "physical rate over threshold")->capture_default_str();
    sub->add_option("--c_lat", o.c_lat, "detection latency in cycles")->capture_default_str();
    sub->add_option("--d_ano", o.d_ano, "MBBE diameter at baseline density")->capture_default_str();
}

struct ScalabilityOptions {
    MbbeOptions mbbe;
    std::vector<double> area{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
    std::vector<std::string> modes{"q3de", "no_q3de"};
    double target = 1e-10;
    double density_cap = 1e4;
    double sim_cycles = 1e8;
};

void run_scalability(const ScalabilityOptions &o, const Globals &g, CsvFile &csv) {
    require_nonempty(o.area, "area");
    require_nonempty(o.modes, "modes");
    require(o.target > 0.0 && o.target < 1.0, "target must lie in (0, 1)");
    require(o.density_cap > 0.0 && o.sim_cycles > 0.0, "density_cap and sim_cycles must be positive");
    for (double a : o.area) {
        require(a > 0.0, "area ratios must be positive");
    }
    q3de::ScalabilityConfig cfg;
    cfg.params = o.mbbe.params();
    cfg.area_ratios = o.area;
    cfg.target = o.target;
    cfg.density_cap = o.density_cap;
    cfg.sim_cycles = o.sim_cycles;
    cfg.seed = g.seed;
    q3de::write_scalability_header(csv.stream());
    csv.end_row();
    for (const auto &m : o.modes) {
        require(m == "q3de" || m == "no_q3de", "modes must be q3de or no_q3de");
        cfg.q3de = m == "q3de";
        for (const auto &pt : q3de::scalability_sweep(cfg)) {
            q3de::write_scalability_row(csv.stream(), pt);
            csv.end_row();
        }
    }
}

// ---------------------------------------------------------------------------

struct ThroughputOptions {
    std::vector<std::string> modes{"no_mbbe", "q3de", "baseline_doubled_d"};
    std::vector<long> duration{1100, 11000, 110000};
    std::vector<double> f_ano{0.1, 1.0, 10.0};
    int grid = 11;
    int d = 11;
    int d_ano = 4;
    double tau_cyc = 1e-6;
    int lookahead = 64;
    long max_ticks = 10000000;
};

void run_throughput(const ThroughputOptions &o, const Globals &g, CsvFile &csv) {
    require_nonempty(o.modes, "modes");
    require_nonempty(o.duration, "duration");
    require_nonempty(o.f_ano, "f_ano");
    require(o.grid >= 3 && o.grid % 2 == 1, "grid must be odd and at least 3");
    require(o.d >= 3 && o.d_ano >= 1 && o.d_ano < o.d, "need d >= 3 and 1 <= d_ano < d");
    require(o.tau_cyc > 0.0 && o.lookahead >= 1 && o.max_ticks >= 1, "tau_cyc, lookahead, max_ticks must be positive");
    for (long t : o.duration) {
        require(t >= 1, "duration must be positive");
    }
    for (double f : o.f_ano) {
        require(f >= 0.0, "f_ano must be non-negative");
    }
    std::vector<q3de::ThroughputMode> modes;
    for (const auto &m : o.modes) {
        try {
            modes.push_back(q3de::throughput_mode_from_name(m));
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
    }
    q3de::write_throughput_header(csv.stream());
    csv.end_row();
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        for (std::size_t ti = 0; ti < o.duration.size(); ++ti) {
            for (std::size_t fi = 0; fi < o.f_ano.size(); ++fi) {
                q3de::ThroughputConfig cfg;
                cfg.mode = modes[mi];
                cfg.n_instr = static_cast<int>(trials_or(g, 10000));
                cfg.grid_rows = cfg.grid_cols = o.grid;
                cfg.d = o.d;
                cfg.d_ano = o.d_ano;
                cfg.tau_cyc = o.tau_cyc;
                cfg.f_ano = o.f_ano[fi];
                cfg.duration_cycles = o.duration[ti];
                cfg.lookahead = o.lookahead;
                cfg.max_ticks = o.max_ticks;
                cfg.seed = q3de::derive_seed(g.seed, {ti, fi});
                const q3de::ThroughputResult r = q3de::throughput_experiment(cfg);
                q3de::write_throughput_row(csv.stream(), cfg, r);
                csv.end_row();
            }
        }
    }
}

// ---------------------------------------------------------------------------

struct MemoryOptions {
    std::vector<int> d{11, 21, 31};
    std::vector<int> c_win{100, 300, 1000};
};

void run_memory_table(const MemoryOptions &o, const Globals &, CsvFile &csv) {
    require_nonempty(o.d, "d");
    require_nonempty(o.c_win, "c_win");
    csv.row({"d", "c_win", "c_bat", "syndrome_queue_bits", "counter_bits", "matching_queue_bits"});
    for (int d : o.d) {
        require(d >= 1, "d must be positive");
        for (int c : o.c_win) {
            require(c >= 0, "c_win must be non-negative");
            const q3de::MemoryFootprint m = q3de::memory_footprint(d, c);
            csv.row({std::to_string(d), std::to_string(c), std::to_string(q3de::batch_size(c)),
                     fmt(m.syndrome_queue_bits), fmt(m.counter_bits), fmt(m.matching_queue_bits)});
        }
    }
}

// ---------------------------------------------------------------------------

struct RateOptions {
    MbbeOptions mbbe;
    std::vector<int> d{11, 13, 15, 17, 19, 21, 23, 25};
};

void run_effective_rate(const RateOptions &o, const Globals &, CsvFile &csv) {
    require_nonempty(o.d, "d");
    const q3de::MbbeParameters prm = o.mbbe.params();
    csv.row({"d", "d_ano", "f_ano", "tau_ano", "p_l", "p_l_ano", "effective_rate", "ratio"});
    for (int d : o.d) {
        require(d >= 1, "d must be positive");
        const double p_l = q3de::scaling_logical_rate(d, prm.p_over_pth);
        const double p_l_ano = q3de::scaling_logical_rate(d - 2.0 * prm.d_ano, prm.p_over_pth);
        const q3de::EffectiveRate r = q3de::effective_rate(p_l, p_l_ano, prm.f_ano, prm.tau_ano);
        csv.row({std::to_string(d), fmt(prm.d_ano), fmt(prm.f_ano), fmt(prm.tau_ano), fmt(p_l), fmt(p_l_ano),
                 fmt(r.rate), r.ratio_defined ? fmt(r.ratio) : std::string("nan")});
    }
}

// ---------------------------------------------------------------------------

json options_json(const CLI::App *app) {
    json j = json::object();
    for (const CLI::Option *opt : app->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config" || name == "version") {
            continue;
        }
        const auto &res = opt->results();
        if (!res.empty()) {
            j[name] = res.size() == 1 ? json(res.front()) : json(res);
        } else if (!opt->get_default_str().empty()) {
            j[name] = opt->get_default_str();
        }
    }
    return j;
}

// Turns "--experiment NAME" into the subcommand NAME.
std::vector<std::string> rewrite_args(int argc, char **argv) {
    std::vector<std::string> args;
    std::string experiment;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--experiment" && i + 1 < argc) {
            experiment = argv[++i];
        } else if (a.rfind("--experiment=", 0) == 0) {
            experiment = a.substr(13);
        } else {
            args.push_back(a);
        }
    }
    if (!experiment.empty()) {
        args.insert(args.begin(), experiment);
    }
    return args;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Monte Carlo experiments for MBBE-tolerant surface-code decoding"};
    app.set_version_flag("--version", Q3DE_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI file; keys of [experiment] sections set that experiment's options");

    Globals g;
    g.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--seed", g.seed, "master seed")->capture_default_str();
    app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "output CSV path (default <experiment>.csv)");
    app.add_option("--trials", g.trials, "trials per point (instructions for throughput)")
        ->check(CLI::PositiveNumber);

    std::map<std::string, std::function<void(CsvFile &)>> runners;

    SweepOptions sweep;
    auto *s = app.add_subcommand("logical_error_sweep", "logical error rate per cycle over (d, p, mode)");
    s->add_option("--d", sweep.d, "code distances")->delimiter(',')->capture_default_str();
    s->add_option("--p", sweep.p, "physical error rates")->delimiter(',')->capture_default_str();
    s->add_option("--modes", sweep.modes, "uniform_exact, uniform_greedy, aware_exact, aware_greedy")
        ->delimiter(',')
        ->capture_default_str();
    s->add_option("--d_ano", sweep.d_ano, "centered anomalous region size; 0 for none")->capture_default_str();
    s->add_option("--p_ano", sweep.p_ano, "error rate inside the region")->capture_default_str();
    s->add_flag("--exact_conversion", sweep.exact_conversion, "per-cycle rate as 1 - (1 - P)^(1/d)");
    runners["logical_error_sweep"] = [&](CsvFile &csv) { run_logical_error_sweep(sweep, g, csv); };

    q3de::DetectionEvalConfig det;
    s = app.add_subcommand("detection_eval", "anomaly detector false-positive and miss rates");
    s->add_option("--d", det.d)->capture_default_str();
    s->add_option("--p", det.p)->capture_default_str();
    s->add_option("--p_ano_ratio", det.p_ano_ratio, "p_ano / p")->capture_default_str();
    s->add_option("--d_ano", det.d_ano)->capture_default_str();
    s->add_option("--alpha", det.alpha)->capture_default_str();
    s->add_option("--n_th", det.n_th)->capture_default_str();
    s->add_option("--c_win", det.c_win, "window size; 0 selects it automatically")->capture_default_str();
    s->add_option("--c_win_lo", det.c_win_lo)->capture_default_str();
    s->add_option("--c_win_hi", det.c_win_hi)->capture_default_str();
    s->add_option("--target", det.target, "rate target for window selection")->capture_default_str();
    s->add_option("--selection_trials", det.selection_trials)->capture_default_str();
    s->add_option("--calibration_cycles", det.calibration_cycles)->capture_default_str();
    runners["detection_eval"] = [&](CsvFile &csv) { run_detection_eval(det, g, csv); };

    RollbackOptions rb;
    s = app.add_subcommand("rollback_compare", "uniform vs anomaly-aware decoding under an active region");
    s->add_option("--d", rb.d)->delimiter(',')->capture_default_str();
    s->add_option("--p", rb.p)->delimiter(',')->capture_default_str();
    s->add_option("--d_ano", rb.d_ano)->delimiter(',')->capture_default_str();
    s->add_option("--p_ano", rb.p_ano)->capture_default_str();
    s->add_option("--matcher", rb.matcher, "exact or greedy")->capture_default_str();
    runners["rollback_compare"] = [&](CsvFile &csv) { run_rollback_compare(rb, g, csv); };

    ScalabilityOptions sc;
    s = app.add_subcommand("scalability", "minimum qubit density reaching the target rate per chip area");
    add_mbbe_options(s, sc.mbbe);
    s->add_option("--area", sc.area, "chip area ratios")->delimiter(',')->capture_default_str();
    s->add_option("--modes", sc.modes, "q3de, no_q3de")->delimiter(',')->capture_default_str();
    s->add_option("--target", sc.target)->capture_default_str();
    s->add_option("--density_cap", sc.density_cap)->capture_default_str();
    s->add_option("--sim_cycles", sc.sim_cycles)->capture_default_str();
    runners["scalability"] = [&](CsvFile &csv) { run_scalability(sc, g, csv); };

    ThroughputOptions tp;
    s = app.add_subcommand("throughput", "logical-plane instruction throughput under MBBE outages");
    s->add_option("--modes", tp.modes, "no_mbbe, q3de, baseline_doubled_d")->delimiter(',')->capture_default_str();
    s->add_option("--duration", tp.duration, "outage durations in code cycles")->delimiter(',')->capture_default_str();
    s->add_option("--f_ano", tp.f_ano, "MBBE frequency per block in Hz")->delimiter(',')->capture_default_str();
    s->add_option("--grid", tp.grid)->capture_default_str();
    s->add_option("--d", tp.d)->capture_default_str();
    s->add_option("--d_ano", tp.d_ano)->capture_default_str();
    s->add_option("--tau_cyc", tp.tau_cyc)->capture_default_str();
    s->add_option("--lookahead", tp.lookahead)->capture_default_str();
    s->add_option("--max_ticks", tp.max_ticks)->capture_default_str();
    runners["throughput"] = [&](CsvFile &csv) { run_throughput(tp, g, csv); };

    MemoryOptions mem;
    s = app.add_subcommand("memory_table", "decoder queue sizes over (d, c_win)");
    s->add_option("--d", mem.d)->delimiter(',')->capture_default_str();
    s->add_option("--c_win", mem.c_win)->delimiter(',')->capture_default_str();
    runners["memory_table"] = [&](CsvFile &csv) { run_memory_table(mem, g, csv); };

    RateOptions er;
    s = app.add_subcommand("effective_rate", "time-averaged logical rate with and without MBBEs");
    add_mbbe_options(s, er.mbbe);
    s->add_option("--d", er.d)->delimiter(',')->capture_default_str();
    runners["effective_rate"] = [&](CsvFile &csv) { run_effective_rate(er, g, csv); };

    std::vector<std::string> args = rewrite_args(argc, argv);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    const CLI::App *selected = app.get_subcommands().front();
    const std::string name = selected->get_name();
    const std::string out = g.out.empty() ? name + ".csv" : g.out;
    const auto start = std::chrono::steady_clock::now();
    std::optional<CsvFile> csv;
    try {
        csv.emplace(out);
        runners.at(name)(*csv);
        csv->commit();
    } catch (const ConfigError &e) {
        csv->discard();
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument &e) {
        csv->discard();
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json meta;
    meta["experiment"] = name;
    meta["schema_version"] = kSchemaVersion;
    meta["version"] = Q3DE_VERSION;
    meta["seed"] = g.seed;
    meta["workers"] = g.workers;
    meta["config"] = options_json(selected);
    if (g.trials > 0) {
        meta["config"]["trials"] = g.trials;
    }
    meta["output"] = out;
    meta["wall_time_seconds"] = wall;
    std::ofstream side(out + ".json");
    side << meta.dump(2) << '\n';
    if (!side) {
        std::cerr << "error: cannot write " << out << ".json\n";
        return kExitRuntime;
    }
    return 0;
}
