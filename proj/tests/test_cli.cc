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
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "oracles.h"
#include "q3de/csv.h"
#include "q3de/decoder.h"
#include "q3de/experiments.h"

namespace q3de {
namespace {

namespace fs = std::filesystem;

class TempDir {
   public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("q3de_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string &name) const { return path_ / name; }

   private:
    static inline int counter_ = 0;
    fs::path path_;
};

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(Q3DE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_rows(const fs::path &p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(in, line);) {
        rows.push_back(csv_split(line));
    }
    return rows;
}

TEST(Wilson, ReferenceValues) {
    const auto [lo0, hi0] = wilson_interval(0, 100, 3.0);
    EXPECT_EQ(lo0, 0.0);
    EXPECT_NEAR(hi0, 0.09 / 1.09, 1e-12);
    const auto [lo, hi] = wilson_interval(50, 100, 2.0);
    EXPECT_NEAR(lo + hi, 1.0, 1e-12);
    EXPECT_NEAR(hi - lo, 2.0 * 2.0 * std::sqrt(0.25 / 100 + 4.0 / 40000) / 1.04, 1e-12);
}

TEST(EstimatePl, ZeroNoiseNeverFails) {
    PlRequest req;
    req.d = 5;
    req.p = 0.0;
    req.trials = 2000;
    const PlEstimate e = estimate_pl(req);
    EXPECT_EQ(e.failures, 0);
    EXPECT_EQ(e.pl, 0.0);
    EXPECT_EQ(e.standard_error, 0.0);
}

TEST(EstimatePl, IndependentOfWorkerCount) {
    PlRequest req;
    req.d = 5;
    req.p = 2e-2;
    req.trials = 9000;
    req.chunk = 1000;
    req.seed = 77;
    req.workers = 1;
    const PlEstimate one = estimate_pl(req);
    req.workers = 3;
    const PlEstimate three = estimate_pl(req);
    EXPECT_EQ(one.failures, three.failures);
    EXPECT_GT(one.failures, 0);
}

TEST(EstimatePl, PerCycleNormalization) {
    PlRequest req;
    req.d = 5;
    req.p = 2e-2;
    req.trials = 4000;
    const PlEstimate e = estimate_pl(req);
    const double big_p = static_cast<double>(e.failures) / e.trials;
    EXPECT_DOUBLE_EQ(e.pl, big_p / 5);
    EXPECT_DOUBLE_EQ(e.standard_error, std::sqrt(big_p * (1 - big_p) / e.trials) / 5);
    req.exact_conversion = true;
    EXPECT_DOUBLE_EQ(estimate_pl(req).pl, 1.0 - std::pow(1.0 - big_p, 0.2));
}

TEST(EstimatePl, RejectsBadRequest) {
    PlRequest req;
    req.trials = 0;
    EXPECT_THROW(estimate_pl(req), std::invalid_argument);
    req.trials = 10;
    req.mode = "fast";
    EXPECT_THROW(estimate_pl(req), std::invalid_argument);
}

void check_against_reference(int d) {
    const double p = 1e-2;
    const long trials = 100000;
    const CodeGeometry geo = CodeGeometry::build(d);
    const NoiseModel noise = NoiseModel::phenomenological(p);
    SpeciesSampler sampler(geo, noise, Species::kZ, d);
    const DecodingGraph graph = DecodingGraph::from_code(geo, Species::kZ);
    DecoderConfig dc;
    dc.p = dc.p_meas = p;
    const WeightModel weights = weights_for(geo, Species::kZ, sampler.num_layers(), dc);
    Rng rng(derive_seed(1234, {static_cast<std::uint64_t>(d)}));
    SpeciesSampler::Shot shot;
    long ref_failures = 0;
    for (long i = 0; i < trials; ++i) {
        sampler.sample(rng, shot);
        const std::vector<Node> nodes(shot.active.begin(), shot.active.end());
        if (oracle::reference_logical_flip(graph, weights, sampler.num_layers(), nodes) != shot.logical_parity) {
            ++ref_failures;
        }
    }
    PlRequest req;
    req.d = d;
    req.p = p;
    req.trials = trials;
    req.seed = 99;
    const PlEstimate lib = estimate_pl(req);
    const double ref_pl = static_cast<double>(ref_failures) / trials / d;
    const double ref_se = std::sqrt(ref_pl * d * (1 - ref_pl * d) / trials) / d;
    EXPECT_NEAR(lib.pl, ref_pl, 3.0 * std::hypot(lib.standard_error, ref_se))
        << "library " << lib.failures << " vs reference " << ref_failures << " failures";
}

TEST(EstimatePl, AgreesWithReferenceDecoderDistance3) { check_against_reference(3); }

TEST(EstimatePl, AgreesWithReferenceDecoderDistance5) { check_against_reference(5); }

TEST(EstimatePl, AwareBeatsUniformWithRegion) {
    PlRequest req;
    req.d = 9;
    req.p = 1e-3;
    req.trials = 5000;
    req.region = centered_region(9, 4, 0.5);
    req.mode = "uniform_exact";
    const PlEstimate uniform = estimate_pl(req);
    req.mode = "aware_exact";
    const PlEstimate aware = estimate_pl(req);
    EXPECT_LT(aware.pl + 3.0 * std::hypot(aware.standard_error, uniform.standard_error), uniform.pl)
        << aware.failures << " vs " << uniform.failures;
}

TEST(Csv, EscapeAndSplitRoundTrip) {
    const std::vector<std::string> fields{"plain", "a,b", "say \"hi\"", "", "x\ny"};
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        line += (i ? "," : "") + csv_escape(fields[i]);
    }
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_split(line), fields);
}

TEST(Csv, PartialFileCommittedAtomically) {
    TempDir dir;
    const fs::path out = dir / "out.csv";
    {
        CsvFile f(out.string());
        f.row({"a", "b"});
        EXPECT_TRUE(fs::exists(out.string() + ".partial"));
        EXPECT_FALSE(fs::exists(out));
        EXPECT_EQ(slurp(out.string() + ".partial"), "a,b\n");
        f.commit();
    }
    EXPECT_FALSE(fs::exists(out.string() + ".partial"));
    EXPECT_EQ(slurp(out), "a,b\n");
}

TEST(Csv, DiscardRemovesPartial) {
    TempDir dir;
    const fs::path out = dir / "out.csv";
    CsvFile f(out.string());
    f.row({"x"});
    f.discard();
    EXPECT_FALSE(fs::exists(out.string() + ".partial"));
    EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, MemoryTable) {
    TempDir dir;
    const fs::path out = dir / "mem.csv";
    ASSERT_EQ(run_cli("memory_table --out " + out.string()), 0);
    const auto rows = read_rows(out);
    ASSERT_EQ(rows.size(), 10U);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"d", "c_win", "c_bat", "syndrome_queue_bits", "counter_bits",
                                                 "matching_queue_bits"}));
    bool found = false;
    for (const auto &r : rows) {
        if (r[0] == "31" && r[1] == "300") {
            found = true;
            EXPECT_EQ(std::lround(std::stod(r[3]) / 1000), 623);
            EXPECT_EQ(std::lround(std::stod(r[4]) / 1000), 16);
            EXPECT_EQ(std::lround(std::stod(r[5]) / 1000), 24);
        }
    }
    EXPECT_TRUE(found);
}

TEST(Cli, JsonSidecar) {
    TempDir dir;
    const fs::path out = dir / "mem.csv";
    ASSERT_EQ(run_cli("memory_table --seed 5 --d 11 --out " + out.string()), 0);
    const auto j = nlohmann::json::parse(slurp(out.string() + ".json"));
    EXPECT_EQ(j.at("experiment"), "memory_table");
    EXPECT_EQ(j.at("seed"), 5);
    EXPECT_EQ(j.at("schema_version"), 1);
    EXPECT_EQ(j.at("config").at("d"), "11");
    EXPECT_TRUE(j.contains("version"));
    EXPECT_GE(j.at("wall_time_seconds").get<double>(), 0.0);
}

TEST(Cli, LogicalErrorSweepSmoke) {
    TempDir dir;
    const fs::path out = dir / "sweep.csv";
    ASSERT_EQ(run_cli("logical_error_sweep --d 5 7 9 --p 1e-2 2e-2 --trials 1000 --out " + out.string()), 0);
    const auto rows = read_rows(out);
    ASSERT_EQ(rows.size(), 7U);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"d", "p", "mode", "d_ano", "p_ano", "trials", "failures", "pl",
                                                 "pl_se"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const long n = std::stol(rows[i][5]);
        const long k = std::stol(rows[i][6]);
        const int d = std::stoi(rows[i][0]);
        EXPECT_EQ(n, 1000);
        const double big_p = static_cast<double>(k) / n;
        EXPECT_NEAR(std::stod(rows[i][7]), big_p / d, 1e-11);
        EXPECT_NEAR(std::stod(rows[i][8]), std::sqrt(big_p * (1 - big_p) / n) / d, 1e-11);
    }
}

TEST(Cli, RerunIsByteIdentical) {
    TempDir dir;
    const std::string args = "logical_error_sweep --d 5 --p 2e-2 --trials 3000 --seed 11 --out ";
    ASSERT_EQ(run_cli(args + (dir / "a.csv").string() + " --workers 1"), 0);
    ASSERT_EQ(run_cli(args + (dir / "b.csv").string() + " --workers 3"), 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
}

TEST(Cli, ExperimentFlagAndConfigFile) {
    TempDir dir;
    const fs::path ini = dir / "run.ini";
    std::ofstream(ini) << "[memory_table]\nd = 21\nc_win = 100\n";
    const fs::path out = dir / "mem.csv";
    ASSERT_EQ(run_cli("--experiment memory_table --config " + ini.string() + " --out " + out.string()), 0);
    const auto rows = read_rows(out);
    ASSERT_EQ(rows.size(), 2U);
    EXPECT_EQ(rows[1][0], "21");
    EXPECT_EQ(rows[1][3], "100548");
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    const std::string out = " --out " + (dir / "x.csv").string();
    EXPECT_EQ(run_cli("memory_table --bogus 1" + out), 2);
    EXPECT_EQ(run_cli("memory_table --d 0" + out), 2);
    EXPECT_EQ(run_cli("no_such_experiment" + out), 2);
    EXPECT_EQ(run_cli("memory_table --config " + (dir / "missing.ini").string() + out), 2);
    EXPECT_FALSE(fs::exists(dir / "x.csv"));
    EXPECT_FALSE(fs::exists((dir / "x.csv").string() + ".partial"));
    EXPECT_EQ(run_cli("memory_table --out " + (dir / "no" / "dir" / "x.csv").string()), 3);
}

}  // namespace
}  // namespace q3de
