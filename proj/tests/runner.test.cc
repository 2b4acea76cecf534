// Copyright 2026 The donorsim Authors
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


#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "donorsim/runner.h"
#include "gtest/gtest.h"
#include "json.hpp"

using namespace donorsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json spectrum_config() { return {{"experiment", "spectrum"}, {"seed", 1}}; }

bool has_issue(const std::vector<Issue> &issues, const std::string &path) {
    for (const auto &i : issues) {
        if (i.path == path) return true;
    }
    return false;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path scratch(const std::string &name) {
    fs::path p = fs::temp_directory_path() / ("donorsim_runner_" + name);
    fs::remove_all(p);
    return p;
}

uint64_t fnv1a(const std::string &s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

int cli(const std::string &args) {
    const int status = std::system((std::string(DONORSIM_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string &name, const json &j) {
    fs::path p = fs::temp_directory_path() / ("donorsim_cfg_" + name + ".json");
    std::ofstream(p) << j.dump(2);
    return p;
}

}  // namespace

TEST(runner_validate, minimal_spectrum_is_ok) {
    const auto r = validate_config(spectrum_config());
    EXPECT_TRUE(r.ok()) << r.str();
    EXPECT_TRUE(r.warnings.empty());
}

TEST(runner_validate, missing_seed_is_named) {
    json c = spectrum_config();
    c.erase("seed");
    const auto r = validate_config(c);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_issue(r.errors, "seed")) << r.str();
}

TEST(runner_validate, strong_exchange_warns_only) {
    json c = spectrum_config();
    c["spin"] = {{"j_mhz", 200.0}, {"a1_mhz", 112.0}, {"a2_mhz", 112.0}};
    const auto r = validate_config(c);
    EXPECT_TRUE(r.ok()) << r.str();
    EXPECT_TRUE(has_issue(r.warnings, "spin.j_mhz"));
}

TEST(runner_validate, reports_every_problem_with_paths) {
    json c = {{"experiment", "ramsey"},
              {"seed", -3},
              {"shots", 0},
              {"taus_us", {0.0, "x", 2.0}},
              {"noise", {{"t2_hahn_us", "forever"}, {"typo", 1}}},
              {"coherence", {{"target", "Q3"}}}};
    const auto r = validate_config(c);
    for (const char *p : {"seed", "shots", "taus_us[1]", "noise.t2_hahn_us", "noise.typo", "coherence.target"}) {
        EXPECT_TRUE(has_issue(r.errors, p)) << p << "\n" << r.str();
    }
}

TEST(runner_validate, per_kind_requirements) {
    EXPECT_TRUE(has_issue(validate_config({{"experiment", "hahn"}, {"seed", 1}}).errors, "taus_us"));
    EXPECT_TRUE(has_issue(validate_config({{"experiment", "nmr"}, {"seed", 1}}).errors, "experiment"));
    EXPECT_TRUE(has_issue(validate_config({{"seed", 1}}).errors, "experiment"));
    // A section belonging to another kind is rejected.
    json c = spectrum_config();
    c["gst"] = {{"device", "calibrated"}};
    EXPECT_TRUE(has_issue(validate_config(c).errors, "gst"));
    json g = {{"experiment", "gst-2q"}, {"seed", 1}, {"gst", {{"device", "perfect"}, {"max_lengths", {1, 0}}}}};
    const auto r = validate_config(g);
    EXPECT_TRUE(has_issue(r.errors, "gst.device"));
    EXPECT_TRUE(has_issue(r.errors, "gst.max_lengths"));
}

TEST(runner_validate, module_checks_are_filed_under_their_section) {
    json c = {{"experiment", "ramsey"}, {"seed", 1}, {"taus_us", {0.0}}, {"noise", {{"sigma_detuning_q2_mhz", -1.0}}}};
    EXPECT_TRUE(has_issue(validate_config(c).errors, "noise"));
    json s = spectrum_config();
    s["nuclei"] = "ux";
    EXPECT_TRUE(has_issue(validate_config(s).errors, "nuclei"));
}

TEST(runner_validate, run_rejects_invalid_configs) {
    json c = spectrum_config();
    c.erase("seed");
    EXPECT_THROW(run_experiment(c), ConfigError);
    EXPECT_NO_THROW(run_experiment(c, 5));
}

TEST(runner_hash, fnv1a_of_canonical_dump) {
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
    const json c = spectrum_config();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(c.dump())));
    EXPECT_EQ(config_hash(c), buf);
    const json reordered = json::parse(R"({"seed": 1, "experiment": "spectrum"})");
    EXPECT_EQ(config_hash(reordered), config_hash(c));
    EXPECT_NE(config_hash(c), config_hash(json{{"experiment", "spectrum"}, {"seed", 2}}));
}

TEST(runner_records, round_trip_is_lossless) {
    ResultRecord r;
    r.experiment_id = "x/y";
    r.kind = "spectrum";
    r.config_hash = "0123456789abcdef";
    r.seed = std::numeric_limits<uint64_t>::max();
    r.metrics["a"] = {0.1 + 0.2, "MHz"};
    r.metrics["b"] = {std::numeric_limits<double>::infinity(), "us"};
    r.metrics["c"] = {std::nan(""), "1"};
    r.metrics["d"] = {-std::numeric_limits<double>::infinity(), "us"};
    r.info["flag"] = "true";
    r.curves.push_back({"c1", "t", "us", "p", "1", {0.0, 1e-300, 3.0}, {1.0 / 3.0, 2.0, 5e300}, {0.01, 0.02, 0.03}});
    r.matrices.push_back({"m", 1, 2, {1.0, -2.5}, {0.0, 1.0 / 7.0}});
    r.matrices.push_back({"p", 1, 1, {std::sqrt(2.0)}, {}});
    const ResultRecord back = ResultRecord::from_json(json::parse(r.to_json().dump()));
    EXPECT_TRUE(back == r);
    EXPECT_TRUE(back.matrices[1].imag.empty());
}

TEST(runner_spectrum, four_lines_split_by_exchange) {
    const RunResult res = run_experiment(spectrum_config());
    ASSERT_EQ(res.records.size(), 1u);
    const ResultRecord &r = res.records[0];
    for (const char *k : {"line.q1_c_down", "line.q1_c_up", "line.q2_c_down", "line.q2_c_up"}) {
        ASSERT_TRUE(r.metrics.count(k)) << k;
        EXPECT_EQ(r.metrics.at(k).unit, "MHz");
    }
    EXPECT_NEAR(r.metrics.at("split.q1").value, 12.0, 0.5);
    EXPECT_NEAR(r.metrics.at("split.q2").value, 12.0, 0.5);
    EXPECT_EQ(r.curves.size(), 4u);
    for (const auto &c : r.curves) {
        // The pi pulse is resonant at the centre of each window.
        EXPECT_GT(c.y[c.y.size() / 2], 0.999) << c.name;
        EXPECT_LT(c.y.front(), 0.1) << c.name;
    }
}

TEST(runner_outputs, deterministic_and_atomic) {
    json c = {{"experiment", "ramsey"},
              {"seed", 11},
              {"shots", 200},
              {"noise", {{"sigma_detuning_q2_mhz", 0.05}}},
              {"taus_us", {{"start", 0.0}, {"stop", 10.0}, {"count", 11}}},
              {"coherence", {{"detuning_mhz", 0.2}}}};
    const fs::path a = scratch("a"), b = scratch("b") / "nested";
    const auto fa = write_outputs(run_experiment(c), a, output_prefix(c));
    const auto fb = write_outputs(run_experiment(c), b, output_prefix(c));
    ASSERT_EQ(fa.size(), 2u);
    ASSERT_EQ(fb.size(), 2u);
    for (size_t i = 0; i < fa.size(); ++i) {
        EXPECT_EQ(fa[i].filename(), fb[i].filename());
        EXPECT_EQ(slurp(fa[i]), slurp(fb[i]));
    }
    for (const auto &e : fs::directory_iterator(a)) EXPECT_NE(e.path().extension(), ".tmp");
    EXPECT_EQ(fa[0].filename(), "ramsey.jsonl");

    std::ifstream in(fa[0]);
    std::string line;
    std::getline(in, line);
    const ResultRecord back = ResultRecord::from_json(json::parse(line));
    EXPECT_EQ(back.config_hash, config_hash(c));
    EXPECT_EQ(back.seed, 11u);

    const RunResult other = run_experiment(c, 12);
    EXPECT_EQ(other.records[0].seed, 12u);
    EXPECT_NE(other.records[0].config_hash, back.config_hash);
    EXPECT_NE(other.records[0].curves[0].y, back.curves[0].y);
}

TEST(runner_bell, noiseless_pipeline) {
    json c = {{"experiment", "bell-tomography"}, {"seed", 3}, {"shots", 10000}};
    const ResultRecord r = run_experiment(c).records.at(0);
    EXPECT_GE(r.metrics.at("fidelity").value, 0.99);
    EXPECT_GE(r.metrics.at("concurrence").value, 0.98);
    ASSERT_EQ(r.matrices.size(), 1u);
    EXPECT_EQ(r.matrices[0].rows, 4);
    EXPECT_EQ(r.matrices[0].imag.size(), 16u);
}

TEST(runner_gst, small_noiseless_design) {
    json c = {{"experiment", "gst-1q-cond"},
              {"seed", 4},
              {"shots", 2000},
              {"gst", {{"device", "noiseless"}, {"max_lengths", {1, 2}}}}};
    const RunResult res = run_experiment(c);
    EXPECT_TRUE(res.converged);
    ASSERT_EQ(res.records.size(), 4u);
    EXPECT_EQ(res.records[0].experiment_id, "gst-1q-cond/Q1|Q2=down");
    for (const auto &r : res.records) {
        EXPECT_EQ(r.info.at("converged"), "true");
        EXPECT_GT(r.metrics.at("Gx.fidelity").value, 0.99);
        EXPECT_EQ(r.metrics.at("Gx.over_rotation").unit, "rad");
    }
}

TEST(runner_geometric, phase_matches_half_solid_angle) {
    json c = {{"experiment", "geometric-phase"}, {"seed", 1}};
    const ResultRecord r = run_experiment(c).records.at(0);
    EXPECT_LT(r.metrics.at("max_abs_difference").value, 1e-3);
    EXPECT_EQ(r.curves.size(), 3u);
}

TEST(runner_configs, shipped_configs_validate) {
    int n = 0;
    for (const auto &e : fs::directory_iterator(DONORSIM_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        ++n;
        std::ifstream f(e.path());
        const auto r = validate_config(json::parse(f));
        EXPECT_TRUE(r.ok()) << e.path() << "\n" << r.str();
        EXPECT_TRUE(r.warnings.empty()) << e.path();
    }
    EXPECT_GE(n, 8);
}

TEST(runner_cli, exit_codes) {
    const fs::path out = scratch("cli");
    EXPECT_EQ(cli("list-experiments"), 0);
    EXPECT_EQ(cli("validate " + write_config("ok", spectrum_config()).string()), 0);
    EXPECT_EQ(cli("validate " + write_config("bad", {{"experiment", "spectrum"}}).string()), 1);
    EXPECT_EQ(cli("run " + write_config("bad", {{"experiment", "spectrum"}}).string()), 1);
    EXPECT_EQ(cli("run /nonexistent/config.json"), 1);
    EXPECT_EQ(cli("run " + write_config("ok", spectrum_config()).string() + " --out-dir " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "spectrum.jsonl"));
    // Seed override on a config without a seed.
    EXPECT_EQ(cli("run " + write_config("noseed", {{"experiment", "spectrum"}}).string() + " --seed 3 --out-dir " +
                  out.string()),
              0);
    // A regular file where the output directory should go.
    EXPECT_EQ(cli("run " + write_config("ok", spectrum_config()).string() + " --out-dir " +
                  (out / "spectrum.jsonl").string()),
              2);
    json gst = {{"experiment", "gst-1q-cond"},
                {"seed", 4},
                {"shots", 1000},
                {"gst", {{"device", "calibrated"}, {"max_lengths", {1, 2}}, {"max_iterations", 1}}}};
    EXPECT_EQ(cli("run " + write_config("gst", gst).string() + " --out-dir " + out.string()), 3);
}
