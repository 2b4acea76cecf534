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


#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "donorsim/runner.h"
#include "json.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2, kNotConverged = 3 };

std::optional<nlohmann::json> load(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "error: " << path << ": cannot open\n";
        return std::nullopt;
    }
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error &e) {
        std::cerr << "error: " << path << ": " << e.what() << "\n";
        return std::nullopt;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"donor spin-qubit simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<uint64_t> seed;

    auto *run = app.add_subcommand("run", "run an experiment config and write its records");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out-dir", out_dir, "output directory");

    auto *validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "experiment config (JSON)")->required();

    auto *list = app.add_subcommand("list-experiments", "list the supported experiment kinds");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto &k : donorsim::experiment_kinds()) std::cout << k.name << "\t" << k.description << "\n";
        return kOk;
    }

    const auto config = load(config_path);
    if (!config) return kValidation;

    if (validate->parsed()) {
        const auto report = donorsim::validate_config(*config);
        std::cerr << report.str();
        if (report.ok()) std::cout << "ok\n";
        return report.ok() ? kOk : kValidation;
    }

    try {
        const auto result = donorsim::run_experiment(*config, seed);
        for (const auto &w : result.warnings) std::cerr << "warning: " << w.path << ": " << w.message << "\n";
        for (const auto &p : donorsim::write_outputs(result, out_dir, donorsim::output_prefix(*config))) {
            std::cout << p.string() << "\n";
        }
        if (!result.converged) {
            std::cerr << "error: estimator did not converge; records are flagged\n";
            return kNotConverged;
        }
    } catch (const donorsim::ConfigError &e) {
        std::cerr << e.report().str();
        return kValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kOk;
}
