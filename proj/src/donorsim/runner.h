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


#ifndef DONORSIM_RUNNER_H
#define DONORSIM_RUNNER_H

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace donorsim {

struct Issue {
    /// Dotted field path, e.g. "noise.t2_hahn_us" or "taus_us[3]".
    std::string path;
    std::string message;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    bool ok() const { return errors.empty(); }
    /// One "error: path: message" / "warning: ..." line per issue.
    std::string str() const;
};

class ConfigError : public std::runtime_error {
   public:
    explicit ConfigError(ValidationReport report);
    const ValidationReport &report() const { return report_; }

   private:
    ValidationReport report_;
};

struct ExperimentKind {
    std::string name;
    std::string description;
};

const std::vector<ExperimentKind> &experiment_kinds();

/// Structural and physical-range checks of a config; every problem is reported.
ValidationReport validate_config(const nlohmann::json &config);

/// FNV-1a (64 bit) of the canonical serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json &config);

struct Metric {
    double value = 0.0;
    std::string unit;
};

struct Curve {
    std::string name;
    std::string x_label, x_unit;
    std::string y_label, y_unit;
    std::vector<double> x, y;
    /// Empty when the curve is exact.
    std::vector<double> stderr_y;
};

/// Row-major; `imag` is empty for real matrices.
struct MatrixRecord {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::vector<double> real;
    std::vector<double> imag;
};

struct ResultRecord {
    std::string experiment_id;
    std::string kind;
    std::string config_hash;
    uint64_t seed = 0;
    std::map<std::string, Metric> metrics;
    std::map<std::string, std::string> info;
    std::vector<Curve> curves;
    std::vector<MatrixRecord> matrices;

    /// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
    nlohmann::json to_json() const;
    static ResultRecord from_json(const nlohmann::json &j);
    bool operator==(const ResultRecord &other) const;
};

struct RunResult {
    std::vector<ResultRecord> records;
    std::vector<Issue> warnings;
    /// False when an estimator reported non-convergence.
    bool converged = true;
};

/// Validates, then dispatches to the owning module. `seed` overrides the
/// config's seed. Throws ConfigError on invalid configs and std::runtime_error
/// (message prefixed with the experiment id) on downstream failures.
RunResult run_experiment(const nlohmann::json &config, std::optional<uint64_t> seed = std::nullopt);

/// Writes <prefix>.jsonl (one record per line) and, when any record has curves,
/// <prefix>.csv. Each file goes to a temporary name first and is renamed into place.
std::vector<std::filesystem::path> write_outputs(const RunResult &result, const std::filesystem::path &dir,
                                                 const std::string &prefix);

/// Output prefix: `output.prefix` of the config, else its `name`, else the kind.
std::string output_prefix(const nlohmann::json &config);

}  // namespace donorsim

#endif
