#pragma once

// Batch runner: loads a JSON experiment file, runs each experiment against
// the library, and writes report.csv and report.json.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ncindex {

struct RunOptions {
    std::filesystem::path config;
    std::filesystem::path out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_size;
    std::optional<int> fourier_cutoff;
    std::optional<double> tolerance;
    bool stretch = false;
};

struct Residual {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool ok() const { return value <= tolerance; }
};

struct ReportRow {
    std::string id;
    std::string kind;
    nlohmann::json inputs;
    std::vector<std::pair<std::string, double>> computed;
    std::vector<std::pair<std::string, double>> oracle;
    std::vector<Residual> residuals;
    std::uint64_t seed = 0;
    bool pass = false;
    std::string error_kind;
    std::string error_message;
    double wall_time = 0;
};

/// Validated experiment: kind-specific parameters with defaults filled in.
struct Experiment {
    std::string id;
    std::string kind;
    nlohmann::json params;
    std::uint64_t seed = 0;
};

/// Parses and validates a config document. Throws ConfigError on unknown
/// fields, bad types or non-positive tolerances.
std::vector<Experiment> parse_config(const nlohmann::json& doc, const RunOptions& opts);
std::vector<Experiment> load_config(const std::filesystem::path& path, const RunOptions& opts);

/// Runs one experiment; library errors become a failed row.
ReportRow run_experiment(const Experiment& e);
/// Runs all experiments concurrently; rows are sorted by id.
std::vector<ReportRow> run_experiments(const std::vector<Experiment>& experiments);

std::string report_csv(const std::vector<ReportRow>& rows);
nlohmann::json report_json(const std::vector<ReportRow>& rows);

/// Full pipeline. Returns 0 if every row passes, 2 on a failed check and 1
/// on a config or IO error (message written to `err`).
int run(const RunOptions& opts, std::string* err = nullptr);

}  // namespace ncindex
