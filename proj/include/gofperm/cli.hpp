#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gofperm/engine.hpp"
#include "gofperm/io.hpp"
#include "gofperm/simlab.hpp"

namespace gofperm {

inline constexpr int kResultSchemaVersion = 1;

/// Options of `gofperm test`.
struct RunConfig {
    std::string input_path;       ///< CSV file; empty when example is set
    std::string example;          ///< bundled dataset name, used instead of input_path
    std::string response;
    std::vector<std::string> covariates;
    std::string target = "full";  ///< full | covariate:<name> | subset:<name,...>
    std::string statistic = "both";
    std::string method = "perm";
    std::size_t perms = 10000;
    std::uint64_t seed = 1;
    std::size_t traces = 0;
    bool exhaustive = false;
    bool order_by_original = false;
    std::string json_path;        ///< empty: JSON goes to stdout
    std::string trace_csv_path;
    std::string svg_path;
};

/// Resolves a target string against the dataset's column names.
/// @throws Error(UnknownColumn, InvalidArgument)
[[nodiscard]] OrderingKey parse_target(const std::string& target, const std::vector<std::string>& names);

/// Statistics named by "ks", "cvm" or "both"; the first entry is the primary one.
[[nodiscard]] std::vector<Statistic> parse_statistics(const std::string& spec);

[[nodiscard]] nlohmann::ordered_json result_json(const RunConfig& config, const Dataset& data,
                                                 const GofTestResult& result,
                                                 const std::vector<Statistic>& statistics);

/// Figure-style SVG: replicate step curves in gray, the observed curve in red.
[[nodiscard]] std::string render_svg(const GofTestResult& result, const std::string& key_label,
                                     Statistic annotated);

[[nodiscard]] nlohmann::ordered_json error_json(const std::string& kind, const std::string& message);

/// Rendered artifacts of one run, written by write_artifacts.
struct RunArtifacts {
    std::string json;
    std::string trace_csv;
    std::string svg;
};

/// Loads the data, runs the test and renders every requested artifact in memory.
[[nodiscard]] RunArtifacts execute_run(const RunConfig& config);

/// Writes artifacts; if any write fails, files already written by this call are removed.
/// @throws Error(IoError)
void write_artifacts(const RunConfig& config, const RunArtifacts& artifacts);

/// Options of `gofperm study`, read from a scenario JSON file.
struct StudyConfig {
    ScenarioSpec scenario;
    TestSpec test;
    std::string target = "full";
    std::size_t reps = 1000;
    std::vector<double> alphas{0.01, 0.05, 0.10};
};

/// @throws Error(InvalidParams) naming the offending field.
[[nodiscard]] StudyConfig parse_study_config(const nlohmann::json& doc);

/// CSV with columns scenario,statistic,alpha,rate,stderr,n_reps.
[[nodiscard]] std::string study_csv(const MCResult& result);
[[nodiscard]] nlohmann::ordered_json study_json(const MCResult& result, const StudyConfig& config);

}  // namespace gofperm
