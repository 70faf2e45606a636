// gofperm: goodness-of-fit tests for linear regression calibrated by
// permutation of residuals.
//
//   gofperm test    --input data.csv --response y --covariates x1,x2 [...]
//   gofperm study   --scenario scenario.json --csv rates.csv --json summary.json
//   gofperm example steam [--out steam.csv]
//
// GOFPERM_THREADS sets the worker count; it changes speed only, never results.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gofperm/cli.hpp"

namespace {

void report_error(const std::string& kind, const std::string& message) {
    std::cerr << gofperm::error_json(kind, message).dump() << '\n';
}

void apply_thread_env() {
    if (const char* env = std::getenv("GOFPERM_THREADS")) {
        const int workers = std::atoi(env);
        if (workers > 0) gofperm::set_worker_count(workers);
    }
}

int run_study_command(const std::string& scenario_path, const std::string& csv_path,
                      const std::string& json_path, std::size_t reps_override, std::size_t perms_override) {
    std::ifstream in(scenario_path);
    if (!in) throw gofperm::Error(gofperm::ErrorKind::IoError, "cannot open '" + scenario_path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw gofperm::Error(gofperm::ErrorKind::ParseError, scenario_path + ": " + e.what());
    }
    gofperm::StudyConfig cfg = gofperm::parse_study_config(doc);
    if (reps_override > 0) cfg.reps = reps_override;
    if (perms_override > 0) cfg.test.n_perms = perms_override;

    const gofperm::MCResult result = gofperm::run_study(cfg.scenario, cfg.test, cfg.reps, cfg.alphas);
    const std::string csv = gofperm::study_csv(result);
    const std::string json = gofperm::study_json(result, cfg).dump(2) + "\n";

    std::vector<std::string> written;
    auto write = [&](const std::string& path, const std::string& body) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (f) written.push_back(path);
        f << body;
        f.close();
        if (!f) {
            for (const auto& p : written) std::remove(p.c_str());
            throw gofperm::Error(gofperm::ErrorKind::IoError, "cannot write '" + path + "'");
        }
    };
    if (csv_path.empty()) {
        std::cout << csv;
    } else {
        write(csv_path, csv);
    }
    if (!json_path.empty()) write(json_path, json);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Goodness-of-fit tests for linear regression via permutation of residuals"};
    app.require_subcommand(1);

    gofperm::RunConfig run;
    std::string covariates;
    auto* test_cmd = app.add_subcommand("test", "Run a goodness-of-fit test on a CSV file");
    test_cmd->add_option("-i,--input", run.input_path, "Input CSV with a header row");
    test_cmd->add_option("--example", run.example, "Use a bundled dataset instead of --input (steam)");
    test_cmd->add_option("-y,--response", run.response, "Response column")->required();
    test_cmd->add_option("-x,--covariates", covariates, "Comma-separated covariate columns, in model order");
    test_cmd->add_option("-t,--target", run.target, "full | covariate:<name> | subset:<name,...>")
        ->capture_default_str();
    test_cmd->add_option("-s,--statistic", run.statistic, "ks | cvm | both")->capture_default_str();
    test_cmd->add_option("-m,--method", run.method, "perm | rawperm | sw | wild | wild-mammen | residboot")
        ->capture_default_str();
    test_cmd->add_option("-K,--perms", run.perms, "Number of null replicates")->capture_default_str();
    test_cmd->add_option("--seed", run.seed, "Master seed")->capture_default_str();
    test_cmd->add_option("--traces", run.traces, "Replicate processes to keep for the trace CSV / SVG")
        ->capture_default_str();
    test_cmd->add_flag("--exhaustive", run.exhaustive, "Enumerate all n! permutations (n <= 8)");
    test_cmd->add_flag("--order-by-original", run.order_by_original,
                       "Order replicate residuals by the observed fit's keys");
    test_cmd->add_option("--json", run.json_path, "Result JSON path (default: stdout)");
    test_cmd->add_option("--trace-csv", run.trace_csv_path, "Trace table path (replicate_id,key,cum)");
    test_cmd->add_option("--svg", run.svg_path, "Envelope plot path");

    std::string scenario_path, study_csv_path, study_json_path;
    std::size_t reps_override = 0, perms_override = 0;
    auto* study_cmd = app.add_subcommand("study", "Run a Monte-Carlo size/power study from a scenario JSON");
    study_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    study_cmd->add_option("--csv", study_csv_path, "Rejection-rate CSV path (default: stdout)");
    study_cmd->add_option("--json", study_json_path, "Summary JSON path");
    study_cmd->add_option("--reps", reps_override, "Override the number of reps");
    study_cmd->add_option("--perms", perms_override, "Override the number of replicates per test");

    std::string example_name, example_out;
    auto* example_cmd = app.add_subcommand("example", "Print or save a bundled dataset");
    example_cmd->add_option("name", example_name, "Dataset name (steam)")->required();
    example_cmd->add_option("-o,--out", example_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("UsageError", e.what());
        return 2;
    }

    apply_thread_env();
    try {
        if (*test_cmd) {
            std::stringstream ss(covariates);
            for (std::string item; std::getline(ss, item, ',');) {
                if (!item.empty()) run.covariates.push_back(item);
            }
            const gofperm::RunArtifacts artifacts = gofperm::execute_run(run);
            gofperm::write_artifacts(run, artifacts);
            return 0;
        }
        if (*study_cmd) {
            return run_study_command(scenario_path, study_csv_path, study_json_path, reps_override, perms_override);
        }
        if (*example_cmd) {
            const auto body = gofperm::bundled_dataset(example_name);
            if (example_out.empty()) {
                std::cout << body;
            } else {
                std::ofstream f(example_out, std::ios::binary);
                f << body;
                if (!f) throw gofperm::Error(gofperm::ErrorKind::IoError, "cannot write '" + example_out + "'");
            }
            return 0;
        }
    } catch (const gofperm::Error& e) {
        report_error(std::string(gofperm::to_string(e.kind())), e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error("InternalError", e.what());
        return 1;
    }
    return 0;
}
