#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gofperm/cli.hpp"

namespace gofperm {

namespace {

std::size_t column_by_name(const std::vector<std::string>& names, const std::string& name) {
    for (std::size_t j = 1; j < names.size(); ++j) {
        if (names[j] == name) return j;
    }
    throw Error(ErrorKind::UnknownColumn, "target refers to '" + name + "', which is not a covariate of the model");
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

OrderingKey parse_target(const std::string& target, const std::vector<std::string>& names) {
    if (target == "full") return OrderingKey::full_model();
    const auto colon = target.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorKind::InvalidArgument,
                    "target must be full, covariate:<name> or subset:<name,...>, got '" + target + "'");
    }
    const std::string kind = target.substr(0, colon);
    const auto items = split_commas(target.substr(colon + 1));
    if (items.empty()) throw Error(ErrorKind::InvalidArgument, "target '" + target + "' names no covariate");
    if (kind == "covariate") {
        if (items.size() != 1) {
            throw Error(ErrorKind::InvalidArgument, "covariate target takes one name; use subset: for several");
        }
        return OrderingKey::covariate(column_by_name(names, items[0]));
    }
    if (kind == "subset") {
        std::vector<std::size_t> cols;
        for (const auto& item : items) cols.push_back(column_by_name(names, item));
        return OrderingKey::subset(std::move(cols));
    }
    throw Error(ErrorKind::InvalidArgument, "unknown target kind '" + kind + "'");
}

std::vector<Statistic> parse_statistics(const std::string& spec) {
    if (spec == "ks") return {Statistic::KS};
    if (spec == "cvm") return {Statistic::CvM};
    if (spec == "both") return {Statistic::KS, Statistic::CvM};
    throw Error(ErrorKind::InvalidArgument, "statistic must be ks, cvm or both, got '" + spec + "'");
}

RunArtifacts execute_run(const RunConfig& config) {
    if (config.perms < 1) throw Error(ErrorKind::InvalidArgument, "--perms must be >= 1");
    if (config.response.empty()) throw Error(ErrorKind::InvalidArgument, "a response column is required");

    CsvTable table;
    if (!config.example.empty()) {
        std::istringstream in{std::string(bundled_dataset(config.example))};
        table = read_csv(in, "example:" + config.example);
    } else {
        if (config.input_path.empty()) throw Error(ErrorKind::InvalidArgument, "an input CSV or --example is required");
        table = read_csv_file(config.input_path);
    }
    const Dataset data = dataset_from_table(table, config.response, config.covariates);
    const auto statistics = parse_statistics(config.statistic);

    TestSpec spec;
    spec.ordering = parse_target(config.target, data.column_names());
    spec.statistic = statistics.front();
    spec.method = NullMethod::parse(config.method);
    spec.n_perms = config.perms;
    spec.master_seed = config.seed;
    spec.collect_traces = config.traces;
    spec.order_by_original = config.order_by_original;

    const bool need_traces = !config.trace_csv_path.empty() || !config.svg_path.empty();
    if (need_traces && config.traces == 0) {
        throw Error(ErrorKind::NoTraces, "trace CSV or SVG output requested but --traces is 0");
    }

    const GofTestResult result = config.exhaustive ? exhaustive_test(data, spec) : run_test(data, spec);

    RunArtifacts out;
    out.json = result_json(config, data, result, statistics).dump(2) + "\n";
    if (!config.trace_csv_path.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, envelope(result));
        out.trace_csv = csv.str();
    }
    if (!config.svg_path.empty()) {
        std::string key_label = "fitted values";
        if (spec.ordering.kind == OrderingKey::Kind::Covariate) {
            key_label = data.column_names()[spec.ordering.columns[0]];
        } else if (spec.ordering.kind == OrderingKey::Kind::Subset) {
            key_label = "partial linear predictor (" + spec.ordering.label(data.column_names()).substr(7) + ")";
        }
        out.svg = render_svg(result, key_label, statistics.back());
    }
    return out;
}

void write_artifacts(const RunConfig& config, const RunArtifacts& artifacts) {
    std::vector<std::string> written;
    auto write = [&](const std::string& path, const std::string& body) {
        if (path.empty()) return;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (f) written.push_back(path);
        f << body;
        f.close();
        if (!f) {
            for (const auto& p : written) std::filesystem::remove(p);
            throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
        }
    };
    write(config.trace_csv_path, artifacts.trace_csv);
    write(config.svg_path, artifacts.svg);
    if (config.json_path.empty()) {
        std::fwrite(artifacts.json.data(), 1, artifacts.json.size(), stdout);
        std::fflush(stdout);
    } else {
        write(config.json_path, artifacts.json);
    }
}

StudyConfig parse_study_config(const nlohmann::json& doc) {
    auto field_error = [](const std::string& field, const std::string& what) {
        return Error(ErrorKind::InvalidParams, field + ": " + what);
    };
    if (!doc.is_object()) throw field_error("<root>", "scenario file must hold a JSON object");

    static const std::vector<std::string> known{"family", "n", "params", "seed", "test", "reps", "alphas"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw field_error(key, "unknown field");
        }
    }

    StudyConfig cfg;
    if (!doc.contains("family") || !doc["family"].is_string()) throw field_error("family", "required string");
    cfg.scenario.family = parse_family(doc["family"].get<std::string>());
    if (!doc.contains("n") || !doc["n"].is_number_unsigned()) throw field_error("n", "required positive integer");
    cfg.scenario.n = doc["n"].get<std::size_t>();
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw field_error("seed", "must be a non-negative integer");
        cfg.scenario.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw field_error("params", "must be an object of numbers");
        for (const auto& [k, v] : doc["params"].items()) {
            if (!v.is_number()) throw field_error("params." + k, "must be a number");
            cfg.scenario.params[k] = v.get<double>();
        }
    }
    if (doc.contains("reps")) {
        if (!doc["reps"].is_number_unsigned() || doc["reps"].get<std::size_t>() < 1) {
            throw field_error("reps", "must be a positive integer");
        }
        cfg.reps = doc["reps"].get<std::size_t>();
    }
    if (doc.contains("alphas")) {
        if (!doc["alphas"].is_array() || doc["alphas"].empty()) throw field_error("alphas", "must be a non-empty array");
        cfg.alphas.clear();
        for (const auto& a : doc["alphas"]) {
            if (!a.is_number() || !(a.get<double>() > 0.0 && a.get<double>() < 1.0)) {
                throw field_error("alphas", "entries must be numbers in (0, 1)");
            }
            cfg.alphas.push_back(a.get<double>());
        }
    }
    validate_scenario(cfg.scenario);

    cfg.test.n_perms = 200;
    if (doc.contains("test")) {
        const auto& t = doc["test"];
        if (!t.is_object()) throw field_error("test", "must be an object");
        for (const auto& [key, value] : t.items()) {
            if (key == "target") {
                if (!value.is_string()) throw field_error("test.target", "must be a string");
                cfg.target = value.get<std::string>();
            } else if (key == "method") {
                if (!value.is_string()) throw field_error("test.method", "must be a string");
                try {
                    cfg.test.method = NullMethod::parse(value.get<std::string>());
                } catch (const Error& e) {
                    throw field_error("test.method", e.what());
                }
            } else if (key == "perms") {
                if (!value.is_number_unsigned() || value.get<std::size_t>() < 1) {
                    throw field_error("test.perms", "must be a positive integer");
                }
                cfg.test.n_perms = value.get<std::size_t>();
            } else if (key == "order_by_original") {
                if (!value.is_boolean()) throw field_error("test.order_by_original", "must be a boolean");
                cfg.test.order_by_original = value.get<bool>();
            } else {
                throw field_error("test." + key, "unknown field");
            }
        }
    }
    std::vector<std::string> names{"(Intercept)"};
    for (std::size_t j = 1; j <= covariate_count(cfg.scenario.family); ++j) names.push_back("x" + std::to_string(j));
    try {
        cfg.test.ordering = parse_target(cfg.target, names);
    } catch (const Error& e) {
        throw field_error("test.target", e.what());
    }
    return cfg;
}

}  // namespace gofperm
