#include "gofperm/simlab.hpp"

#include <cmath>
#include <exception>
#include <set>

#include "gofperm/rng.hpp"

namespace gofperm {

namespace {

constexpr double kIntercept = -0.1;
constexpr double kFixedSlope = 0.25;

struct FamilyInfo {
    Family family;
    const char* name;
    std::size_t covariates;
    std::vector<std::string> required;
    std::map<std::string, double> defaults;
};

const std::vector<FamilyInfo>& families() {
    static const std::vector<FamilyInfo> table = {
        {Family::NullNormal, "NullNormal", 2, {"beta1", "beta2", "sigma2"}, {}},
        {Family::NullGamma, "NullGamma", 2, {"beta1", "beta2", "a", "s"}, {}},
        {Family::NullHetero, "NullHetero", 2, {"beta1", "beta2", "theta"}, {}},
        {Family::QuadraticOmission, "QuadraticOmission", 2, {"beta1", "beta3"},
         {{"beta2", kFixedSlope}, {"sigma2", 0.1}}},
        {Family::InteractionOmission, "InteractionOmission", 2, {"beta1", "beta3"},
         {{"beta2", kFixedSlope}, {"sigma2", 0.1}}},
        {Family::PartialQuadratic5, "PartialQuadratic5", 5, {"beta6"}, {{"sigma2", 0.1}}},
        {Family::PartialInteraction5, "PartialInteraction5", 5, {"beta6"}, {{"sigma2", 0.1}}},
    };
    return table;
}

const FamilyInfo& info(Family f) {
    for (const auto& fi : families()) {
        if (fi.family == f) return fi;
    }
    throw Error(ErrorKind::InvalidParams, "unknown family");
}

double param(const ScenarioSpec& sc, const std::string& key) {
    if (auto it = sc.params.find(key); it != sc.params.end()) return it->second;
    const auto& d = info(sc.family).defaults;
    return d.at(key);
}

}  // namespace

std::string to_string(Family f) { return info(f).name; }

Family parse_family(const std::string& name) {
    for (const auto& fi : families()) {
        if (name == fi.name) return fi.family;
    }
    throw Error(ErrorKind::InvalidParams, "family: unknown scenario family '" + name + "'");
}

std::size_t covariate_count(Family f) noexcept {
    switch (f) {
        case Family::PartialQuadratic5:
        case Family::PartialInteraction5: return 5;
        default: return 2;
    }
}

void validate_scenario(const ScenarioSpec& sc) {
    const FamilyInfo& fi = info(sc.family);
    for (const auto& key : fi.required) {
        if (!sc.params.count(key)) {
            throw Error(ErrorKind::InvalidParams,
                        "params." + key + ": required for family " + std::string(fi.name));
        }
    }
    std::set<std::string> allowed(fi.required.begin(), fi.required.end());
    for (const auto& [k, v] : fi.defaults) allowed.insert(k);
    for (const auto& [k, v] : sc.params) {
        if (!allowed.count(k)) {
            throw Error(ErrorKind::InvalidParams,
                        "params." + k + ": not a parameter of family " + std::string(fi.name));
        }
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidParams, "params." + k + ": not finite");
    }
    if (sc.n < fi.covariates + 2) {
        throw Error(ErrorKind::InvalidParams, "n: must be at least " + std::to_string(fi.covariates + 2) +
                                                  " for family " + std::string(fi.name));
    }
    auto positive = [&](const char* key) {
        if (sc.params.count(key) && !(sc.params.at(key) > 0.0)) {
            throw Error(ErrorKind::InvalidParams, std::string("params.") + key + ": must be positive");
        }
    };
    positive("a");
    positive("s");
    if (sc.params.count("sigma2") && sc.params.at("sigma2") < 0.0) {
        throw Error(ErrorKind::InvalidParams, "params.sigma2: must be non-negative");
    }
}

Dataset generate(const ScenarioSpec& sc) {
    validate_scenario(sc);
    const std::size_t n = sc.n;
    const std::size_t k = covariate_count(sc.family);
    ReplicateStream stream(sc.seed, 0, StreamDomain::Data);

    Eigen::MatrixXd x(n, k + 1);
    Eigen::VectorXd y(n);
    std::vector<double> row(k);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : row) v = stream.uniform();
        const auto r = static_cast<Eigen::Index>(i);
        x(r, 0) = 1.0;
        for (std::size_t j = 0; j < k; ++j) x(r, static_cast<Eigen::Index>(j + 1)) = row[j];

        double mean = kIntercept;
        double error = 0.0;
        switch (sc.family) {
            case Family::NullNormal:
                mean += param(sc, "beta1") * row[0] + param(sc, "beta2") * row[1];
                error = std::sqrt(param(sc, "sigma2")) * stream.normal();
                break;
            case Family::NullGamma: {
                const double a = param(sc, "a");
                const double s = param(sc, "s");
                mean += param(sc, "beta1") * row[0] + param(sc, "beta2") * row[1];
                error = stream.gamma(a, s) - a * s;
                break;
            }
            case Family::NullHetero:
                mean += param(sc, "beta1") * row[0] + param(sc, "beta2") * row[1];
                error = (1.0 + param(sc, "theta") * row[0]) * stream.normal();
                break;
            case Family::QuadraticOmission:
                mean += param(sc, "beta1") * row[0] + param(sc, "beta2") * row[1] +
                        param(sc, "beta3") * row[0] * row[0];
                error = std::sqrt(param(sc, "sigma2")) * stream.normal();
                break;
            case Family::InteractionOmission:
                mean += param(sc, "beta1") * row[0] + param(sc, "beta2") * row[1] +
                        param(sc, "beta3") * row[0] * row[1];
                error = std::sqrt(param(sc, "sigma2")) * stream.normal();
                break;
            case Family::PartialQuadratic5:
            case Family::PartialInteraction5: {
                for (double v : row) mean += kFixedSlope * v;
                const double extra =
                    sc.family == Family::PartialQuadratic5 ? row[0] * row[0] : row[0] * row[1];
                mean += param(sc, "beta6") * extra;
                error = std::sqrt(param(sc, "sigma2")) * stream.normal();
                break;
            }
        }
        y[r] = mean + error;
    }

    std::vector<std::string> names{"(Intercept)"};
    for (std::size_t j = 1; j <= k; ++j) names.push_back("x" + std::to_string(j));
    return Dataset(std::move(y), std::move(x), std::move(names));
}

MCResult run_study(const ScenarioSpec& scenario, const TestSpec& test, std::size_t n_reps,
                   const std::vector<double>& alphas, Execution exec) {
    if (n_reps < 1) throw Error(ErrorKind::InvalidArgument, "n_reps must be >= 1");
    validate_scenario(scenario);
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha levels must lie in (0, 1)");
    }

    MCResult out;
    out.scenario = scenario;
    out.test = test;
    out.test.collect_traces = 0;
    out.alphas = alphas;
    out.n_reps = n_reps;
    out.p_values.assign(2, std::vector<double>(n_reps, 1.0));

    auto one_rep = [&](std::size_t r) {
        ScenarioSpec sc = scenario;
        sc.seed = derive_seed(scenario.seed, r);
        TestSpec ts = out.test;
        ts.master_seed = derive_seed(sc.seed, 0);
        const GofTestResult res = run_test(generate(sc), ts, Execution::Serial);
        out.p_values[0][r] = res.ks.p_value;
        out.p_values[1][r] = res.cvm.p_value;
    };

    if (exec == Execution::Serial) {
        for (std::size_t r = 0; r < n_reps; ++r) one_rep(r);
    } else {
        std::exception_ptr failure;
        const auto count = static_cast<std::int64_t>(n_reps);
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t r = 0; r < count; ++r) {
            try {
                one_rep(static_cast<std::size_t>(r));
            } catch (...) {
#pragma omp critical(gofperm_study_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    out.rejection_rates.assign(2, std::vector<double>(alphas.size(), 0.0));
    out.mc_stderr.assign(2, std::vector<double>(alphas.size(), 0.0));
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            std::size_t rejected = 0;
            for (double p : out.p_values[s]) rejected += (p <= alphas[a]) ? 1 : 0;
            const double rate = static_cast<double>(rejected) / static_cast<double>(n_reps);
            out.rejection_rates[s][a] = rate;
            out.mc_stderr[s][a] = std::sqrt(rate * (1.0 - rate) / static_cast<double>(n_reps));
        }
    }
    return out;
}

}  // namespace gofperm
