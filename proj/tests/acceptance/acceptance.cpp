// Acceptance suite: one PASS / FAIL / SKIP line per criterion, detail lines
// indented underneath. Exit status is 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gofperm/engine.hpp"
#include "gofperm/io.hpp"
#include "gofperm/simlab.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gofperm;

namespace {

struct Outcome {
    enum class Status { Pass, Fail, Skip } status = Status::Pass;
    std::string summary;
    std::vector<std::string> details;

    void check(bool ok, const std::string& line) {
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + line);
        if (!ok) status = Status::Fail;
    }
    void note(const std::string& line) { details.push_back("     " + line); }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TestSpec make_spec(OrderingKey key, std::size_t perms, std::uint64_t seed) {
    TestSpec s;
    s.ordering = std::move(key);
    s.n_perms = perms;
    s.master_seed = seed;
    return s;
}

// Builds a dataset from named numeric columns of a table, adding an optional
// squared copy of one column at the end of the design.
Dataset with_columns(const CsvTable& t, const std::string& response, const std::vector<std::string>& covs,
                     const std::string& squared = "") {
    const auto y = t.numeric_column(response);
    const auto n = static_cast<Eigen::Index>(y.size());
    const std::size_t extra = squared.empty() ? 0 : 1;
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(covs.size() + 1 + extra));
    x.col(0).setOnes();
    std::vector<std::string> names{"(Intercept)"};
    for (std::size_t j = 0; j < covs.size(); ++j) {
        const auto col = t.numeric_column(covs[j]);
        for (Eigen::Index i = 0; i < n; ++i) x(i, static_cast<Eigen::Index>(j + 1)) = col[static_cast<std::size_t>(i)];
        names.push_back(covs[j]);
    }
    if (extra) {
        const auto col = t.numeric_column(squared);
        for (Eigen::Index i = 0; i < n; ++i) x(i, x.cols() - 1) = col[static_cast<std::size_t>(i)] * col[static_cast<std::size_t>(i)];
        names.push_back(squared + "^2");
    }
    return Dataset(Eigen::Map<const Eigen::VectorXd>(y.data(), n), std::move(x), std::move(names));
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

// 1 ---------------------------------------------------------------------------
Outcome steam() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::istringstream in{std::string(bundled_dataset("steam"))};
    const CsvTable table = read_csv(in, "steam");
    const Dataset base = with_columns(table, "steam", {"days", "temperature"});
    const Dataset quad = with_columns(table, "steam", {"days", "temperature"}, "days");

    const auto full = run_test(base, make_spec(OrderingKey::full_model(), 10000, 1));
    o.check(within(full.ks.p_value, 0.022, 0.062), fmt("full model KS p = %.4f in [0.022, 0.062]", full.ks.p_value));
    o.check(within(full.cvm.p_value, 0.024, 0.064), fmt("full model CvM p = %.4f in [0.024, 0.064]", full.cvm.p_value));

    const auto sq = run_test(quad, make_spec(OrderingKey::full_model(), 10000, 1));
    o.check(std::abs(sq.ks.p_value - 0.567) <= 0.06, fmt("with days^2 KS p = %.4f within 0.567 +- 0.06", sq.ks.p_value));
    o.check(std::abs(sq.cvm.p_value - 0.641) <= 0.06,
            fmt("with days^2 CvM p = %.4f within 0.641 +- 0.06", sq.cvm.p_value));

    const auto days = run_test(base, make_spec(OrderingKey::covariate(1), 10000, 1));
    o.check(days.cvm.p_value <= 0.03, fmt("CvM targeting days p = %.4f <= 0.03", days.cvm.p_value));
    const auto temp = run_test(base, make_spec(OrderingKey::covariate(2), 10000, 1));
    o.check(within(temp.cvm.p_value, 0.05, 0.15), fmt("CvM targeting temperature p = %.4f in [0.05, 0.15]", temp.cvm.p_value));

    const double elapsed = seconds_since(t0);
    o.check(elapsed < 5.0, fmt("runtime %.2f s < 5 s", elapsed));
    o.summary = "steam data replication (10,000 permutations)";
    return o;
}

// 2 ---------------------------------------------------------------------------
Outcome mandible() {
    Outcome o;
    o.summary = "mandible data replication";
    const std::filesystem::path path = std::filesystem::path(GOFPERM_DATA_DIR) / "mandible.csv";
    if (!std::filesystem::exists(path)) {
        o.status = Outcome::Status::Skip;
        o.note(path.string() + " not present; run tools/fetch_mandible.py to enable");
        return o;
    }
    const CsvTable table = read_csv_file(path.string());
    const Dataset lin = with_columns(table, "log_length", {"log_age"});
    const Dataset quad = with_columns(table, "log_length", {"log_age", "log_age_sq"});
    o.note(fmt("n = %zu", lin.n()));
    const auto a = run_test(lin, make_spec(OrderingKey::full_model(), 10000, 1));
    o.check(a.ks.p_value < 0.001, fmt("linear model KS p = %.5f < 0.001", a.ks.p_value));
    o.check(a.cvm.p_value < 0.001, fmt("linear model CvM p = %.5f < 0.001", a.cvm.p_value));
    const auto b = run_test(quad, make_spec(OrderingKey::full_model(), 10000, 1));
    o.check(within(b.ks.p_value, 0.30, 0.70), fmt("with age^2 KS p = %.4f in [0.30, 0.70]", b.ks.p_value));
    o.check(within(b.cvm.p_value, 0.30, 0.70), fmt("with age^2 CvM p = %.4f in [0.30, 0.70]", b.cvm.p_value));
    return o;
}

// 3 ---------------------------------------------------------------------------
Outcome size_calibration() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> alphas{0.01, 0.05, 0.10};
    const std::size_t reps = 1000;
    const TestSpec test = make_spec(OrderingKey::full_model(), 200, 0);

    struct Case {
        std::string label;
        ScenarioSpec sc;
    };
    const std::vector<Case> cases{
        {"NullNormal", {Family::NullNormal, 100, {{"beta1", 0.25}, {"beta2", 0.25}, {"sigma2", 0.25}}, 301}},
        {"NullGamma a=1", {Family::NullGamma, 100, {{"beta1", 0.25}, {"beta2", 0.25}, {"a", 1.0}, {"s", 1.0}}, 302}},
        {"NullGamma a=10", {Family::NullGamma, 100, {{"beta1", 0.25}, {"beta2", 0.25}, {"a", 10.0}, {"s", 1.0}}, 303}},
    };
    for (const auto& c : cases) {
        const MCResult r = run_study(c.sc, test, reps, alphas);
        for (Statistic s : {Statistic::KS, Statistic::CvM}) {
            for (std::size_t a = 0; a < alphas.size(); ++a) {
                const double band = 3.0 * std::sqrt(alphas[a] * (1 - alphas[a]) / reps);
                const double rate = r.rate(s, a);
                o.check(std::abs(rate - alphas[a]) <= band,
                        fmt("%-15s %-3s alpha=%.2f rate=%.3f band [%.4f, %.4f]", c.label.c_str(), to_string(s).c_str(),
                            alphas[a], rate, alphas[a] - band, alphas[a] + band));
            }
            if (c.sc.family == Family::NullGamma) {
                const double rate = r.rate(s, 1);
                o.check(within(rate, 0.035, 0.065),
                        fmt("%-15s %-3s alpha=0.05 rate=%.3f in [0.035, 0.065]", c.label.c_str(), to_string(s).c_str(), rate));
            }
        }
    }
    o.note(fmt("runtime %.1f s", seconds_since(t0)));
    o.summary = "size calibration, n=100, 1,000 reps x 200 permutations";
    return o;
}

// 4 ---------------------------------------------------------------------------
Outcome exhaustive_equivalence() {
    Outcome o;
    std::mt19937_64 rng(404);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const Dataset d = testsupport::random_linear(6, 1 + inst % 2, rng);
        const OrderingKey key = inst % 3 == 0 ? OrderingKey::covariate(1) : OrderingKey::full_model();
        const auto exact = exhaustive_test(d, make_spec(key, 1, 0));
        const auto mc = run_test(d, make_spec(key, 5000, 4000 + static_cast<std::uint64_t>(inst)));
        for (Statistic s : {Statistic::KS, Statistic::CvM}) {
            const double p = exact.outcome(s).p_value;
            const double q = mc.outcome(s).p_value;
            const double tol = 3.0 * std::sqrt(p * (1 - p) / 5000.0);
            worst = std::max(worst, tol > 0 ? std::abs(q - p) / tol : (q == p ? 0.0 : 1e9));
            o.check(std::abs(q - p) <= tol,
                    fmt("instance %2d %-3s exhaustive p=%.4f random p=%.4f tol %.4f", inst, to_string(s).c_str(), p, q, tol));
        }
    }
    o.note(fmt("largest |difference| / tolerance = %.2f", worst));
    o.summary = "random-permutation p-values agree with exhaustive enumeration (20 instances, n=6, K=5,000)";
    return o;
}

// 5 ---------------------------------------------------------------------------
Outcome sw_equivalence() {
    Outcome o;
    std::mt19937_64 rng(505);
    double worst = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t n = 10 + static_cast<std::size_t>(inst) * 2;
        const std::size_t k = 1 + static_cast<std::size_t>(inst % 3);
        const Dataset d = testsupport::random_linear(n, k, rng);
        oracle::Matrix x(n, std::vector<double>(k + 1));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= k; ++j) x[i][j] = d.x()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));

        const FitResult fit = fit_ols(d);
        const auto keys = ordering_values(fit, d, inst % 2 ? OrderingKey::covariate(1) : OrderingKey::full_model());

        ReplicateStream stream(55, static_cast<std::uint64_t>(inst)), replay(55, static_cast<std::uint64_t>(inst));
        const auto yk = sw_outcome(fit, stream);
        std::vector<double> z(n);
        for (double& v : z) v = replay.normal();

        const FitResult refit = refit_on_outcome(d, Eigen::Map<const Eigen::VectorXd>(yk.data(), static_cast<Eigen::Index>(n)));
        const ResidualProcess proc = build_process(as_span(refit.residuals), keys, 1.0);
        const auto e = testsupport::to_vector(fit.residuals);
        for (std::size_t j = 0; j < proc.size(); ++j) {
            worst = std::max(worst, std::abs(proc.cum[j] - oracle::sw_direct(x, e, z, keys, proc.keys[j])));
        }
    }
    o.check(worst <= 1e-8, fmt("max |refit process - direct formula| = %.3e <= 1e-8 over all jump points", worst));
    o.summary = "SW simulation: refit process equals the direct formula (50 instances)";
    return o;
}

// 6 ---------------------------------------------------------------------------
Outcome variance_shrinkage() {
    Outcome o;
    std::mt19937_64 rng(606);
    double worst = -1e300;
    std::size_t violations = 0;
    for (int inst = 0; inst < 20; ++inst) {
        const Dataset d = testsupport::random_linear(20 + static_cast<std::size_t>(inst) * 5, 1 + inst % 4, rng);
        const FitResult fit = fit_ols(d);
        const OlsDecomposition qr(d.x());
        for (std::uint64_t k = 1; k <= 1000; ++k) {
            ReplicateStream s(static_cast<std::uint64_t>(inst), k);
            const auto yk = permuted_outcome(fit, s);
            const FitResult rf = refit_on_outcome(qr, Eigen::Map<const Eigen::VectorXd>(yk.data(), static_cast<Eigen::Index>(yk.size())));
            worst = std::max(worst, rf.sigma_hat - fit.sigma_hat);
            violations += rf.sigma_hat > fit.sigma_hat + 1e-12 ? 1 : 0;
        }
    }
    o.check(violations == 0, fmt("%zu of 20,000 permutations exceed sigma_hat + 1e-12 (max excess %.3e)", violations, worst));
    o.summary = "permuted-residual variance never exceeds the observed (1,000 permutations x 20 instances)";
    return o;
}

// 7 ---------------------------------------------------------------------------
Outcome covariance_oracle() {
    Outcome o;
    const ScenarioSpec sc{Family::NullNormal, 500, {{"beta1", 0.25}, {"beta2", 0.25}, {"sigma2", 0.25}}, 707};
    const Dataset d = generate(sc);
    TestSpec spec = make_spec(OrderingKey::full_model(), 2000, 77);
    spec.collect_traces = 2000;
    const auto r = run_test(d, spec);

    std::vector<double> keys = testsupport::to_vector(r.observed_fit.fitted);
    std::sort(keys.begin(), keys.end());
    const std::vector<double> theta = testsupport::to_vector(r.observed_fit.theta_hat);
    for (double q : {0.25, 0.50, 0.75}) {
        const double t = keys[static_cast<std::size_t>(q * (keys.size() - 1))];
        std::vector<double> vals;
        vals.reserve(r.replicate_traces.size());
        for (const auto& tr : r.replicate_traces) vals.push_back(tr.at(t));
        const double emp = oracle::sample_variance(vals);
        const double k = plugin_covariance(d, theta, t, t);
        o.check(std::abs(emp - k) <= 0.10 * k,
                fmt("percentile %.2f: empirical var %.5f, plug-in K(t,t) %.5f, rel diff %.3f", q, emp, k, std::abs(emp - k) / k));
    }
    o.summary = "plug-in covariance matches the permuted-process variance (n=500, 2,000 permutations)";
    return o;
}

// 8 ---------------------------------------------------------------------------
Outcome power_and_selectivity() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> alphas{0.01, 0.05, 0.10};
    const std::size_t reps = 1000;
    std::uint64_t seed = 800;
    auto study = [&](Family f, std::size_t n, std::map<std::string, double> params, OrderingKey key) {
        return run_study({f, n, std::move(params), ++seed}, make_spec(std::move(key), 200, 0), reps, alphas);
    };
    auto slack = [](const MCResult& a, const MCResult& b, std::size_t i) {
        return 2.0 * std::hypot(a.stderr_of(Statistic::CvM, i), b.stderr_of(Statistic::CvM, i));
    };
    const Statistic cvm = Statistic::CvM;

    for (Family f : {Family::QuadraticOmission, Family::InteractionOmission}) {
        const std::vector<double> betas{0.0, 0.5, 1.0};
        const std::vector<std::size_t> ns{100, 500};
        std::vector<std::vector<MCResult>> grid(ns.size());
        for (std::size_t a = 0; a < ns.size(); ++a)
            for (double b : betas) grid[a].push_back(study(f, ns[a], {{"beta1", 0.25}, {"beta3", b}}, OrderingKey::full_model()));
        for (std::size_t a = 0; a < ns.size(); ++a) {
            std::string rates;
            for (std::size_t b = 0; b < betas.size(); ++b) rates += fmt(" %.3f", grid[a][b].rate(cvm, 1));
            o.note(fmt("%s n=%zu CvM rejection at alpha=0.05 for beta3 = 0, 0.5, 1:%s", to_string(f).c_str(), ns[a], rates.c_str()));
        }
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            bool in_beta = true, in_n = true;
            for (std::size_t a = 0; a < ns.size(); ++a)
                for (std::size_t b = 1; b < betas.size(); ++b)
                    in_beta = in_beta && grid[a][b].rate(cvm, i) >= grid[a][b - 1].rate(cvm, i) - slack(grid[a][b], grid[a][b - 1], i);
            for (std::size_t b = 0; b < betas.size(); ++b)
                in_n = in_n && grid[1][b].rate(cvm, i) >= grid[0][b].rate(cvm, i) - slack(grid[1][b], grid[0][b], i);
            o.check(in_beta, fmt("%s alpha=%.2f: rejection non-decreasing in beta3", to_string(f).c_str(), alphas[i]));
            o.check(in_n, fmt("%s alpha=%.2f: rejection non-decreasing in n", to_string(f).c_str(), alphas[i]));
        }
    }

    {
        const std::map<std::string, double> p{{"beta6", 0.5}};
        const auto full = study(Family::PartialQuadratic5, 100, p, OrderingKey::full_model());
        const auto x1 = study(Family::PartialQuadratic5, 100, p, OrderingKey::covariate(1));
        const auto x2 = study(Family::PartialQuadratic5, 100, p, OrderingKey::covariate(2));
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            o.check(x1.rate(cvm, i) > full.rate(cvm, i),
                    fmt("Example I beta6=0.5 alpha=%.2f: target x1 %.3f > full %.3f", alphas[i], x1.rate(cvm, i), full.rate(cvm, i)));
            o.check(std::abs(x2.rate(cvm, i) - alphas[i]) <= 3.0 * x2.stderr_of(cvm, i) + 1e-12,
                    fmt("Example I beta6=0.5 alpha=%.2f: target x2 %.3f within 3 se (%.4f) of alpha", alphas[i],
                        x2.rate(cvm, i), x2.stderr_of(cvm, i)));
        }
    }
    {
        const std::map<std::string, double> p{{"beta6", 1.0}};
        const auto full = study(Family::PartialInteraction5, 100, p, OrderingKey::full_model());
        const auto s12 = study(Family::PartialInteraction5, 100, p, OrderingKey::subset({1, 2}));
        const auto s34 = study(Family::PartialInteraction5, 100, p, OrderingKey::subset({3, 4}));
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            const double level_se = std::sqrt(alphas[i] * (1 - alphas[i]) / reps);
            o.note(fmt("Example II beta6=1 alpha=%.2f: full %.3f", alphas[i], full.rate(cvm, i)));
            o.check(s12.rate(cvm, i) > alphas[i] + 3.0 * level_se,
                    fmt("Example II beta6=1 alpha=%.2f: subset {x1,x2} %.3f has power", alphas[i], s12.rate(cvm, i)));
            o.check(std::abs(s34.rate(cvm, i) - alphas[i]) <= 3.0 * level_se,
                    fmt("Example II beta6=1 alpha=%.2f: subset {x3,x4} %.3f within 3 se of alpha", alphas[i], s34.rate(cvm, i)));
        }
        for (std::size_t j = 1; j <= 5; ++j) {
            const auto single = study(Family::PartialInteraction5, 100, p, OrderingKey::covariate(j));
            for (std::size_t i = 0; i < alphas.size(); ++i) {
                const double level_se = std::sqrt(alphas[i] * (1 - alphas[i]) / reps);
                o.check(std::abs(single.rate(cvm, i) - alphas[i]) <= 3.0 * level_se,
                        fmt("Example II beta6=1 alpha=%.2f: target x%zu %.3f within 3 se of alpha", alphas[i], j,
                            single.rate(cvm, i)));
            }
        }
    }
    o.note(fmt("runtime %.1f s", seconds_since(t0)));
    o.summary = "power monotonicity and partial-check selectivity (CvM, 1,000 reps x 200 permutations)";
    return o;
}

// 9 ---------------------------------------------------------------------------
Outcome growth() {
    Outcome o;
    auto mean_scaled_ks = [](std::size_t n) {
        double sum = 0.0;
        for (std::uint64_t draw = 0; draw < 50; ++draw) {
            const ScenarioSpec sc{Family::QuadraticOmission, n, {{"beta1", 0.25}, {"beta3", 1.0}, {"sigma2", 0.1}},
                                  derive_seed(900 + n, draw)};
            const Dataset d = generate(sc);
            const FitResult fit = fit_ols(d);
            const auto proc = build_process(as_span(fit.residuals), ordering_values(fit, d, OrderingKey::full_model()),
                                            fit.sigma_hat);
            sum += ks_statistic(proc) / std::sqrt(static_cast<double>(n));
        }
        return sum / 50.0;
    };
    const double a = mean_scaled_ks(1000);
    const double b = mean_scaled_ks(2000);
    const double ratio = b / a;
    o.check(std::abs(ratio - 1.0) <= 0.15,
            fmt("mean T_S/sqrt(n): n=1000 %.4f, n=2000 %.4f, ratio %.4f within 1 +- 0.15", a, b, ratio));
    o.summary = "KS statistic grows like sqrt(n) under a fixed quadratic alternative";
    return o;
}

// 10 --------------------------------------------------------------------------
Outcome performance() {
    Outcome o;
    const ScenarioSpec sc{Family::NullNormal, 1000, {{"beta1", 0.25}, {"beta2", 0.25}, {"sigma2", 0.25}}, 1010};
    const Dataset d = generate(sc);
    const int saved = worker_count();
    set_worker_count(1);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_test(d, make_spec(OrderingKey::full_model(), 10000, 1));
    const double elapsed = seconds_since(t0);
    set_worker_count(saved);
    o.check(elapsed <= 10.0, fmt("n=1000, 2 covariates, K=10,000, one thread: %.2f s <= 10 s (p_cvm = %.3f)", elapsed,
                                 r.cvm.p_value));
    o.summary = "performance, single thread";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{
        steam, mandible, size_calibration, exhaustive_equivalence, sw_equivalence,
        variance_shrinkage, covariance_oracle, power_and_selectivity, growth, performance,
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.status = Outcome::Status::Fail;
            o.summary = std::string("threw: ") + e.what();
        }
        for (const auto& line : o.details) std::printf("    %s\n", line.c_str());
        const char* tag = o.status == Outcome::Status::Pass ? "PASS" : o.status == Outcome::Status::Skip ? "SKIP" : "FAIL";
        std::printf("%s criterion %zu: %s\n", tag, i + 1, o.summary.c_str());
        std::fflush(stdout);
        failures += o.status == Outcome::Status::Fail ? 1 : 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
