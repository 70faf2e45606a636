#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gofperm/engine.hpp"
#include "gofperm/linreg.hpp"

namespace gofperm {

/**
 * @brief Data-generating families for the Monte-Carlo studies.
 *
 * All covariates are iid uniform[0, 1] and the intercept is -0.1. Parameter
 * names (missing optional ones take the listed default):
 *
 *   NullNormal          beta1, beta2, sigma2
 *   NullGamma           beta1, beta2, a, s            (error gamma(a, s) - a*s)
 *   NullHetero          beta1, beta2, theta           (error sd 1 + theta*x1)
 *   QuadraticOmission   beta1, beta3, beta2=0.25, sigma2=0.1   (+ beta3*x1^2)
 *   InteractionOmission beta1, beta3, beta2=0.25, sigma2=0.1   (+ beta3*x1*x2)
 *   PartialQuadratic5   beta6, sigma2=0.1                      (+ beta6*x1^2)
 *   PartialInteraction5 beta6, sigma2=0.1                      (+ beta6*x1*x2)
 *
 * The five-covariate families use 0.25 for every linear coefficient. The
 * design returned by generate() is always the one the test fits: the
 * quadratic or interaction column is omitted.
 */
enum class Family {
    NullNormal,
    NullGamma,
    NullHetero,
    QuadraticOmission,
    InteractionOmission,
    PartialQuadratic5,
    PartialInteraction5,
};

[[nodiscard]] std::string to_string(Family f);
/// @throws Error(InvalidParams) naming the unknown family.
[[nodiscard]] Family parse_family(const std::string& name);

struct ScenarioSpec {
    Family family = Family::NullNormal;
    std::size_t n = 100;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
};

/// Number of fitted covariates (excluding the intercept) for a family.
[[nodiscard]] std::size_t covariate_count(Family f) noexcept;

/// @throws Error(InvalidParams) for missing/unknown parameters or n too small.
void validate_scenario(const ScenarioSpec& scenario);

[[nodiscard]] Dataset generate(const ScenarioSpec& scenario);

struct MCResult {
    ScenarioSpec scenario;
    TestSpec test;
    std::vector<double> alphas;
    std::size_t n_reps = 0;
    /// Indexed [statistic][alpha], statistic 0 = KS, 1 = CvM.
    std::vector<std::vector<double>> rejection_rates;
    std::vector<std::vector<double>> mc_stderr;
    /// Per-rep p-values, [statistic][rep].
    std::vector<std::vector<double>> p_values;

    [[nodiscard]] double rate(Statistic s, std::size_t alpha_index) const {
        return rejection_rates[s == Statistic::KS ? 0 : 1][alpha_index];
    }
    [[nodiscard]] double stderr_of(Statistic s, std::size_t alpha_index) const {
        return mc_stderr[s == Statistic::KS ? 0 : 1][alpha_index];
    }
};

/**
 * @brief Repeat generate + run_test n_reps times.
 *
 * Rep r draws its data from derive_seed(scenario.seed, r) and its null
 * replicates from a second derived seed; test.master_seed is ignored. Reps
 * run concurrently under Execution::Parallel; the result does not depend on
 * the worker count.
 */
[[nodiscard]] MCResult run_study(const ScenarioSpec& scenario, const TestSpec& test,
                                 std::size_t n_reps, const std::vector<double>& alphas,
                                 Execution exec = Execution::Parallel);

}  // namespace gofperm
