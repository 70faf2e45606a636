#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gofperm/linreg.hpp"
#include "gofperm/nullgen.hpp"
#include "gofperm/process.hpp"

namespace gofperm {

enum class Statistic { KS, CvM };

[[nodiscard]] std::string to_string(Statistic s);

/// Parallel runs the replicate loop with OpenMP; Serial is the reference loop.
/// Both produce identical results for the same spec.
enum class Execution { Parallel, Serial };

struct TestSpec {
    OrderingKey ordering;
    Statistic statistic = Statistic::CvM;
    NullMethod method;
    std::size_t n_perms = 10000;
    std::uint64_t master_seed = 0;
    std::size_t collect_traces = 0;
    /// Order replicate residuals by the observed fit's keys instead of re-deriving them.
    bool order_by_original = false;
};

struct StatisticOutcome {
    double observed = 0.0;
    std::vector<double> replicates;
    double p_value = 1.0;
};

/**
 * @brief Outcome of one goodness-of-fit test.
 *
 * Both statistics are evaluated on every replicate; spec.statistic selects
 * the one reported by t_observed() / p_value().
 */
struct GofTestResult {
    TestSpec spec;
    StatisticOutcome ks;
    StatisticOutcome cvm;
    FitResult observed_fit;
    ResidualProcess observed_process;
    std::vector<ResidualProcess> replicate_traces;
    bool exhaustive = false;

    [[nodiscard]] const StatisticOutcome& outcome(Statistic s) const noexcept {
        return s == Statistic::KS ? ks : cvm;
    }
    [[nodiscard]] double t_observed() const noexcept { return outcome(spec.statistic).observed; }
    [[nodiscard]] double p_value() const noexcept { return outcome(spec.statistic).p_value; }
    [[nodiscard]] const std::vector<double>& t_replicates() const noexcept {
        return outcome(spec.statistic).replicates;
    }
};

/// Replicate statistics within this relative distance of the observed value count as ties.
inline constexpr double kTieRelativeTolerance = 1e-12;

/// (1 + #{k : T^k >= T}) / (K + 1).
[[nodiscard]] double permutation_p_value(double observed, std::span<const double> replicates) noexcept;

/// #{pi : T^pi >= T} / |S_n|, identity included among the replicates.
[[nodiscard]] double exhaustive_p_value(double observed, std::span<const double> replicates) noexcept;

/// @throws Error(DegenerateVariance) when the observed fit is exact; fit errors propagate.
[[nodiscard]] GofTestResult run_test(const Dataset& data, const TestSpec& spec,
                                     Execution exec = Execution::Parallel);

inline constexpr std::size_t kMaxExhaustiveN = 8;

/// Evaluates all n! residual permutations (n_perms is ignored).
/// @throws Error(TooLarge) for n > 8, Error(InvalidArgument) for other methods.
[[nodiscard]] GofTestResult exhaustive_test(const Dataset& data, const TestSpec& spec);

/// Long-format trace table row; replicate_id 0 is the observed process.
struct TraceRow {
    std::size_t replicate_id;
    double key;
    double cum;
};

/// @throws Error(NoTraces) when no replicate processes were retained.
[[nodiscard]] std::vector<TraceRow> envelope(const GofTestResult& result);

void set_worker_count(int workers);
[[nodiscard]] int worker_count();

}  // namespace gofperm
