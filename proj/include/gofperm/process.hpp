#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gofperm/linreg.hpp"

namespace gofperm {

/**
 * @brief Which quantity orders the residuals.
 *
 * FullModel orders by fitted values, Covariate(j) by design column j and
 * Subset(J) by the partial linear predictor sum_{j in J} x_ij * theta_j.
 * Column indices address the design matrix, so 0 is the intercept and is
 * never a valid target.
 */
struct OrderingKey {
    enum class Kind { FullModel, Covariate, Subset };

    Kind kind = Kind::FullModel;
    std::vector<std::size_t> columns;

    static OrderingKey full_model() { return {}; }
    static OrderingKey covariate(std::size_t column) { return {Kind::Covariate, {column}}; }
    static OrderingKey subset(std::vector<std::size_t> columns);

    /// Keys do not depend on the fit (Covariate ordering).
    [[nodiscard]] bool fit_invariant() const noexcept { return kind == Kind::Covariate; }

    /// "full", "covariate:<name>" or "subset:<a>,<b>".
    [[nodiscard]] std::string label(const std::vector<std::string>& column_names) const;
};

/// @throws Error(IndexOutOfRange) if the key refers to the intercept or a missing column.
void validate_ordering(const OrderingKey& key, std::size_t p);

/**
 * @brief Step-function form of the standardized cumulative residual process.
 *
 * keys are the distinct ordering values in increasing order, cum[j] is the
 * process value on [keys[j], keys[j+1]) and mult[j] the number of
 * observations tied at keys[j]. The process is 0 left of keys[0].
 */
struct ResidualProcess {
    std::vector<double> keys;
    std::vector<double> cum;
    std::vector<std::size_t> mult;
    std::size_t n = 0;
    double sigma_used = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return keys.size(); }
    /// Right-continuous evaluation W(t).
    [[nodiscard]] double at(double t) const noexcept;
};

[[nodiscard]] std::vector<double> ordering_values(const FitResult& fit, const Dataset& data,
                                                  const OrderingKey& key);

/// Partial linear predictor for a column subset, computed with the supplied coefficients.
void partial_predictor(const Eigen::MatrixXd& x, std::span<const double> theta,
                       std::span<const std::size_t> columns, std::span<double> out) noexcept;

/// @throws Error(DegenerateVariance) if sigma is not a positive finite number.
[[nodiscard]] ResidualProcess build_process(std::span<const double> residuals,
                                            std::span<const double> keys, double sigma);

[[nodiscard]] double ks_statistic(const ResidualProcess& proc) noexcept;
[[nodiscard]] double cvm_statistic(const ResidualProcess& proc) noexcept;

/// Plug-in limiting covariance K(t, s) for keys x_i^T theta.
[[nodiscard]] double plugin_covariance(const Dataset& data, std::span<const double> theta, double t,
                                       double s);

/// Same, for an arbitrary key vector (partial checks).
[[nodiscard]] double plugin_covariance_for_keys(const Dataset& data, std::span<const double> keys,
                                                double t, double s);

struct ProcessStatistics {
    double ks = 0.0;
    double cvm = 0.0;
};

/// Scratch buffers for the statistic kernel; one per worker.
struct ProcessScratch {
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> tie_buffer;
};

/**
 * @brief Order observations once for keys that stay fixed across replicates.
 *
 * Stores the sort order and the tie-group boundaries so each replicate only
 * pays a linear pass.
 */
class FixedOrdering {
public:
    FixedOrdering() = default;
    explicit FixedOrdering(std::span<const double> keys);

    [[nodiscard]] bool empty() const noexcept { return order_.empty(); }
    [[nodiscard]] std::span<const std::size_t> order() const noexcept { return order_; }
    [[nodiscard]] std::span<const std::size_t> group_ends() const noexcept { return group_ends_; }
    [[nodiscard]] std::span<const double> sorted_keys() const noexcept { return sorted_keys_; }

private:
    std::vector<std::size_t> order_;
    std::vector<std::size_t> group_ends_;
    std::vector<double> sorted_keys_;
};

/// KS and CvM without materializing the process. Matches build_process exactly.
[[nodiscard]] ProcessStatistics process_statistics(std::span<const double> residuals,
                                                   std::span<const double> keys, double sigma,
                                                   ProcessScratch& scratch);

[[nodiscard]] ProcessStatistics process_statistics(std::span<const double> residuals,
                                                   const FixedOrdering& ordering, double sigma,
                                                   ProcessScratch& scratch);

/// Materialized process for fixed keys; equal to build_process on the same inputs.
[[nodiscard]] ResidualProcess build_process(std::span<const double> residuals,
                                            const FixedOrdering& ordering, double sigma,
                                            ProcessScratch& scratch);

}  // namespace gofperm
