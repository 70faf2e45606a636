#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gofperm/error.hpp"

namespace gofperm {

/**
 * @brief Regression input: response vector and fixed design matrix.
 *
 * The first column of the design must be the intercept (all ones). Shape and
 * finiteness are validated on construction; full column rank is checked when
 * the design is decomposed.
 */
class Dataset {
public:
    /// @throws Error (NonFinite, InvalidArgument)
    Dataset(Eigen::VectorXd y, Eigen::MatrixXd x, std::vector<std::string> column_names = {});

    [[nodiscard]] const Eigen::VectorXd& y() const noexcept { return y_; }
    [[nodiscard]] const Eigen::MatrixXd& x() const noexcept { return x_; }
    [[nodiscard]] const std::vector<std::string>& column_names() const noexcept { return names_; }
    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(y_.size()); }
    [[nodiscard]] std::size_t p() const noexcept { return static_cast<std::size_t>(x_.cols()); }

    /// Same design, different response (validated for length and finiteness).
    [[nodiscard]] Dataset with_response(Eigen::VectorXd y) const;

private:
    Eigen::VectorXd y_;
    Eigen::MatrixXd x_;
    std::vector<std::string> names_;
};

/// One ordinary least-squares fit.
struct FitResult {
    Eigen::VectorXd theta_hat;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    double sigma_hat = 0.0;  ///< sqrt(sum e^2 / (n - p))
    std::size_t df_resid = 0;
};

/// Reusable buffers for the allocation-free refit path.
struct FitWorkspace {
    Eigen::VectorXd qty;
    Eigen::VectorXd theta;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    double sigma_hat = 0.0;
};

/**
 * @brief Thin Householder QR of a design matrix, cached for repeated refits.
 *
 * Construction performs the decomposition and the rank check (smallest
 * |R_jj| against 1e-10 times the Frobenius norm of X). The object is
 * read-only afterwards and may be shared between threads.
 */
class OlsDecomposition {
public:
    explicit OlsDecomposition(const Eigen::MatrixXd& x);

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(q_.rows()); }
    [[nodiscard]] std::size_t p() const noexcept { return static_cast<std::size_t>(q_.cols()); }
    [[nodiscard]] const Eigen::MatrixXd& q() const noexcept { return q_; }
    [[nodiscard]] const Eigen::MatrixXd& r() const noexcept { return r_; }

    [[nodiscard]] FitResult fit(const Eigen::VectorXd& y) const;

    /// Writes theta, fitted, residuals and sigma_hat for outcome y into ws.
    void fit_into(std::span<const double> y, FitWorkspace& ws) const;

    /// Returns (X^T X)^{-1} v computed through R.
    [[nodiscard]] Eigen::VectorXd solve_gram(const Eigen::VectorXd& v) const;

    /// Returns R^{-T} v, so that a^T (X^T X)^{-1} b = (R^{-T}a).(R^{-T}b).
    [[nodiscard]] Eigen::VectorXd whiten(const Eigen::VectorXd& v) const;

private:
    Eigen::MatrixXd q_;
    Eigen::MatrixXd r_;
};

/// @throws Error (RankDeficient, DegenerateSample, NonFinite)
[[nodiscard]] FitResult fit_ols(const Dataset& data);

/// Fit of new_y on the design of fit_context. Identical to fit_ols on (new_y, X).
[[nodiscard]] FitResult refit_on_outcome(const Dataset& fit_context, const Eigen::VectorXd& new_y);

/// Cached-decomposition variant; bit-identical to the fresh fit.
[[nodiscard]] FitResult refit_on_outcome(const OlsDecomposition& qr, const Eigen::VectorXd& new_y);

/// True when sigma is zero relative to the magnitude of the outcome it came
/// from (an exact fit up to rounding).
[[nodiscard]] bool is_degenerate_sigma(double sigma, double outcome_scale) noexcept;

[[nodiscard]] double max_abs(std::span<const double> v) noexcept;

inline std::span<const double> as_span(const Eigen::VectorXd& v) noexcept {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace gofperm
