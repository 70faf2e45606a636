#include "gofperm/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gofperm {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::DegenerateSample: return "DegenerateSample";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::DegenerateVariance: return "DegenerateVariance";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::NoTraces: return "NoTraces";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::MissingValue: return "MissingValue";
        case ErrorKind::UnknownColumn: return "UnknownColumn";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kDegenerateSigmaTolerance = 1e-10;
constexpr double kInterceptTolerance = 1e-12;

void require_finite(const Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i])) {
            throw Error(ErrorKind::NonFinite,
                        "response has a non-finite value at row " + std::to_string(i + 1));
        }
    }
}

}  // namespace

Dataset::Dataset(Eigen::VectorXd y, Eigen::MatrixXd x, std::vector<std::string> column_names)
    : y_(std::move(y)), x_(std::move(x)), names_(std::move(column_names)) {
    if (x_.rows() != y_.size()) {
        throw Error(ErrorKind::InvalidArgument, "design has " + std::to_string(x_.rows()) +
                                                    " rows but response has " +
                                                    std::to_string(y_.size()));
    }
    if (x_.cols() < 1) throw Error(ErrorKind::InvalidArgument, "design has no columns");
    require_finite(y_);
    if (!x_.allFinite()) throw Error(ErrorKind::NonFinite, "design has non-finite entries");
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
        if (std::abs(x_(i, 0) - 1.0) > kInterceptTolerance) {
            throw Error(ErrorKind::InvalidArgument,
                        "first design column must be the intercept (all ones)");
        }
    }
    if (names_.empty()) {
        names_.reserve(static_cast<std::size_t>(x_.cols()));
        names_.emplace_back("(Intercept)");
        for (Eigen::Index j = 1; j < x_.cols(); ++j) names_.push_back("x" + std::to_string(j));
    } else if (names_.size() != static_cast<std::size_t>(x_.cols())) {
        throw Error(ErrorKind::InvalidArgument, "column_names length does not match design");
    }
}

Dataset Dataset::with_response(Eigen::VectorXd y) const {
    if (y.size() != y_.size()) {
        throw Error(ErrorKind::InvalidArgument, "replacement response has wrong length");
    }
    require_finite(y);
    Dataset out = *this;
    out.y_ = std::move(y);
    return out;
}

OlsDecomposition::OlsDecomposition(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n <= p) {
        throw Error(ErrorKind::DegenerateSample, "need n > p, got n=" + std::to_string(n) +
                                                     ", p=" + std::to_string(p));
    }
    if (!x.allFinite()) throw Error(ErrorKind::NonFinite, "design has non-finite entries");

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    r_ = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    q_ = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);

    const double scale = x.norm();
    const double smallest = r_.diagonal().cwiseAbs().minCoeff();
    if (!(smallest > kRankTolerance * scale)) {
        std::ostringstream msg;
        msg << "design is rank deficient (min |R_jj| = " << smallest << ", ||X|| = " << scale << ")";
        throw Error(ErrorKind::RankDeficient, msg.str());
    }
}

void OlsDecomposition::fit_into(std::span<const double> y, FitWorkspace& ws) const {
    const Eigen::Index n = q_.rows();
    const Eigen::Index p = q_.cols();
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

    ws.qty.noalias() = q_.transpose() * yv;
    ws.theta = r_.triangularView<Eigen::Upper>().solve(ws.qty);
    ws.fitted.noalias() = q_ * ws.qty;
    ws.residuals = yv - ws.fitted;
    ws.sigma_hat = std::sqrt(ws.residuals.squaredNorm() / static_cast<double>(n - p));
}

FitResult OlsDecomposition::fit(const Eigen::VectorXd& y) const {
    if (static_cast<std::size_t>(y.size()) != n()) {
        throw Error(ErrorKind::InvalidArgument, "outcome length does not match design");
    }
    require_finite(y);
    FitWorkspace ws;
    fit_into(as_span(y), ws);
    FitResult out;
    out.theta_hat = std::move(ws.theta);
    out.fitted = std::move(ws.fitted);
    out.residuals = std::move(ws.residuals);
    out.sigma_hat = ws.sigma_hat;
    out.df_resid = n() - p();
    return out;
}

Eigen::VectorXd OlsDecomposition::whiten(const Eigen::VectorXd& v) const {
    return r_.transpose().triangularView<Eigen::Lower>().solve(v);
}

Eigen::VectorXd OlsDecomposition::solve_gram(const Eigen::VectorXd& v) const {
    return r_.triangularView<Eigen::Upper>().solve(whiten(v));
}

FitResult fit_ols(const Dataset& data) {
    return OlsDecomposition(data.x()).fit(data.y());
}

FitResult refit_on_outcome(const Dataset& fit_context, const Eigen::VectorXd& new_y) {
    return OlsDecomposition(fit_context.x()).fit(new_y);
}

FitResult refit_on_outcome(const OlsDecomposition& qr, const Eigen::VectorXd& new_y) {
    return qr.fit(new_y);
}

bool is_degenerate_sigma(double sigma, double outcome_scale) noexcept {
    if (!std::isfinite(sigma)) return true;
    const double scale = std::max(outcome_scale, std::numeric_limits<double>::min());
    return !(sigma > kDegenerateSigmaTolerance * scale);
}

double max_abs(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace gofperm
