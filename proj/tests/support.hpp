#pragma once

#include <random>
#include <vector>

#include "gofperm/linreg.hpp"
#include "oracles.hpp"

namespace testsupport {

inline gofperm::Dataset to_dataset(const oracle::Matrix& x, const std::vector<double>& y) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const auto p = static_cast<Eigen::Index>(x[0].size());
    Eigen::MatrixXd xm(n, p);
    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) xm(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        yv[i] = y[static_cast<std::size_t>(i)];
    }
    return gofperm::Dataset(std::move(yv), std::move(xm));
}

inline std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Linear model with uniform covariates and normal noise.
inline gofperm::Dataset random_linear(std::size_t n, std::size_t covariates, std::mt19937_64& rng,
                                      double noise = 1.0) {
    const oracle::Matrix x = oracle::random_design(n, covariates, rng);
    std::normal_distribution<double> z(0.0, noise);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = 0.5;
        for (std::size_t j = 1; j <= covariates; ++j) y[i] += 0.3 * static_cast<double>(j) * x[i][j];
        y[i] += z(rng);
    }
    return to_dataset(x, y);
}

}  // namespace testsupport
