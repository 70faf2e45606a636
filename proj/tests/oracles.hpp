#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the QR path or the process kernels it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // row-major, rows[i][j]

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

inline Matrix gram(const Matrix& x) {
    const std::size_t p = x[0].size();
    Matrix g(p, std::vector<double>(p, 0.0));
    for (const auto& row : x) {
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) g[a][b] += row[a] * row[b];
        }
    }
    return g;
}

/// (X^T X)^{-1} X^T y via the normal equations.
inline std::vector<double> normal_equations(const Matrix& x, const std::vector<double>& y) {
    const std::size_t p = x[0].size();
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < p; ++j) xty[j] += x[i][j] * y[i];
    }
    return solve(gram(x), xty);
}

/// Residuals of the normal-equation fit.
inline std::vector<double> residuals(const Matrix& x, const std::vector<double>& y) {
    const auto b = normal_equations(x, y);
    std::vector<double> e(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) f += x[i][j] * b[j];
        e[i] = y[i] - f;
    }
    return e;
}

/// W(t) = (1/(sqrt(n) sigma)) sum_i e_i I(key_i <= t), evaluated literally.
inline double process_at(const std::vector<double>& e, const std::vector<double>& keys, double sigma,
                         double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (keys[i] <= t) s += e[i];
    }
    return s / (std::sqrt(static_cast<double>(e.size())) * sigma);
}

/// KS by brute force over every observed key.
inline double ks(const std::vector<double>& e, const std::vector<double>& keys, double sigma) {
    double m = 0.0;
    for (double t : keys) m = std::max(m, std::abs(process_at(e, keys, sigma, t)));
    return m;
}

/// CvM as an average over the empirical distribution of keys (one term per observation).
inline double cvm(const std::vector<double>& e, const std::vector<double>& keys, double sigma) {
    double s = 0.0;
    for (double t : keys) {
        const double w = process_at(e, keys, sigma, t);
        s += w * w;
    }
    return s / static_cast<double>(keys.size());
}

/**
 * Direct evaluation of the simulated process
 *   (1/sqrt(n)) sum_i [I(k_i <= t) - h(t)^T (X^T X)^{-1} x_i] e_i z_i,
 * h(t) = sum_k x_k I(k_k <= t), through the normal-equation inverse.
 */
inline double sw_direct(const Matrix& x, const std::vector<double>& e, const std::vector<double>& z,
                        const std::vector<double>& keys, double t) {
    const std::size_t n = x.size();
    const std::size_t p = x[0].size();
    std::vector<double> h(p, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (keys[k] <= t) {
            for (std::size_t j = 0; j < p; ++j) h[j] += x[k][j];
        }
    }
    const std::vector<double> g = solve(gram(x), h);  // (X^T X)^{-1} h
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double proj = 0.0;
        for (std::size_t j = 0; j < p; ++j) proj += g[j] * x[i][j];
        s += ((keys[i] <= t ? 1.0 : 0.0) - proj) * e[i] * z[i];
    }
    return s / std::sqrt(static_cast<double>(n));
}

inline Matrix random_design(std::size_t n, std::size_t covariates, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix x(n, std::vector<double>(covariates + 1, 1.0));
    for (auto& row : x) {
        for (std::size_t j = 1; j <= covariates; ++j) row[j] = u(rng);
    }
    return x;
}

inline double sample_variance(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracle
