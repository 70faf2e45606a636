#include "gofperm/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gofperm {

OrderingKey OrderingKey::subset(std::vector<std::size_t> columns) {
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
    return {Kind::Subset, std::move(columns)};
}

std::string OrderingKey::label(const std::vector<std::string>& column_names) const {
    auto name = [&](std::size_t j) {
        return j < column_names.size() ? column_names[j] : "x" + std::to_string(j);
    };
    switch (kind) {
        case Kind::FullModel: return "full";
        case Kind::Covariate: return "covariate:" + name(columns.at(0));
        case Kind::Subset: {
            std::string out = "subset:";
            for (std::size_t i = 0; i < columns.size(); ++i) {
                if (i) out += ',';
                out += name(columns[i]);
            }
            return out;
        }
    }
    return "full";
}

void validate_ordering(const OrderingKey& key, std::size_t p) {
    if (key.kind == OrderingKey::Kind::FullModel) return;
    if (key.columns.empty()) {
        throw Error(ErrorKind::IndexOutOfRange, "ordering subset must name at least one covariate");
    }
    if (key.kind == OrderingKey::Kind::Covariate && key.columns.size() != 1) {
        throw Error(ErrorKind::IndexOutOfRange, "covariate ordering takes exactly one column");
    }
    for (std::size_t j : key.columns) {
        if (j == 0 || j >= p) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "ordering column " + std::to_string(j) + " is not a covariate of a p=" +
                            std::to_string(p) + " design");
        }
    }
}

double ResidualProcess::at(double t) const noexcept {
    const auto it = std::upper_bound(keys.begin(), keys.end(), t);
    if (it == keys.begin()) return 0.0;
    return cum[static_cast<std::size_t>(it - keys.begin()) - 1];
}

void partial_predictor(const Eigen::MatrixXd& x, std::span<const double> theta,
                       std::span<const std::size_t> columns, std::span<double> out) noexcept {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j : columns) {
        const double b = theta[j];
        const double* col = x.col(static_cast<Eigen::Index>(j)).data();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += col[i] * b;
    }
}

std::vector<double> ordering_values(const FitResult& fit, const Dataset& data,
                                    const OrderingKey& key) {
    validate_ordering(key, data.p());
    const std::size_t n = data.n();
    std::vector<double> out(n);
    switch (key.kind) {
        case OrderingKey::Kind::FullModel:
            std::copy(fit.fitted.data(), fit.fitted.data() + n, out.begin());
            break;
        case OrderingKey::Kind::Covariate: {
            const auto col = data.x().col(static_cast<Eigen::Index>(key.columns[0]));
            std::copy(col.data(), col.data() + n, out.begin());
            break;
        }
        case OrderingKey::Kind::Subset:
            partial_predictor(data.x(), as_span(fit.theta_hat), key.columns, out);
            break;
    }
    return out;
}

namespace {

void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::DegenerateVariance,
                    "residual standard deviation is zero or not finite; the process is undefined");
    }
}

// Every path funnels its tie groups through this accumulator so the
// materialized process and the streaming statistics agree to the last bit.
struct Accumulator {
    double scale;
    double running = 0.0;
    double ks = 0.0;
    double weighted_sq = 0.0;
    std::size_t n;

    Accumulator(std::size_t count, double sigma)
        : scale(1.0 / (std::sqrt(static_cast<double>(count)) * sigma)), n(count) {}

    double push(double group_sum, std::size_t mult) noexcept {
        running += group_sum;
        const double w = running * scale;
        ks = std::max(ks, std::abs(w));
        weighted_sq += static_cast<double>(mult) * w * w;
        return w;
    }

    [[nodiscard]] ProcessStatistics result() const noexcept {
        return {ks, weighted_sq / static_cast<double>(n)};
    }
};

void sort_pairs(std::span<const double> residuals, std::span<const double> keys,
                std::vector<std::pair<double, double>>& pairs) {
    pairs.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) pairs[i] = {keys[i], residuals[i]};
    std::sort(pairs.begin(), pairs.end());
}

// Visits tie groups of sorted (key, residual) pairs: f(key, group_sum, mult).
template <typename F>
void for_each_group(const std::vector<std::pair<double, double>>& pairs, F&& f) {
    std::size_t i = 0;
    const std::size_t n = pairs.size();
    while (i < n) {
        const double key = pairs[i].first;
        double sum = pairs[i].second;
        std::size_t j = i + 1;
        while (j < n && pairs[j].first == key) sum += pairs[j++].second;
        f(key, sum, j - i);
        i = j;
    }
}

// Same visit for a precomputed ordering. Residuals inside a tie group are
// summed in ascending order, which is what the pair sort produces.
template <typename F>
void for_each_group(std::span<const double> residuals, const FixedOrdering& ordering,
                    std::vector<double>& tie_buffer, F&& f) {
    const auto order = ordering.order();
    const auto ends = ordering.group_ends();
    const auto sorted_keys = ordering.sorted_keys();
    std::size_t begin = 0;
    for (std::size_t end : ends) {
        double sum;
        if (end - begin == 1) {
            sum = residuals[order[begin]];
        } else {
            tie_buffer.clear();
            for (std::size_t i = begin; i < end; ++i) tie_buffer.push_back(residuals[order[i]]);
            std::sort(tie_buffer.begin(), tie_buffer.end());
            sum = tie_buffer[0];
            for (std::size_t i = 1; i < tie_buffer.size(); ++i) sum += tie_buffer[i];
        }
        f(sorted_keys[begin], sum, end - begin);
        begin = end;
    }
}

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw Error(ErrorKind::InvalidArgument, "residual and key lengths differ");
    if (a == 0) throw Error(ErrorKind::InvalidArgument, "process needs at least one observation");
}

}  // namespace

ResidualProcess build_process(std::span<const double> residuals, std::span<const double> keys,
                              double sigma) {
    check_lengths(residuals.size(), keys.size());
    require_sigma(sigma);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!std::isfinite(keys[i]) || !std::isfinite(residuals[i])) {
            throw Error(ErrorKind::NonFinite, "process input has non-finite values");
        }
    }
    std::vector<std::pair<double, double>> pairs;
    sort_pairs(residuals, keys, pairs);

    ResidualProcess proc;
    proc.n = keys.size();
    proc.sigma_used = sigma;
    Accumulator acc(proc.n, sigma);
    for_each_group(pairs, [&](double key, double sum, std::size_t mult) {
        proc.keys.push_back(key);
        proc.cum.push_back(acc.push(sum, mult));
        proc.mult.push_back(mult);
    });
    return proc;
}

double ks_statistic(const ResidualProcess& proc) noexcept {
    double m = 0.0;
    for (double c : proc.cum) m = std::max(m, std::abs(c));
    return m;
}

double cvm_statistic(const ResidualProcess& proc) noexcept {
    if (proc.n == 0) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < proc.cum.size(); ++j) {
        s += static_cast<double>(proc.mult[j]) * proc.cum[j] * proc.cum[j];
    }
    return s / static_cast<double>(proc.n);
}

FixedOrdering::FixedOrdering(std::span<const double> keys) {
    const std::size_t n = keys.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    sorted_keys_.resize(n);
    for (std::size_t i = 0; i < n; ++i) sorted_keys_[i] = keys[order_[i]];
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || sorted_keys_[i] != sorted_keys_[i - 1]) group_ends_.push_back(i);
    }
}

ProcessStatistics process_statistics(std::span<const double> residuals,
                                     std::span<const double> keys, double sigma,
                                     ProcessScratch& scratch) {
    sort_pairs(residuals, keys, scratch.pairs);
    Accumulator acc(keys.size(), sigma);
    for_each_group(scratch.pairs, [&](double, double sum, std::size_t mult) { acc.push(sum, mult); });
    return acc.result();
}

ProcessStatistics process_statistics(std::span<const double> residuals,
                                     const FixedOrdering& ordering, double sigma,
                                     ProcessScratch& scratch) {
    Accumulator acc(residuals.size(), sigma);
    for_each_group(residuals, ordering, scratch.tie_buffer,
                   [&](double, double sum, std::size_t mult) { acc.push(sum, mult); });
    return acc.result();
}

ResidualProcess build_process(std::span<const double> residuals, const FixedOrdering& ordering,
                              double sigma, ProcessScratch& scratch) {
    check_lengths(residuals.size(), ordering.order().size());
    require_sigma(sigma);
    ResidualProcess proc;
    proc.n = residuals.size();
    proc.sigma_used = sigma;
    Accumulator acc(proc.n, sigma);
    for_each_group(residuals, ordering, scratch.tie_buffer,
                   [&](double key, double sum, std::size_t mult) {
                       proc.keys.push_back(key);
                       proc.cum.push_back(acc.push(sum, mult));
                       proc.mult.push_back(mult);
                   });
    return proc;
}

double plugin_covariance_for_keys(const Dataset& data, std::span<const double> keys, double t,
                                  double s) {
    const std::size_t n = data.n();
    if (keys.size() != n) throw Error(ErrorKind::InvalidArgument, "key vector has wrong length");
    const OlsDecomposition qr(data.x());
    const auto& x = data.x();
    const Eigen::Index p = x.cols();

    const double lo = std::min(t, s);
    double count_lo = 0.0;
    Eigen::VectorXd ht = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd hs = Eigen::VectorXd::Zero(p);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = x.row(static_cast<Eigen::Index>(i)).transpose();
        if (keys[i] <= lo) count_lo += 1.0;
        if (keys[i] <= t) ht += row;
        if (keys[i] <= s) hs += row;
    }
    const double quad = qr.whiten(ht).dot(qr.whiten(hs));
    return (count_lo - quad) / static_cast<double>(n);
}

double plugin_covariance(const Dataset& data, std::span<const double> theta, double t, double s) {
    if (theta.size() != data.p()) throw Error(ErrorKind::InvalidArgument, "theta has wrong length");
    Eigen::Map<const Eigen::VectorXd> th(theta.data(), static_cast<Eigen::Index>(theta.size()));
    const Eigen::VectorXd keys = data.x() * th;
    return plugin_covariance_for_keys(data, as_span(keys), t, s);
}

}  // namespace gofperm
