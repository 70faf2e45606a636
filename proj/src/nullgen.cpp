#include "gofperm/nullgen.hpp"

#include <numeric>

namespace gofperm {

std::string NullMethod::name() const {
    switch (kind) {
        case Kind::PermuteResiduals: return "perm";
        case Kind::PermuteRawData: return "rawperm";
        case Kind::SWSimulation: return "sw";
        case Kind::WildBootstrap: return weights == WildWeights::Mammen ? "wild-mammen" : "wild";
        case Kind::ResidualBootstrap: return "residboot";
    }
    return "perm";
}

NullMethod NullMethod::parse(const std::string& name) {
    if (name == "perm") return permute_residuals();
    if (name == "rawperm") return permute_raw();
    if (name == "sw") return sw_simulation();
    if (name == "wild" || name == "wild-rademacher") return wild(WildWeights::Rademacher);
    if (name == "wild-mammen") return wild(WildWeights::Mammen);
    if (name == "residboot") return residual_bootstrap();
    throw Error(ErrorKind::InvalidArgument, "unknown null method '" + name +
                                                "' (expected perm, rawperm, sw, wild, wild-mammen, residboot)");
}

void draw_permutation(ReplicateStream& stream, std::span<std::size_t> perm) noexcept {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = perm.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(stream.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
}

void permuted_outcome_from(const FitResult& fit, std::span<const std::size_t> perm,
                           std::span<double> out) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = fit.fitted[static_cast<Eigen::Index>(i)] +
                 fit.residuals[static_cast<Eigen::Index>(perm[i])];
    }
}

void multiplier_outcome_from(const FitResult& fit, std::span<const double> weights,
                             std::span<double> out) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out[i] = fit.fitted[k] + fit.residuals[k] * weights[i];
    }
}

double draw_wild_weight(WildWeights weights, ReplicateStream& stream) noexcept {
    if (weights == WildWeights::Rademacher) return (stream.next_u32() & 1u) ? 1.0 : -1.0;
    return stream.uniform() < MammenWeights::p_low ? MammenWeights::low : MammenWeights::high;
}

namespace {

void fill_permuted(const FitResult& fit, ReplicateStream& stream, OutcomeScratch& s,
                   std::span<double> out) {
    s.perm.resize(out.size());
    draw_permutation(stream, s.perm);
    permuted_outcome_from(fit, s.perm, out);
}

void fill_raw(const Dataset& data, ReplicateStream& stream, OutcomeScratch& s, std::span<double> out) {
    s.perm.resize(out.size());
    draw_permutation(stream, s.perm);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = data.y()[static_cast<Eigen::Index>(s.perm[i])];
}

void fill_sw(const FitResult& fit, ReplicateStream& stream, OutcomeScratch& s, std::span<double> out) {
    s.weights.resize(out.size());
    for (double& z : s.weights) z = stream.normal();
    multiplier_outcome_from(fit, s.weights, out);
}

void fill_wild(const FitResult& fit, WildWeights w, ReplicateStream& stream, OutcomeScratch& s,
               std::span<double> out) {
    s.weights.resize(out.size());
    for (double& v : s.weights) v = draw_wild_weight(w, stream);
    multiplier_outcome_from(fit, s.weights, out);
}

void fill_residual_bootstrap(const FitResult& fit, ReplicateStream& stream, std::span<double> out) {
    const std::size_t n = out.size();
    const double mean = fit.residuals.mean();
    for (std::size_t i = 0; i < n; ++i) {
        const auto pick = static_cast<Eigen::Index>(stream.below(n));
        out[i] = fit.fitted[static_cast<Eigen::Index>(i)] + (fit.residuals[pick] - mean);
    }
}

}  // namespace

void generate_outcome(const NullMethod& method, const Dataset& data, const FitResult& fit,
                      ReplicateStream& stream, OutcomeScratch& scratch, std::span<double> out) {
    switch (method.kind) {
        case NullMethod::Kind::PermuteResiduals: fill_permuted(fit, stream, scratch, out); return;
        case NullMethod::Kind::PermuteRawData: fill_raw(data, stream, scratch, out); return;
        case NullMethod::Kind::SWSimulation: fill_sw(fit, stream, scratch, out); return;
        case NullMethod::Kind::WildBootstrap: fill_wild(fit, method.weights, stream, scratch, out); return;
        case NullMethod::Kind::ResidualBootstrap: fill_residual_bootstrap(fit, stream, out); return;
    }
}

std::vector<double> permuted_outcome(const FitResult& fit, ReplicateStream& stream) {
    std::vector<double> out(static_cast<std::size_t>(fit.fitted.size()));
    OutcomeScratch s;
    fill_permuted(fit, stream, s, out);
    return out;
}

std::vector<double> raw_permuted_outcome(const Dataset& data, ReplicateStream& stream) {
    std::vector<double> out(data.n());
    OutcomeScratch s;
    fill_raw(data, stream, s, out);
    return out;
}

std::vector<double> sw_outcome(const FitResult& fit, ReplicateStream& stream) {
    std::vector<double> out(static_cast<std::size_t>(fit.fitted.size()));
    OutcomeScratch s;
    fill_sw(fit, stream, s, out);
    return out;
}

std::vector<double> wild_outcome(const FitResult& fit, WildWeights weights, ReplicateStream& stream) {
    std::vector<double> out(static_cast<std::size_t>(fit.fitted.size()));
    OutcomeScratch s;
    fill_wild(fit, weights, stream, s, out);
    return out;
}

std::vector<double> residual_bootstrap_outcome(const FitResult& fit, ReplicateStream& stream) {
    std::vector<double> out(static_cast<std::size_t>(fit.fitted.size()));
    fill_residual_bootstrap(fit, stream, out);
    return out;
}

}  // namespace gofperm
