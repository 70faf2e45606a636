#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gofperm/linreg.hpp"
#include "gofperm/rng.hpp"

namespace gofperm {

enum class WildWeights { Rademacher, Mammen };

/// How replicate outcomes under the null are produced.
struct NullMethod {
    enum class Kind { PermuteResiduals, PermuteRawData, SWSimulation, WildBootstrap, ResidualBootstrap };

    Kind kind = Kind::PermuteResiduals;
    WildWeights weights = WildWeights::Rademacher;  ///< only read for WildBootstrap

    static NullMethod permute_residuals() { return {}; }
    static NullMethod permute_raw() { return {Kind::PermuteRawData}; }
    static NullMethod sw_simulation() { return {Kind::SWSimulation}; }
    static NullMethod wild(WildWeights w = WildWeights::Rademacher) { return {Kind::WildBootstrap, w}; }
    static NullMethod residual_bootstrap() { return {Kind::ResidualBootstrap}; }

    /// CLI spelling: perm, rawperm, sw, wild, residboot.
    [[nodiscard]] std::string name() const;
    static NullMethod parse(const std::string& name);
};

/// Mammen's two-point weights: mean 0, variance 1, third moment 1.
struct MammenWeights {
    static constexpr double kSqrt5 = 2.2360679774997896964;
    static constexpr double low = -(kSqrt5 - 1.0) / 2.0;
    static constexpr double high = (kSqrt5 + 1.0) / 2.0;
    static constexpr double p_low = (kSqrt5 + 1.0) / (2.0 * kSqrt5);
};

/// Uniform random permutation of 0..n-1 by Fisher-Yates.
void draw_permutation(ReplicateStream& stream, std::span<std::size_t> perm) noexcept;

/// y_k = fitted + e[perm].
void permuted_outcome_from(const FitResult& fit, std::span<const std::size_t> perm,
                           std::span<double> out) noexcept;
/// y_k = fitted + e * w (elementwise); SW and wild share this form.
void multiplier_outcome_from(const FitResult& fit, std::span<const double> weights,
                             std::span<double> out) noexcept;

[[nodiscard]] std::vector<double> permuted_outcome(const FitResult& fit, ReplicateStream& stream);
[[nodiscard]] std::vector<double> raw_permuted_outcome(const Dataset& data, ReplicateStream& stream);
[[nodiscard]] std::vector<double> sw_outcome(const FitResult& fit, ReplicateStream& stream);
[[nodiscard]] std::vector<double> wild_outcome(const FitResult& fit, WildWeights weights,
                                               ReplicateStream& stream);
[[nodiscard]] std::vector<double> residual_bootstrap_outcome(const FitResult& fit,
                                                             ReplicateStream& stream);

[[nodiscard]] double draw_wild_weight(WildWeights weights, ReplicateStream& stream) noexcept;

/// Scratch for generate_outcome; one per worker.
struct OutcomeScratch {
    std::vector<std::size_t> perm;
    std::vector<double> weights;
};

/// Dispatches on method; writes the replicate outcome for one stream into out.
void generate_outcome(const NullMethod& method, const Dataset& data, const FitResult& fit,
                      ReplicateStream& stream, OutcomeScratch& scratch, std::span<double> out);

}  // namespace gofperm
