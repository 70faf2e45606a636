#pragma once

#include <array>
#include <cstdint>

namespace gofperm {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless.
[[nodiscard]] std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                                      std::array<std::uint32_t, 2> key) noexcept;

/// Separates the random draws used for different purposes under one seed.
enum class StreamDomain : std::uint32_t {
    Replicate = 0,
    Data = 1,
    SeedDerivation = 2,
};

/**
 * @brief Counter-based random stream for one replicate.
 *
 * The draws are a pure function of (master_seed, replicate_index, domain):
 * the seed is the Philox key and the replicate index occupies the high half
 * of the counter. Replicates therefore never share state and may be
 * evaluated in any order or on any thread.
 */
class ReplicateStream {
public:
    ReplicateStream(std::uint64_t master_seed, std::uint64_t replicate_index,
                    StreamDomain domain = StreamDomain::Replicate) noexcept;

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t replicate_index() const noexcept { return index_; }

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform integer in [0, bound), unbiased (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Standard normal (Box-Muller, both variates used).
    double normal() noexcept;

    /// Gamma(shape, scale) via Marsaglia-Tsang; shape < 1 uses the U^{1/a} boost.
    double gamma(double shape, double scale) noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t index_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> buffer_{};
    unsigned used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Child seed for the index-th sub-experiment of a parent seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t parent_seed, std::uint64_t index) noexcept;

}  // namespace gofperm
