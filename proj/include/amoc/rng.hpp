#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace amoc {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A stream is identified by (seed, stream_id): the seed is the 64-bit key and
/// the stream id fills the upper half of the 128-bit counter, so distinct
/// replications of a Monte Carlo experiment draw from disjoint counter ranges
/// no matter which worker runs them.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::string_view name = "philox4x32-10";

    Philox4x32(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    /// The raw bijection: ten rounds applied to `counter` under `key`.
    static Block encrypt(Block counter, Key key) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0,1) with 53 random bits.
    double uniform() noexcept;

    /// Standard normal via the Box-Muller transform; values come in pairs.
    double normal() noexcept;

private:
    void refill() noexcept;

    Key key_{};
    Block counter_{};
    Block buffer_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace amoc
