#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace wickpde {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) noexcept {
    constexpr std::uint32_t M0 = 0xD2511F53u;
    constexpr std::uint32_t M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{M0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{M1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

/// Independent random streams carved out of one master seed. Every draw is
/// a pure function of (master seed, stream tag, trajectory, step, position),
/// so results do not depend on evaluation order or thread schedule.
class CounterRng {
public:
    enum class Stream : std::uint32_t {
        noise = 1,
        initial_condition = 2,
        test = 3,
    };

    CounterRng(std::uint64_t master_seed, std::uint64_t trajectory, Stream stream) noexcept
        : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
          trajectory_(static_cast<std::uint32_t>(trajectory)),
          stream_(static_cast<std::uint32_t>(stream) ^ (static_cast<std::uint32_t>(trajectory >> 32) << 8)) {}

    /// out[i] = stddev * N(0,1), the i-th normal of block `step`.
    void fill_normal(std::uint64_t step, std::span<double> out, double stddev) const noexcept {
        const std::size_t n = out.size();
        std::size_t i = 0;
        for (std::uint32_t block = 0; i < n; ++block) {
            const auto r = philox4x32_10({block, static_cast<std::uint32_t>(step),
                                          trajectory_ ^ (static_cast<std::uint32_t>(step >> 32) << 24), stream_},
                                         key_);
            const std::uint64_t a = (std::uint64_t{r[0]} << 32) | r[1];
            const std::uint64_t b = (std::uint64_t{r[2]} << 32) | r[3];
            // u1 in (0, 1], u2 in [0, 1)
            const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
            const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
            const double rad = std::sqrt(-2.0 * std::log(u1));
            const double ang = 2.0 * std::numbers::pi * u2;
            out[i++] = stddev * (rad * std::cos(ang));
            if (i < n) out[i++] = stddev * (rad * std::sin(ang));
        }
    }

private:
    Philox4x32Key key_;
    std::uint32_t trajectory_;
    std::uint32_t stream_;
};

}  // namespace wickpde
