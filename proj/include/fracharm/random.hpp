// SPDX-License-Identifier: Apache-2.0
//! \file random.hpp
//! Counter-based random streams (Philox4x32-10) with explicit transforms to
//! uniforms and normals, so sequences are identical on every platform.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace fracharm {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

//! The Philox4x32 bijection with 10 rounds.
inline PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key)
{
    constexpr std::uint64_t m0 = 0xD2511F53u;
    constexpr std::uint64_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round)
    {
        if (round > 0)
        {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = m0 * ctr[0];
        const std::uint64_t p1 = m1 * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/*!
 * Reproducible stream identified by (seed, stream_id, substream).
 *
 * The key is the 64-bit seed; the counter is (index_lo, index_hi, stream_id,
 * substream), so distinct ids never share a counter value. Satisfies
 * std::uniform_random_bit_generator with 64-bit output.
 */
class RandomStream {
  public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint32_t stream_id, std::uint32_t substream = 0)
        : seed_(seed), stream_id_(stream_id), substream_(substream)
    {
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint32_t stream_id() const noexcept { return stream_id_; }
    std::uint32_t substream_id() const noexcept { return substream_; }

    //! Independent child stream sharing seed and stream id.
    RandomStream substream(std::uint32_t k) const { return RandomStream(seed_, stream_id_, k); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        const std::uint64_t hi = next32();
        const std::uint64_t lo = next32();
        return (hi << 32) | lo;
    }

    //! Uniform on the open interval (0, 1) with 53 random bits.
    double uniform()
    {
        const std::uint64_t bits = (*this)() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    //! Standard normal by the Box-Muller transform; pairs are cached.
    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

  private:
    std::uint32_t next32()
    {
        if (used_ == 4)
        {
            const PhiloxBlock ctr = {static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                                     stream_id_, substream_};
            const PhiloxKey key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
            block_ = philox4x32_10(ctr, key);
            ++index_;
            used_ = 0;
        }
        return block_[used_++];
    }

    std::uint64_t seed_;
    std::uint32_t stream_id_;
    std::uint32_t substream_;
    std::uint64_t index_ = 0;
    PhiloxBlock block_{};
    unsigned used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fracharm
