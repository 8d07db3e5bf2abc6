#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace paoi {

/// xoshiro256++ with the 2^128-step jump. Satisfies
/// UniformRandomBitGenerator, so it plugs into <random> distributions.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Advance by 2^128 draws.
    void jump() noexcept;

    /// Uniform on (0, 1], never zero, so -log(u) is always finite.
    double uniform_pos() noexcept {
        return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
    }

    const std::array<std::uint64_t, 4>& state() const { return s_; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

/// Stream for replication `index` under `seed`: the seeded generator jumped
/// `index` times, so streams for different indices never overlap.
Xoshiro256pp replication_stream(std::uint64_t seed, std::uint64_t index);

}  // namespace paoi
