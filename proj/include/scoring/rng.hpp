#pragma once

#include <cstdint>
#include <limits>

namespace scoring {

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator so it plugs
/// into the <random> distributions.
///
/// Streams are addressed by (seed, index): every Monte Carlo draw i is taken
/// from substream(seed, i), so results do not depend on how the index range
/// is split into chunks or threads.
class Rng
{
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept
    {
        std::uint64_t sm = seed;
        for (auto& s : state_)
            s = splitmix64(sm);
    }

    static Rng substream(std::uint64_t seed, std::uint64_t index) noexcept
    {
        std::uint64_t key = seed ^ 0x6a09e667f3bcc909ULL;
        std::uint64_t mixed = splitmix64(key);
        std::uint64_t at = index * 0x9e3779b97f4a7c15ULL;
        return Rng(mixed ^ splitmix64(at));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in the open interval (0, 1).
    double uniform_open() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) noexcept
    {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace scoring
