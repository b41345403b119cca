#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace nullhom {

namespace detail {

// Philox4x32-10 block function (Salmon et al., counter-based RNG).
// Pure integer arithmetic, so streams are bit-identical on every platform.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
    constexpr std::uint64_t M0 = 0xD2511F53ULL;
    constexpr std::uint64_t M1 = 0xCD9E8D57ULL;
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = M0 * ctr[0];
        std::uint64_t p1 = M1 * ctr[2];
        std::array<std::uint32_t, 4> next{
            static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
            static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
            static_cast<std::uint32_t>(p0)};
        ctr = next;
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Counter-based generator. A (seed, stream) pair names an independent stream;
// the n-th draw is a pure function of (seed, stream, n).
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}
    explicit RandomSource(SeedRecord rec) : RandomSource(rec.seed, rec.stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    SeedRecord record() const { return {seed_, stream_}; }

    // Derived stream i; deterministic and collision-resistant in (stream, i).
    RandomSource substream(std::uint64_t i) const {
        return RandomSource(seed_, detail::splitmix64(stream_ ^ detail::splitmix64(i + 1)));
    }

    std::uint64_t next_u64() {
        if (pos_ == 2) refill();
        return buf_[pos_++];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Index sampled from a finite probability row (inverse CDF; the final
    // bucket absorbs any rounding slack).
    int sample_index(std::span<const double> probs) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

private:
    void refill() {
        std::array<std::uint32_t, 4> ctr{
            static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
        auto out = detail::philox4x32_10(ctr, key);
        buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        ++counter_;
        pos_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int pos_ = 2;
};

}  // namespace nullhom
