// Counter-based random number generation.
//
// Every random draw in the simulator is a pure function of
// (scenario seed, run index, tick, emitter, purpose, draw index), so results
// are independent of evaluation order, thread schedule, and SIMD lane width.
// The generator is the splitmix64 output function applied to an affine
// counter sequence: value(i) = mix64(base + i * kGamma).
#pragma once

#include <cstdint>
#include <initializer_list>

namespace rti {

using u128 = unsigned __int128;

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives a stream key from a word sequence. Distinct fixed-arity sequences
// with distinct salts yield statistically independent streams.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x243F6A8885A308D3ull; // pi fractional bits
    for (std::uint64_t w : words) {
        h = mix64(h ^ w);
        h += kGamma;
    }
    return h;
}

// Stream salts. Each purpose reads from its own counter stream.
inline constexpr std::uint64_t kSaltRun        = 0x52554E00ull;
inline constexpr std::uint64_t kSaltAttempt    = 0x41545400ull;
inline constexpr std::uint64_t kSaltIndividual = 0x494E4400ull;
inline constexpr std::uint64_t kSaltBlock      = 0x424C4B00ull;
inline constexpr std::uint64_t kSaltCollapse   = 0x434F4C00ull;

// Sequential view over one counter stream.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t base) : base_(base) {}

    std::uint64_t next_u64() { return mix64(base_ + (counter_++) * kGamma); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    u128 next_u128() {
        std::uint64_t hi = next_u64();
        std::uint64_t lo = next_u64();
        return (static_cast<u128>(hi) << 64) | lo;
    }

    // Uniform in [0, n). Modulo reduction; the bias is below 2^-64 for any
    // n representable here and cannot affect frequency tests.
    u128 next_below(u128 n) { return n <= 1 ? 0 : next_u128() % n; }

    std::uint64_t base() const { return base_; }
    std::uint64_t consumed() const { return counter_; }
    void skip(std::uint64_t n) { counter_ += n; }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

// Maps a probability to the u64 acceptance threshold: draw < threshold fires
// with probability round(p * 2^64) / 2^64. p >= 1 must be special-cased by
// the caller; kernels compare strictly against u64.
std::uint64_t threshold_from_prob(double p);

} // namespace rti
