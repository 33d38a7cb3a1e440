#pragma once
//
// Counter-based pseudo-random numbers.
//
// Every random draw in the library is a pure function of (seed, domain, counter):
// streams, routing coins and generator draws can be reproduced independently of
// evaluation order, which is what makes parallel trials deterministic.  The mixer
// is the SplitMix64 finalizer chained over the three words; it passes the usual
// avalanche checks and is plenty for Monte Carlo work (we are not doing crypto).
//
#include <cstdint>

namespace tsra {

// Purpose tags keep independent uses of the same seed from sharing a stream.
enum class RngDomain : std::uint64_t {
    stream    = 0,  // request type sequence
    routing   = 1,  // randomized-rounding coins
    generator = 2,  // random instance construction
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace detail

// 64 uniform bits for (seed, domain, counter).
inline std::uint64_t rng_bits(std::uint64_t seed, RngDomain domain, std::uint64_t counter) {
    std::uint64_t h = detail::splitmix64(seed);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(domain));
    h = detail::splitmix64(h ^ counter);
    return h;
}

// Uniform double in [0, 1) with 53 random bits.
inline double rng_uniform(std::uint64_t seed, RngDomain domain, std::uint64_t counter) {
    return static_cast<double>(rng_bits(seed, domain, counter) >> 11) * 0x1.0p-53;
}

// Convenience wrapper that advances its own counter; still pure in (seed, domain).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, RngDomain domain) : seed_(seed), domain_(domain) {}

    double uniform() { return rng_uniform(seed_, domain_, counter_++); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t bits() { return rng_bits(seed_, domain_, counter_++); }

private:
    std::uint64_t seed_;
    RngDomain domain_;
    std::uint64_t counter_ = 0;
};

} // namespace tsra
