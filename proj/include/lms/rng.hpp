#ifndef LMS_RNG_HPP
#define LMS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace lms {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// Derive an independent stream seed from (seed, salt, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
    return mix64(mix64(seed ^ salt) + kGolden * index);
}

/// splitmix64 generator.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return (double)(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, m), m > 0, via fixed-point multiply.
    std::uint64_t below(std::uint64_t m) {
        return (std::uint64_t)(((unsigned __int128)next() * m) >> 64);
    }

    /// Poisson variate by CDF inversion.  Suitable for moderate means.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        double u = uniform01();
        double p = std::exp(-lambda);
        double f = p;
        int k = 0;
        while (u >= f && k < 1 << 20) {
            ++k;
            p *= lambda / k;
            f += p;
        }
        return k;
    }

private:
    std::uint64_t state_;
};

} // namespace lms

#endif
