#ifndef PPROC_RNG_HPP
#define PPROC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace pproc {

// Counter-free splitmix64 stream. Distinct stream indices give independent
// substreams of the same seed, so results do not depend on how work is
// scheduled across threads.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index) {
        // scramble the pair so distinct stream indices land at unrelated
        // offsets of the underlying Weyl orbit (consecutive raw offsets
        // would make the streams shifted copies of each other)
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream_index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        state_ = z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0,1), never exactly 0 or 1.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate = 1.0) {
        return -std::log(uniform01()) / rate;
    }

    double cauchy(double scale = 1.0) {
        constexpr double pi = 3.141592653589793238462643383279502884;
        return scale * std::tan(pi * (uniform01() - 0.5));
    }

    double normal() {
        constexpr double two_pi = 6.283185307179586476925286766559005768;
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0))
            throw std::invalid_argument("poisson: mean must be nonnegative");
        if (mean == 0.0) return 0;
        if (mean < 30.0) return poisson_mult(mean);
        return poisson_ptrd(mean);
    }

private:
    // Product-of-uniforms method, O(mean) draws.
    std::uint64_t poisson_mult(double mean) {
        const double limit = std::exp(-mean);
        double prod = uniform01();
        std::uint64_t k = 0;
        while (prod > limit) {
            prod *= uniform01();
            ++k;
        }
        return k;
    }

    // Hoermann's transformed rejection with squeeze (PTRS), exact for
    // mean >= 10.
    std::uint64_t poisson_ptrd(double mu) {
        const double smu = std::sqrt(mu);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mu = std::log(mu);
        for (;;) {
            double u = uniform01() - 0.5;
            double v = uniform01();
            double us = 0.5 - std::fabs(u);
            double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
            if (us >= 0.07 && v <= v_r)
                return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
                kf * log_mu - mu - std::lgamma(kf + 1.0))
                return static_cast<std::uint64_t>(kf);
        }
    }

    std::uint64_t state_;
};

} // namespace pproc

#endif
