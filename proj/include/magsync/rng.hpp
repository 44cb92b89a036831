#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace magsync {

/// splitmix64 step; used to derive independent substream seeds so that
/// per-sensor / per-repetition streams never overlap.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. Distributions are implemented explicitly
/// (not via std:: distribution objects) so that identical seeds produce
/// identical streams on any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Gaussian with mean 0 via Box-Muller (one fresh pair per draw).
    double normal(double sigma) {
        if (sigma <= 0.0) return 0.0;
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace magsync
