#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "magsync/errors.hpp"
#include "magsync/rng.hpp"

namespace magsync {

/// Maps true time onto a sensor's local clock:
///   local(t) = offset + (1 + drift) * t + quad * t^2
/// drift is dimensionless (ppm scale); quad models a small non-linear
/// component and defaults to zero. jitter_sigma is applied per sample when
/// timestamping, never inside local_from_true itself.
struct ClockModel {
    double offset_s = 0.0;
    double drift = 0.0;
    double quad_per_s = 0.0;
    double jitter_sigma_s = 0.0;

    double local_from_true(double t_true_s) const {
        return offset_s + (1.0 + drift) * t_true_s + quad_per_s * t_true_s * t_true_s;
    }

    /// Exact inverse for quad = 0, Newton otherwise (monotonicity is a
    /// validated invariant, so Newton converges quadratically).
    double true_from_local(double t_local_s) const {
        if (quad_per_s == 0.0) return (t_local_s - offset_s) / (1.0 + drift);
        double t = (t_local_s - offset_s) / (1.0 + drift);
        for (int iter = 0; iter < 60; ++iter) {
            const double f = local_from_true(t) - t_local_s;
            const double fp = 1.0 + drift + 2.0 * quad_per_s * t;
            const double step = f / fp;
            t -= step;
            if (std::abs(step) < 1e-13) break;
        }
        return t;
    }

    /// Rejects configurations that are non-monotone over [0, horizon] or
    /// whose jitter could reorder adjacent samples.
    void validate(double horizon_s, double sample_interval_s) const {
        if (std::abs(drift) >= 1e-3)
            throw Error(ErrorCode::invalid_argument, "clock drift magnitude must be < 1e-3");
        if (std::abs(quad_per_s) * horizon_s >= 1e-4)
            throw Error(ErrorCode::invalid_argument,
                        "quadratic clock term too large for the session horizon");
        // derivative (1+drift) + 2*quad*t is linear in t: endpoints suffice
        if (1.0 + drift + 2.0 * quad_per_s * 0.0 <= 0.0 ||
            1.0 + drift + 2.0 * quad_per_s * horizon_s <= 0.0)
            throw Error(ErrorCode::invalid_argument, "clock mapping is not strictly increasing");
        if (jitter_sigma_s < 0.0)
            throw Error(ErrorCode::invalid_argument, "jitter sigma must be >= 0");
        if (sample_interval_s > 0.0 && jitter_sigma_s >= 0.5 * sample_interval_s)
            throw Error(ErrorCode::invalid_argument,
                        "jitter sigma must be below half the sampling interval");
    }
};

struct TimedSample {
    double t_true_s;
    double t_local_s;
};

/// Sampling instants over [t_start, t_start + duration): a true-time grid at
/// 1/rate spacing with a uniformly random initial phase, timestamped through
/// the clock with per-sample Gaussian jitter. Deterministic given the seed.
inline std::vector<TimedSample> sample_times(const ClockModel& clock, double rate_hz,
                                             double t_start_true_s, double duration_s,
                                             std::uint64_t seed) {
    if (!(rate_hz > 0)) throw Error(ErrorCode::invalid_argument, "rate must be > 0");
    if (!(duration_s > 0)) throw Error(ErrorCode::invalid_argument, "duration must be > 0");
    clock.validate(t_start_true_s + duration_s, 1.0 / rate_hz);

    Rng rng(seed);
    const double interval = 1.0 / rate_hz;
    const double phase = rng.uniform() * interval;
    std::vector<TimedSample> out;
    out.reserve(static_cast<std::size_t>(duration_s * rate_hz) + 2);
    for (std::int64_t k = 0;; ++k) {
        const double t = t_start_true_s + phase + static_cast<double>(k) * interval;
        if (t >= t_start_true_s + duration_s) break;
        const double local = clock.local_from_true(t) + rng.normal(clock.jitter_sigma_s);
        out.push_back({t, local});
    }
    return out;
}

}  // namespace magsync
