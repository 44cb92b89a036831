#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "magsync/errors.hpp"

namespace magsync {

/// Ordinary least squares y = slope*x + intercept with coefficient of
/// determination. r_squared is clamped to [0, 1]; a zero-variance target is
/// reported as a perfect fit.
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;

    double at(double x) const { return slope * x + intercept; }
};

inline FitResult fit_linear(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw Error(ErrorCode::invalid_argument, "fit_linear: size mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw Error(ErrorCode::invalid_argument, "fit_linear: need at least 3 points");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0)
        throw Error(ErrorCode::invalid_argument, "fit_linear: degenerate x values");

    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - fit.at(xs[i]);
        ss_res += r * r;
        ss_tot += (ys[i] - my) * (ys[i] - my);
    }
    fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return fit;
}

struct DescriptiveStats {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    double skewness = 0.0;
};

/// Sample statistics; stddev uses the n-1 denominator, skewness is the
/// moment ratio m3 / m2^(3/2).
inline DescriptiveStats descriptive_stats(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw Error(ErrorCode::invalid_argument, "descriptive_stats: need >= 2 values");

    DescriptiveStats s;
    s.min = values[0];
    s.max = values[0];
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    s.stddev = std::sqrt(m2 / static_cast<double>(n - 1));
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    return s;
}

/// Percentile by linear interpolation on the sorted copy; p in [0, 100].
inline double percentile(std::span<const double> values, double p) {
    if (values.empty()) throw Error(ErrorCode::invalid_argument, "percentile: empty input");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace magsync
