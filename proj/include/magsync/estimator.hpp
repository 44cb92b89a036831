#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "magsync/errors.hpp"
#include "magsync/physics.hpp"
#include "magsync/sample_series.hpp"
#include "magsync/statistics.hpp"

namespace magsync {

/// Steady-state levels of a drive-modulated magnetometer trace, the flux
/// delta K between them and the per-sample noise scale.
struct BaselineEstimate {
    double b_low_t = 0.0;
    double b_high_t = 0.0;
    double flux_delta_t = 0.0;  // K = b_high - b_low
    double noise_sigma_t = 0.0;
};

/// A sample acquired mid-transient. transient_index counts switch events
/// since the procedure started (connects are odd, disconnects even);
/// flux_above_low is the raw value relative to the low baseline.
struct Hit {
    int transient_index = 0;
    double t_local_s = 0.0;
    double flux_above_low_t = 0.0;
    bool rising = true;
};

struct SyncEstimate {
    std::string sensor_id;
    double t1_s = 0.0;    // fitted timestamp of a hit on the first transient
    double k1_t = 0.0;    // fitted flux of that hit (rising-curve convention)
    double t_tr_s = 0.0;  // elapsed transient time recovered from k1
    double t0_s = 0.0;    // t1 - t_tr: procedure start in local time
    int n_hits = 0;
    double tau_s = 0.0;
    FitResult time_fit;
    FitResult flux_fit;
    BaselineEstimate baselines;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    return 0.5 * (*std::max_element(v.begin(), mid) + upper);
}

/// Hit qualification margin: generous against noise, and a fixed fraction
/// of K so near-baseline / near-saturation samples are never used.
inline double hit_margin(const BaselineEstimate& base) {
    return std::max(4.0 * base.noise_sigma_t, 0.005 * base.flux_delta_t);
}

}  // namespace detail

/// Splits the value distribution at the midpoint of its trimmed extremes and
/// takes cluster medians. The noise scale is the pooled standard deviation of
/// samples within 3 sigma of their cluster median, seeded by a MAD estimate
/// so mid-transient samples cannot inflate it.
inline BaselineEstimate estimate_baselines(const SampleSeries& series) {
    series.validate();
    if (series.samples.size() < 50)
        throw Error(ErrorCode::series_too_short, "need at least 50 samples for baselines");

    std::vector<double> values;
    values.reserve(series.samples.size());
    for (const auto& s : series.samples) values.push_back(s.value);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    const double lo_trim = sorted[static_cast<std::size_t>(0.01 * static_cast<double>(n - 1))];
    const double hi_trim = sorted[static_cast<std::size_t>(0.99 * static_cast<double>(n - 1))];
    const double mid = 0.5 * (lo_trim + hi_trim);

    std::vector<double> low, high;
    for (double v : values) (v < mid ? low : high).push_back(v);
    if (low.size() < 5 || high.size() < 5)
        throw Error(ErrorCode::no_drive_signal, "value distribution is unimodal");

    BaselineEstimate base;
    base.b_low_t = detail::median_of(low);
    base.b_high_t = detail::median_of(high);
    base.flux_delta_t = base.b_high_t - base.b_low_t;

    double sum_sq = 0.0;
    std::size_t kept = 0;
    for (const auto* cluster : {&low, &high}) {
        const double center = cluster == &low ? base.b_low_t : base.b_high_t;
        std::vector<double> devs;
        devs.reserve(cluster->size());
        for (double v : *cluster) devs.push_back(std::abs(v - center));
        const double scale = 1.4826 * detail::median_of(devs);
        for (double v : *cluster) {
            const double d = v - center;
            if (scale > 0.0 ? std::abs(d) <= 3.0 * scale : d == 0.0) {
                sum_sq += d * d;
                ++kept;
            }
        }
    }
    base.noise_sigma_t = kept > 2 ? std::sqrt(sum_sq / static_cast<double>(kept - 2)) : 0.0;

    if (!(base.flux_delta_t > 0) || base.flux_delta_t <= 8.0 * base.noise_sigma_t)
        throw Error(ErrorCode::no_drive_signal,
                    "flux delta not separable from noise (no drive signal present)");
    return base;
}

/// A sample is a hit iff its value sits strictly between the padded
/// baselines and its neighbours sit on opposite steady levels. Both switch
/// directions produce usable transients; direction is recorded so the flux
/// can later be reflected onto the rising curve.
inline std::vector<Hit> detect_hits(const SampleSeries& series, const BaselineEstimate& base,
                                    double drive_freq_hz) {
    series.validate();
    if (!(drive_freq_hz > 0))
        throw Error(ErrorCode::invalid_argument, "drive frequency must be > 0");
    const double span = series.span_s();
    const auto& samples = series.samples;
    if (samples.size() >= 2) {
        const double mean_interval = span / static_cast<double>(samples.size() - 1);
        // half-periods must be resolved by several samples or "neighbour on
        // the other level" is meaningless
        if (mean_interval > 0.25 / (2.0 * drive_freq_hz))
            throw Error(ErrorCode::sample_rate_too_low,
                        "sampling too slow to qualify transient hits");
    }

    const double eps = detail::hit_margin(base);
    std::vector<Hit> hits;
    for (std::size_t j = 1; j + 1 < samples.size(); ++j) {
        const double v = samples[j].value;
        if (!(v > base.b_low_t + eps && v < base.b_high_t - eps)) continue;
        const bool pred_low = std::abs(samples[j - 1].value - base.b_low_t) <= eps;
        const bool pred_high = std::abs(samples[j - 1].value - base.b_high_t) <= eps;
        const bool succ_low = std::abs(samples[j + 1].value - base.b_low_t) <= eps;
        const bool succ_high = std::abs(samples[j + 1].value - base.b_high_t) <= eps;
        if (pred_low && succ_high)
            hits.push_back({0, samples[j].t_local_s, v - base.b_low_t, true});
        else if (pred_high && succ_low)
            hits.push_back({0, samples[j].t_local_s, v - base.b_low_t, false});
    }
    return hits;
}

/// Local time around which the first transient must have started: the
/// midpoint of the first above-baseline sample and its predecessor. The
/// error is below half a sample interval, far inside the quarter
/// half-period that index rounding tolerates.
inline double find_first_rise(const SampleSeries& series, const BaselineEstimate& base) {
    const double eps = detail::hit_margin(base);
    const auto& samples = series.samples;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        if (samples[j].value > base.b_low_t + eps) {
            if (j == 0)
                throw Error(ErrorCode::no_initial_baseline,
                            "series starts above the low baseline; cannot anchor indices");
            return 0.5 * (samples[j - 1].t_local_s + samples[j].t_local_s);
        }
    }
    throw Error(ErrorCode::no_drive_signal, "no sample ever leaves the low baseline");
}

/// Assigns absolute transient indices: i = round(2f * (t - origin)) + 1,
/// anchored on the first departure from baseline. Rejects the series when a
/// rounding residual exceeds a quarter of the half-period quantum, or when a
/// hit's direction contradicts its index parity (connects are odd).
inline std::vector<Hit> assign_indices(std::vector<Hit> hits, double drive_freq_hz,
                                       double t_first_rise_s) {
    if (hits.empty()) throw Error(ErrorCode::too_few_hits, "no hits to index");
    if (!(drive_freq_hz > 0))
        throw Error(ErrorCode::invalid_argument, "drive frequency must be > 0");
    for (auto& hit : hits) {
        const double q = 2.0 * drive_freq_hz * (hit.t_local_s - t_first_rise_s);
        const double rounded = std::round(q);
        if (std::abs(q - rounded) > 0.25)
            throw Error(ErrorCode::unstable_indices,
                        "index residual above a quarter period; clock unstable or wrong "
                        "drive frequency");
        hit.transient_index = static_cast<int>(rounded) + 1;
        if (hit.transient_index < 1)
            throw Error(ErrorCode::unstable_indices, "hit before the first transient");
        if ((hit.transient_index % 2 == 1) != hit.rising)
            throw Error(ErrorCode::unstable_indices,
                        "hit direction contradicts transient parity");
    }
    return hits;
}

/// Recovers the start of a synchronisation procedure from one magnetometer
/// trace with sub-sample accuracy: qualify hits, index them, fit hit times
/// and fluxes linearly against transient index, evaluate both fits at the
/// first transient and invert the transient curve for the elapsed time.
inline SyncEstimate estimate_t0(const SampleSeries& series, const InductorSpec& spec,
                                double drive_freq_hz) {
    spec.validate();
    series.validate();
    if (series.span_s() < 3.0)
        throw Error(ErrorCode::series_too_short, "series must span at least 3 s");

    const BaselineEstimate base = estimate_baselines(series);
    std::vector<Hit> hits = detect_hits(series, base, drive_freq_hz);
    if (hits.size() < 3)
        throw Error(ErrorCode::too_few_hits, "need at least 3 hits, found " +
                                                 std::to_string(hits.size()));
    hits = assign_indices(std::move(hits), drive_freq_hz, find_first_rise(series, base));

    std::vector<double> idx, times, fluxes;
    idx.reserve(hits.size());
    times.reserve(hits.size());
    fluxes.reserve(hits.size());
    for (const auto& hit : hits) {
        idx.push_back(static_cast<double>(hit.transient_index));
        times.push_back(hit.t_local_s);
        // reflect disconnect transients onto the rising curve: K exp(-s/tau)
        // becomes K (1 - exp(-s/tau))
        fluxes.push_back(hit.rising ? hit.flux_above_low_t
                                    : base.flux_delta_t - hit.flux_above_low_t);
    }

    SyncEstimate est;
    est.sensor_id = series.sensor_id;
    est.n_hits = static_cast<int>(hits.size());
    est.tau_s = spec.time_constant_s();
    est.baselines = base;
    est.time_fit = fit_linear(idx, times);
    est.flux_fit = fit_linear(idx, fluxes);
    est.t1_s = est.time_fit.at(1.0);
    est.k1_t = est.flux_fit.at(1.0);

    const double ratio = est.k1_t / base.flux_delta_t;
    if (!(ratio > 0.0 && ratio < 1.0))
        throw Error(ErrorCode::flux_out_of_range,
                    "extrapolated flux outside (0, K)");
    est.t_tr_s = inverse_flux_time(spec, ratio);
    if (!(est.t_tr_s > 0.0 && est.t_tr_s < 5.0 * est.tau_s))
        throw Error(ErrorCode::transient_out_of_range,
                    "recovered transient time outside (0, 5 tau)");
    est.t0_s = est.t1_s - est.t_tr_s;
    return est;
}

struct QualityReport {
    int n_hits = 0;
    double time_fit_r2 = 0.0;
    double flux_fit_r2 = 0.0;
    double t_tr_over_tau = 0.0;
    std::vector<std::string> warnings;
};

/// Post-estimate quality flags: fewer than 20 hits means the procedure ran
/// shorter than the recommended duration; a transient time near 5 tau means
/// the anchor hit sat almost in saturation.
inline QualityReport sync_quality(const SyncEstimate& est) {
    QualityReport report;
    report.n_hits = est.n_hits;
    report.time_fit_r2 = est.time_fit.r_squared;
    report.flux_fit_r2 = est.flux_fit.r_squared;
    report.t_tr_over_tau = est.tau_s > 0 ? est.t_tr_s / est.tau_s : 0.0;
    if (est.n_hits < 20)
        report.warnings.push_back("below-recommended-duration");
    if (report.t_tr_over_tau > 4.9)
        report.warnings.push_back("near-saturation-hit");
    return report;
}

}  // namespace magsync
