#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magsync/estimator.hpp"
#include "magsync/rng.hpp"
#include "magsync/simulator.hpp"
#include "magsync/statistics.hpp"

namespace magsync {

/// Aggregate of repeated accuracy runs, one row of the descriptive table.
/// dt = t_meas - t_calc: reference edge time minus estimated start.
struct AccuracyStats {
    double mean_dt_s = 0.0;
    double std_dt_s = 0.0;
    double min_dt_s = 0.0;
    double max_dt_s = 0.0;
    double mean_k = 0.0;
    double std_k = 0.0;
    double mean_r2 = 0.0;
    double std_r2 = 0.0;
    double skewness_dt = 0.0;
    double mean_hit_spacing_s = 0.0;
    int n_runs = 0;
    int n_failures = 0;
    std::vector<double> raw_dt_s;  // per-run deltas, for percentiles downstream
};

namespace detail {

/// The measured start time the estimate is compared against: the ADC edge
/// for the sensor that owns the reference channel, the clock-mapped true
/// edge (no firmware delay on that path) for everyone else.
inline double measured_start(const SyncRun& run, const Scenario& scenario,
                             std::size_t sensor_index) {
    if (sensor_index == 0 && run.adc.has_value())
        return measure_reference_edge(*run.adc);
    return scenario.sensors[sensor_index].clock.local_from_true(run.truth.t0_true_s);
}

}  // namespace detail

/// Repeats the 10 s procedure with fresh seeds and aggregates dt, hit count
/// and time-fit quality. Estimator rejections are counted, not fatal.
inline AccuracyStats experiment_accuracy(const Scenario& scenario, int repetitions) {
    if (repetitions < 2)
        throw Error(ErrorCode::invalid_argument, "need at least 2 repetitions");
    scenario.validate();

    std::vector<double> dts, ks, r2s, spacings;
    int failures = 0;
    for (int rep = 0; rep < repetitions; ++rep) {
        Scenario run_scenario = scenario;
        run_scenario.seed = derive_seed(scenario.seed, static_cast<std::uint64_t>(rep));
        const SyncRun run = run_sync_procedure(run_scenario);
        for (std::size_t j = 0; j < run.magnetometer.size(); ++j) {
            try {
                const SyncEstimate est =
                    estimate_t0(run.magnetometer[j], scenario.inductor, scenario.drive_freq_hz);
                dts.push_back(detail::measured_start(run, scenario, j) - est.t0_s);
                ks.push_back(static_cast<double>(est.n_hits));
                r2s.push_back(est.time_fit.r_squared);
                if (est.n_hits > 1) {
                    const auto hits =
                        detect_hits(run.magnetometer[j], est.baselines, scenario.drive_freq_hz);
                    spacings.push_back((hits.back().t_local_s - hits.front().t_local_s) /
                                       static_cast<double>(hits.size() - 1));
                }
            } catch (const Error&) {
                ++failures;
            }
        }
    }
    if (dts.size() < 2)
        throw Error(ErrorCode::too_few_hits, "too few successful repetitions to aggregate");

    AccuracyStats stats;
    const DescriptiveStats ddt = descriptive_stats(dts);
    const DescriptiveStats dk = descriptive_stats(ks);
    const DescriptiveStats dr2 = descriptive_stats(r2s);
    stats.mean_dt_s = ddt.mean;
    stats.std_dt_s = ddt.stddev;
    stats.min_dt_s = ddt.min;
    stats.max_dt_s = ddt.max;
    stats.skewness_dt = ddt.skewness;
    stats.mean_k = dk.mean;
    stats.std_k = dk.stddev;
    stats.mean_r2 = dr2.mean;
    stats.std_r2 = dr2.stddev;
    double spacing_sum = 0.0;
    for (double s : spacings) spacing_sum += s;
    stats.mean_hit_spacing_s = spacings.empty() ? 0.0 : spacing_sum / spacings.size();
    stats.n_runs = static_cast<int>(dts.size());
    stats.n_failures = failures;
    stats.raw_dt_s = std::move(dts);
    return stats;
}

struct DurationPoint {
    double duration_s = 0.0;
    double mean_hits = 0.0;
    double std_hits = 0.0;
    double mean_dt_s = 0.0;
    double std_dt_s = 0.0;
    int n_runs = 0;
    int n_failures = 0;
};

struct DurationStudy {
    std::vector<DurationPoint> points;
    FitResult hits_regression;  // mean hits vs duration
    std::vector<std::pair<int, double>> runs;  // (hits, dt) of every successful run
};

/// Sweeps the procedure duration and records how hit count and accuracy
/// respond. Durations too short for the estimator are kept in the hit
/// statistics and reported as failures.
inline DurationStudy experiment_duration(const Scenario& scenario, int max_duration_s = 30,
                                         int reps_per_duration = 10) {
    if (max_duration_s < 1 || reps_per_duration < 1)
        throw Error(ErrorCode::invalid_argument, "invalid duration sweep");
    DurationStudy study;
    std::vector<double> durations, mean_hits;
    for (int d = 1; d <= max_duration_s; ++d) {
        Scenario base = scenario;
        base.sync_duration_s = static_cast<double>(d);
        std::vector<double> hit_counts, dts;
        int failures = 0;
        for (int rep = 0; rep < reps_per_duration; ++rep) {
            Scenario run_scenario = base;
            run_scenario.seed =
                derive_seed(scenario.seed, static_cast<std::uint64_t>(d) * 1000 +
                                               static_cast<std::uint64_t>(rep));
            const SyncRun run = run_sync_procedure(run_scenario);
            const auto& series = run.magnetometer.front();
            int hits_here = 0;
            try {
                const BaselineEstimate base_est = estimate_baselines(series);
                hits_here = static_cast<int>(
                    detect_hits(series, base_est, scenario.drive_freq_hz).size());
                hit_counts.push_back(static_cast<double>(hits_here));
            } catch (const Error&) {
                ++failures;
                continue;
            }
            try {
                const SyncEstimate est =
                    estimate_t0(series, scenario.inductor, scenario.drive_freq_hz);
                const double dt = detail::measured_start(run, scenario, 0) - est.t0_s;
                dts.push_back(dt);
                study.runs.emplace_back(hits_here, dt);
            } catch (const Error&) {
                ++failures;
            }
        }
        DurationPoint point;
        point.duration_s = static_cast<double>(d);
        point.n_failures = failures;
        point.n_runs = static_cast<int>(dts.size());
        if (hit_counts.size() >= 2) {
            const DescriptiveStats hs = descriptive_stats(hit_counts);
            point.mean_hits = hs.mean;
            point.std_hits = hs.stddev;
        } else if (hit_counts.size() == 1) {
            point.mean_hits = hit_counts.front();
        }
        if (dts.size() >= 2) {
            const DescriptiveStats ds = descriptive_stats(dts);
            point.mean_dt_s = ds.mean;
            point.std_dt_s = ds.stddev;
        } else if (dts.size() == 1) {
            point.mean_dt_s = dts.front();
        }
        study.points.push_back(point);
        durations.push_back(point.duration_s);
        mean_hits.push_back(point.mean_hits);
    }
    study.hits_regression = fit_linear(durations, mean_hits);
    return study;
}

/// Periodic synchronisation events against true time for one sensor.
struct DriftRecord {
    std::string sensor_id;
    std::vector<double> event_times_local_s;
    std::vector<double> reference_times_s;
    std::vector<double> deviations_s;
    FitResult regression;  // deviation vs reference time
};

/// Runs a synchronisation event every `interval_s` (first at interval_s,
/// last at total_s) for one fleet whose per-sensor drifts are given, and
/// regresses each sensor's local-vs-reference deviation over the session.
inline std::vector<DriftRecord> experiment_drift(const Scenario& scenario, double interval_s,
                                                 double total_s,
                                                 std::span<const double> drifts) {
    if (!(interval_s > 0) || total_s < 2.0 * interval_s)
        throw Error(ErrorCode::invalid_argument, "need at least two drift events");
    if (drifts.empty())
        throw Error(ErrorCode::invalid_argument, "need at least one sensor drift");
    scenario.validate();

    // fleet template: first configured sensor, with per-sensor drift, a small
    // random boot offset, and an ODR error that keeps the beat walking
    Scenario fleet = scenario;
    fleet.adc_rate_hz = 0.0;
    fleet.sensors.clear();
    Rng rng(derive_seed(scenario.seed, 0xd21f7));
    for (std::size_t j = 0; j < drifts.size(); ++j) {
        SensorConfig sensor = scenario.sensors.front();
        sensor.sensor_id = "imu" + std::to_string(j + 1);
        sensor.clock.drift = drifts[j];
        sensor.clock.offset_s = rng.uniform(-0.5e-3, 0.5e-3);
        const double magnitude = rng.uniform(0.0015, 0.005);
        sensor.mag_rate_hz = 100.0 * (j % 2 == 0 ? 1.0 + magnitude : 1.0 - magnitude);
        fleet.sensors.push_back(sensor);
    }

    const int n_events = static_cast<int>(std::floor(total_s / interval_s + 1e-9));
    std::vector<DriftRecord> records(drifts.size());
    for (std::size_t j = 0; j < drifts.size(); ++j)
        records[j].sensor_id = fleet.sensors[j].sensor_id;

    for (int e = 0; e < n_events; ++e) {
        const double t_event = interval_s * static_cast<double>(e + 1);
        Scenario event_scenario = fleet;
        event_scenario.seed = derive_seed(scenario.seed, 0xe000 + static_cast<std::uint64_t>(e));
        const SyncRun run =
            run_sync_procedure(event_scenario, t_event - event_scenario.lead_in_s());
        for (std::size_t j = 0; j < drifts.size(); ++j) {
            try {
                const SyncEstimate est = estimate_t0(run.magnetometer[j], fleet.inductor,
                                                     fleet.drive_freq_hz);
                records[j].event_times_local_s.push_back(est.t0_s);
                records[j].reference_times_s.push_back(run.truth.t0_true_s);
                records[j].deviations_s.push_back(est.t0_s - run.truth.t0_true_s);
            } catch (const Error&) {
                // event lost for this sensor; regression uses the rest
            }
        }
    }

    for (auto& record : records) {
        if (record.deviations_s.size() >= 3)
            record.regression = fit_linear(record.reference_times_s, record.deviations_s);
    }
    return records;
}

}  // namespace magsync
