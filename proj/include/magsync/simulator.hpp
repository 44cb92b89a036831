#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magsync/clock_model.hpp"
#include "magsync/errors.hpp"
#include "magsync/physics.hpp"
#include "magsync/rng.hpp"
#include "magsync/sample_series.hpp"

namespace magsync {

/// One simulated magnetometer node.
struct SensorConfig {
    std::string sensor_id;
    ClockModel clock;
    double mag_rate_hz = 100.0;
    double noise_sigma_t = 3.0e-7;  // 2 LSB of the default 16-bit range
    int quant_bits = 16;
    double quant_range_t = gauss_to_tesla(49.152);
    double firmware_delay_s = 0.0;
    double flux_delta_t = gauss_to_tesla(30.0);  // effective flux delta K at this sensor

    double quant_step_t() const {
        return 2.0 * quant_range_t / std::pow(2.0, quant_bits);
    }

    void validate(double horizon_s) const {
        if (sensor_id.empty()) throw Error(ErrorCode::invalid_argument, "sensor_id must be set");
        if (!(mag_rate_hz > 0)) throw Error(ErrorCode::invalid_argument, "mag_rate must be > 0");
        if (quant_bits < 8 || quant_bits > 24)
            throw Error(ErrorCode::invalid_argument, "quant_bits must be in [8, 24]");
        if (!(quant_range_t > 0))
            throw Error(ErrorCode::invalid_argument, "quant_range must be > 0");
        if (noise_sigma_t < 0)
            throw Error(ErrorCode::invalid_argument, "noise_sigma must be >= 0");
        if (!(flux_delta_t > 10.0 * quant_step_t()))
            throw Error(ErrorCode::invalid_argument,
                        "flux delta is not resolvable (must exceed 10 quantization steps)");
        clock.validate(horizon_s, 1.0 / mag_rate_hz);
    }
};

/// Full description of one synchronisation rig run: inductor, drive signal,
/// sensor fleet, ADC reference channel and the master seed.
struct Scenario {
    InductorSpec inductor;
    double drive_freq_hz = 6.0;
    ClockModel drive_clock{.offset_s = 0.0, .drift = 1e-9};
    std::vector<SensorConfig> sensors;
    double sync_duration_s = 10.0;
    double adc_rate_hz = 1310.0;  // 0 disables the reference channel
    std::uint64_t seed = 1;

    /// Idle time before the first rising edge; gives every channel a clean
    /// low-baseline segment ahead of the procedure.
    double lead_in_s() const { return 0.5 / drive_freq_hz; }
    double span_s() const { return sync_duration_s + 2.0 * lead_in_s(); }

    /// Throws on hard violations and returns soft warnings (degenerate
    /// beat between a sensor's sampling grid and the drive).
    std::vector<std::string> validate() const {
        inductor.validate();
        if (!(drive_freq_hz > 0))
            throw Error(ErrorCode::invalid_argument, "drive frequency must be > 0");
        const double tau = inductor.time_constant_s();
        if (!(drive_freq_hz < 1.0 / (5.0 * tau)))
            throw Error(ErrorCode::invalid_argument,
                        "drive frequency too high: transients cannot complete "
                        "(need f < 1/(5 tau))");
        if (!(sync_duration_s > 0))
            throw Error(ErrorCode::invalid_argument, "sync duration must be > 0");
        if (adc_rate_hz < 0)
            throw Error(ErrorCode::invalid_argument, "adc rate must be >= 0");
        if (sensors.empty())
            throw Error(ErrorCode::invalid_argument, "scenario needs at least one sensor");

        const double horizon = span_s() + lead_in_s();
        drive_clock.validate(horizon, 0.0);
        std::vector<std::string> warnings;
        for (const auto& sensor : sensors) {
            sensor.validate(horizon);
            const double ratio = sensor.mag_rate_hz / drive_freq_hz;
            if (std::abs(ratio - std::round(ratio)) < 1e-9)
                warnings.push_back("sensor " + sensor.sensor_id +
                                   ": sampling rate is an integer multiple of the drive "
                                   "frequency; the beat is degenerate and hits may never occur");
        }
        if (adc_rate_hz > 0)
            sensors.front().clock.validate(horizon, 1.0 / adc_rate_hz);
        return warnings;
    }
};

/// Scoring targets retained by the simulator. t0_local_true maps the true
/// first-edge time through each sensor's clock *and* firmware delay: it is
/// the timestamp at which the magnetometer data places the event.
struct GroundTruth {
    double t0_true_s = 0.0;
    std::map<std::string, double> t0_local_true_s;
};

struct SyncRun {
    std::vector<SampleSeries> magnetometer;
    std::optional<SampleSeries> adc;
    GroundTruth truth;
};

namespace detail {

/// Drive square wave and the exact piecewise-exponential flux it produces.
/// Edge times live on the drive generator's clock; edge m sits at
/// m/(2f) after the first connect. Flux state is carried across edges, so
/// incomplete transients (T/2 < 5 tau) are still exact.
class DriveWaveform {
public:
    DriveWaveform(const Scenario& scenario, double t0_true_s)
        : drive_clock_(scenario.drive_clock),
          tau_s_(scenario.inductor.time_constant_s()),
          half_period_s_(0.5 / scenario.drive_freq_hz),
          g0_(scenario.drive_clock.local_from_true(t0_true_s)),
          n_edges_(2 * static_cast<int>(std::llround(scenario.sync_duration_s *
                                                     scenario.drive_freq_hz))) {
        // flux level (in units of the final delta) carried at each edge
        edge_levels_.reserve(static_cast<std::size_t>(n_edges_) + 1);
        double level = 0.0;
        const double decay = std::exp(-half_period_s_ / tau_s_);
        for (int m = 0; m <= n_edges_; ++m) {
            edge_levels_.push_back(level);
            const double target = (m % 2 == 0) ? 1.0 : 0.0;  // edge m starts segment m
            level = target + (level - target) * decay;
        }
    }

    /// True iff the supply is connected at true time t.
    bool connected_at(double t_true_s) const {
        const double u = drive_clock_.local_from_true(t_true_s) - g0_;
        if (u < 0.0) return false;
        const int m = static_cast<int>(u / half_period_s_);
        return m < n_edges_ && m % 2 == 0;
    }

    /// Normalized flux (0..1, scaled by a sensor's flux delta) at true time t.
    double flux_fraction_at(double t_true_s) const {
        const double u = drive_clock_.local_from_true(t_true_s) - g0_;
        if (u < 0.0) return 0.0;
        int m = static_cast<int>(u / half_period_s_);
        double dt = u - m * half_period_s_;
        if (m >= n_edges_) {  // free decay after the procedure ends
            dt = u - n_edges_ * half_period_s_;
            m = n_edges_;
        }
        const double target = (m < n_edges_ && m % 2 == 0) ? 1.0 : 0.0;
        const double start = edge_levels_[static_cast<std::size_t>(m)];
        return target + (start - target) * std::exp(-dt / tau_s_);
    }

    int edge_count() const { return n_edges_; }

private:
    ClockModel drive_clock_;
    double tau_s_;
    double half_period_s_;
    double g0_;
    int n_edges_;
    std::vector<double> edge_levels_;
};

inline double quantize(double value, double step, double range) {
    const double q = std::round(value / step) * step;
    return std::clamp(q, -range, range);
}

/// Timestamps must be strictly increasing even when jitter tails collide;
/// real devices read their counters monotonically, so colliding stamps are
/// nudged forward by 1 ns.
inline void enforce_monotone(std::vector<Sample>& samples) {
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].t_local_s <= samples[i - 1].t_local_s)
            samples[i].t_local_s = samples[i - 1].t_local_s + 1e-9;
}

}  // namespace detail

/// Simulates one synchronisation procedure. Sensors sample over
/// [t_start, t_start + span); the first rising edge happens one lead-in
/// after t_start. Deterministic for a given scenario seed.
inline SyncRun run_sync_procedure(const Scenario& scenario, double t_start_true_s = 0.0) {
    scenario.validate();

    const double t0_true = t_start_true_s + scenario.lead_in_s();
    const detail::DriveWaveform drive(scenario, t0_true);

    SyncRun run;
    run.truth.t0_true_s = t0_true;

    std::size_t sensor_index = 0;
    for (const auto& sensor : scenario.sensors) {
        const std::uint64_t stream = derive_seed(scenario.seed, 1 + sensor_index);
        auto grid = sample_times(sensor.clock, sensor.mag_rate_hz, t_start_true_s,
                                 scenario.span_s(), stream);
        Rng noise(derive_seed(stream, 0x0b5e));

        SampleSeries series;
        series.sensor_id = sensor.sensor_id;
        series.channel = Channel::magnetometer;
        series.nominal_rate_hz = sensor.mag_rate_hz;
        series.unit = Unit::tesla;
        series.samples.reserve(grid.size());
        const double step = sensor.quant_step_t();
        for (const auto& ts : grid) {
            double value = sensor.flux_delta_t * drive.flux_fraction_at(ts.t_true_s);
            value += noise.normal(sensor.noise_sigma_t);
            value = detail::quantize(value, step, sensor.quant_range_t);
            series.samples.push_back({ts.t_local_s + sensor.firmware_delay_s, value});
        }
        detail::enforce_monotone(series.samples);
        series.validate();
        run.magnetometer.push_back(std::move(series));

        run.truth.t0_local_true_s[sensor.sensor_id] =
            sensor.clock.local_from_true(t0_true) + sensor.firmware_delay_s;
        ++sensor_index;
    }

    // ADC reference channel: the control signal itself, sampled with the
    // first sensor's clock. No firmware delay on this path.
    if (scenario.adc_rate_hz > 0) {
        const auto& ref = scenario.sensors.front();
        const std::uint64_t stream = derive_seed(scenario.seed, 0xadc0);
        auto grid = sample_times(ref.clock, scenario.adc_rate_hz, t_start_true_s,
                                 scenario.span_s(), stream);

        SampleSeries series;
        series.sensor_id = ref.sensor_id;
        series.channel = Channel::adc;
        series.nominal_rate_hz = scenario.adc_rate_hz;
        series.unit = Unit::volt;
        series.samples.reserve(grid.size());
        constexpr double kHighV = 3.0;
        constexpr int kAdcBits = 12;
        const double adc_step = kHighV / std::pow(2.0, kAdcBits);
        for (const auto& ts : grid) {
            const double v = drive.connected_at(ts.t_true_s) ? kHighV : 0.0;
            series.samples.push_back(
                {ts.t_local_s, detail::quantize(v, adc_step, kHighV)});
        }
        detail::enforce_monotone(series.samples);
        series.validate();
        run.adc = std::move(series);
    }

    return run;
}

struct SessionRun {
    SyncRun first;
    SyncRun second;
    double gap_duration_s = 0.0;
};

/// Two synchronisation procedures separated by gap_duration of true time;
/// the clocks evolve continuously across the whole session.
inline SessionRun run_session(const Scenario& scenario, double gap_duration_s) {
    if (gap_duration_s < 0)
        throw Error(ErrorCode::invalid_argument, "gap duration must be >= 0");
    SessionRun session;
    session.gap_duration_s = gap_duration_s;

    Scenario first = scenario;
    first.seed = derive_seed(scenario.seed, 0x5e551);
    session.first = run_sync_procedure(first, 0.0);

    Scenario second = scenario;
    second.seed = derive_seed(scenario.seed, 0x5e552);
    session.second = run_sync_procedure(second, scenario.span_s() + gap_duration_s);
    return session;
}

/// Local timestamp of the first sample at or above the half-amplitude
/// threshold (the sample *after* the edge; uncertainty is one interval).
inline double measure_reference_edge(const SampleSeries& adc) {
    adc.validate();
    double lo = adc.samples.front().value, hi = lo;
    for (const auto& s : adc.samples) {
        lo = std::min(lo, s.value);
        hi = std::max(hi, s.value);
    }
    const double threshold = 0.5 * (lo + hi);
    if (!(hi > lo))
        throw Error(ErrorCode::no_edge, "reference channel is constant");
    bool seen_low = adc.samples.front().value < threshold;
    for (std::size_t i = 1; i < adc.samples.size(); ++i) {
        const bool high = adc.samples[i].value >= threshold;
        if (seen_low && high) return adc.samples[i].t_local_s;
        seen_low = seen_low || !high;
    }
    throw Error(ErrorCode::no_edge, "no low-to-high transition in reference channel");
}

/// The scenario every command falls back to: the reference rig inductor
/// (82 mH / 212 ohm / 5 V), a 6 Hz drive on a GPS-disciplined clock, and one
/// sensor with a realistic ODR error, drift and timestamp jitter.
inline Scenario default_scenario() {
    Scenario scenario;
    scenario.sensors.push_back({
        .sensor_id = "imu1",
        .clock = {.offset_s = 0.12, .drift = 27.8e-6, .jitter_sigma_s = 150e-6},
        .mag_rate_hz = 100.43,
    });
    scenario.seed = 20260809;
    return scenario;
}

}  // namespace magsync
