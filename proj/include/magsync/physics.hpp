#pragma once

#include <cmath>
#include <numbers>

#include "magsync/errors.hpp"

namespace magsync {

/// 1 gauss = 1e-4 tesla. Gauss appears only at file boundaries; everything
/// internal is tesla and seconds.
inline constexpr double gauss_to_tesla(double gauss) { return gauss * 1e-4; }
inline constexpr double tesla_to_gauss(double tesla) { return tesla * 1e4; }

/// Electrical and geometric constants of the signal inductor. The estimator
/// depends only on the time constant L/R; windings, length and permeability
/// set the absolute flux scale of the forward model.
struct InductorSpec {
    double inductance_h = 82e-3;
    double resistance_ohm = 212.0;
    int windings = 1000;
    double length_m = 9e-3;
    double permeability_h_per_m = 4e-7 * std::numbers::pi;
    double supply_voltage_v = 5.0;

    double time_constant_s() const { return inductance_h / resistance_ohm; }
    double steady_current_a() const { return supply_voltage_v / resistance_ohm; }

    /// Steady-state flux delta between disconnected and connected states.
    double flux_delta_t() const {
        return permeability_h_per_m * windings * steady_current_a() / length_m;
    }

    void validate() const {
        if (!(inductance_h > 0)) throw Error(ErrorCode::invalid_argument, "inductance must be > 0");
        if (!(resistance_ohm > 0)) throw Error(ErrorCode::invalid_argument, "resistance must be > 0");
        if (windings < 1) throw Error(ErrorCode::invalid_argument, "windings must be >= 1");
        if (!(length_m > 0)) throw Error(ErrorCode::invalid_argument, "length must be > 0");
        if (!(permeability_h_per_m > 0))
            throw Error(ErrorCode::invalid_argument, "permeability must be > 0");
        if (!(supply_voltage_v > 0))
            throw Error(ErrorCode::invalid_argument, "supply voltage must be > 0");
    }
};

inline double time_constant(const InductorSpec& spec) {
    spec.validate();
    return spec.time_constant_s();
}

/// Flux during a connect transient, t seconds after switch-on:
/// B(t) = B_sat * (1 - exp(-t/tau)). Strictly increasing, bounded by B_sat.
inline double flux_at(const InductorSpec& spec, double t_s) {
    spec.validate();
    if (t_s < 0)
        throw Error(ErrorCode::invalid_argument, "flux_at: time before switch-on");
    return spec.flux_delta_t() * (1.0 - std::exp(-t_s / spec.time_constant_s()));
}

/// Flux during a disconnect transient: B_sat * exp(-t/tau). The estimator
/// works on the rising form; the decay exists for waveform realism.
inline double decay_flux_at(const InductorSpec& spec, double t_s) {
    spec.validate();
    if (t_s < 0)
        throw Error(ErrorCode::invalid_argument, "decay_flux_at: time before switch-off");
    return spec.flux_delta_t() * std::exp(-t_s / spec.time_constant_s());
}

/// Inverse of the rising transient in ratio form: given k/K in (0, 1),
/// returns the elapsed time since switch-on, -tau * ln(1 - k/K).
inline double inverse_flux_time(const InductorSpec& spec, double flux_ratio) {
    spec.validate();
    if (flux_ratio <= 0.0)
        throw Error(ErrorCode::below_baseline, "flux ratio at or below the low baseline");
    if (flux_ratio >= 1.0)
        throw Error(ErrorCode::in_saturation, "flux ratio at or above saturation");
    return -spec.time_constant_s() * std::log1p(-flux_ratio);
}

}  // namespace magsync
