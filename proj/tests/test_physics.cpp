#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "magsync/physics.hpp"
#include "magsync/rng.hpp"

using namespace magsync;

namespace {

InductorSpec reference_inductor() { return {}; }  // 82 mH / 212 ohm rig defaults

/// Independent inversion oracle: bisection on the forward flux curve.
double invert_by_bisection(const InductorSpec& spec, double ratio) {
    const double b_sat = spec.flux_delta_t();
    double lo = 0.0, hi = 20.0 * spec.time_constant_s();
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (flux_at(spec, mid) / b_sat < ratio ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("time constant of the reference inductor") {
    const InductorSpec spec = reference_inductor();
    const double tau = time_constant(spec);
    CHECK(tau == 82e-3 / 212.0);
    CHECK(std::abs(tau - 387e-6) < 0.01 * 387e-6);  // datasheet rounds to ~390 us
    CHECK(5.0 * tau == Catch::Approx(1.934e-3).epsilon(1e-3));
}

TEST_CASE("time constant unit case") {
    InductorSpec spec;
    spec.inductance_h = 1.0;
    spec.resistance_ohm = 1.0;
    CHECK(time_constant(spec) == 1.0);
}

TEST_CASE("flux_at anchor points") {
    const InductorSpec spec = reference_inductor();
    const double tau = spec.time_constant_s();
    const double b_sat = spec.flux_delta_t();
    CHECK(flux_at(spec, 0.0) == 0.0);
    CHECK(flux_at(spec, tau) == Catch::Approx(0.63212055882855767 * b_sat).epsilon(1e-12));
    CHECK(flux_at(spec, 5.0 * tau) == Catch::Approx(0.99326205300091452 * b_sat).epsilon(1e-12));
    CHECK_THROWS_AS(flux_at(spec, -1e-9), Error);
}

TEST_CASE("inverse_flux_time anchor points") {
    const InductorSpec spec = reference_inductor();
    const double tau = spec.time_constant_s();
    CHECK(inverse_flux_time(spec, 1.0 - std::exp(-1.0)) == Catch::Approx(tau).epsilon(1e-12));
    CHECK(inverse_flux_time(spec, 0.99) == Catch::Approx(4.6051701859880918 * tau).epsilon(1e-12));

    // half amplitude: tau * ln 2, cross-checked against the bisection oracle
    const double t_half = inverse_flux_time(spec, 0.5);
    CHECK(t_half == Catch::Approx(268.1e-6).epsilon(1e-3));
    CHECK(t_half == Catch::Approx(invert_by_bisection(spec, 0.5)).margin(1e-12));
}

TEST_CASE("inverse_flux_time rejects unusable ratios") {
    const InductorSpec spec = reference_inductor();
    CHECK_THROWS_AS(inverse_flux_time(spec, 0.0), Error);
    CHECK_THROWS_AS(inverse_flux_time(spec, -0.2), Error);
    CHECK_THROWS_AS(inverse_flux_time(spec, 1.0), Error);
    try {
        inverse_flux_time(spec, -0.1);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::below_baseline);
    }
    try {
        inverse_flux_time(spec, 1.3);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::in_saturation);
    }
}

TEST_CASE("flux curve is strictly increasing and concave") {
    const InductorSpec spec = reference_inductor();
    const double tau = spec.time_constant_s();
    double prev = flux_at(spec, 0.0);
    double prev_step = -1.0;
    for (int i = 1; i <= 400; ++i) {
        const double t = 10.0 * tau * i / 400.0;
        const double value = flux_at(spec, t);
        CHECK(value > prev);
        const double step = value - prev;
        if (prev_step >= 0.0) CHECK(step < prev_step);  // decreasing increments: concave
        prev_step = step;
        prev = value;
    }
}

TEST_CASE("inverse round-trips the forward curve") {
    const InductorSpec spec = reference_inductor();
    const double tau = spec.time_constant_s();
    const double b_sat = spec.flux_delta_t();
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const double t = rng.uniform(1e-9, 5.0 * tau);
        const double back = inverse_flux_time(spec, flux_at(spec, t) / b_sat);
        REQUIRE(std::abs(back - t) < 1e-9);
    }
}

TEST_CASE("supply voltage scales only the flux amplitude") {
    const InductorSpec spec = reference_inductor();
    InductorSpec scaled = spec;
    scaled.supply_voltage_v *= 3.5;
    CHECK(scaled.flux_delta_t() == Catch::Approx(3.5 * spec.flux_delta_t()).epsilon(1e-12));
    CHECK(scaled.time_constant_s() == spec.time_constant_s());
    for (double ratio : {0.1, 0.5, 0.9})
        CHECK(inverse_flux_time(scaled, ratio) == inverse_flux_time(spec, ratio));
}

TEST_CASE("invalid inductor parameters are rejected") {
    InductorSpec spec = reference_inductor();
    spec.resistance_ohm = 0.0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = reference_inductor();
    spec.windings = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = reference_inductor();
    spec.supply_voltage_v = -5.0;
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("decay mirrors the rising transient") {
    const InductorSpec spec = reference_inductor();
    const double tau = spec.time_constant_s();
    const double b_sat = spec.flux_delta_t();
    CHECK(decay_flux_at(spec, 0.0) == b_sat);
    for (double t : {0.3 * tau, tau, 4.0 * tau})
        CHECK(decay_flux_at(spec, t) + flux_at(spec, t) == Catch::Approx(b_sat).epsilon(1e-12));
}
