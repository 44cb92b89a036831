#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "magsync/experiments.hpp"

using namespace magsync;

TEST_CASE("accuracy experiment lands in the expected bands") {
    const AccuracyStats stats = experiment_accuracy(default_scenario(), 50);
    CHECK(stats.n_runs == 50);
    CHECK(stats.n_failures == 0);
    CHECK(std::abs(stats.mean_dt_s) < 0.5e-3);
    CHECK(stats.std_dt_s < 0.5e-3);
    CHECK(stats.mean_k > 22.0);
    CHECK(stats.mean_k < 30.0);
    CHECK(stats.mean_r2 > 0.999);
    CHECK(std::abs(stats.skewness_dt) < 0.5);  // dt distribution stays near-symmetric
    CHECK(stats.min_dt_s <= stats.mean_dt_s);
    CHECK(stats.mean_dt_s <= stats.max_dt_s);
}

TEST_CASE("injected firmware delay moves the mean by exactly itself") {
    const Scenario plain = default_scenario();
    Scenario delayed = plain;
    delayed.sensors.front().firmware_delay_s = 1.5e-3;
    const AccuracyStats a = experiment_accuracy(plain, 40);
    const AccuracyStats b = experiment_accuracy(delayed, 40);
    CHECK(b.mean_dt_s - a.mean_dt_s == Catch::Approx(-1.5e-3).margin(0.1e-3));
}

TEST_CASE("experiments are deterministic") {
    const Scenario scenario = default_scenario();
    const AccuracyStats a = experiment_accuracy(scenario, 20);
    const AccuracyStats b = experiment_accuracy(scenario, 20);
    REQUIRE(a.raw_dt_s.size() == b.raw_dt_s.size());
    for (std::size_t i = 0; i < a.raw_dt_s.size(); ++i)
        REQUIRE(a.raw_dt_s[i] == b.raw_dt_s[i]);
}

TEST_CASE("duration sweep records failures below the estimator floor") {
    const DurationStudy study = experiment_duration(default_scenario(), 8, 3);
    REQUIRE(study.points.size() == 8);
    // one- and two-second procedures cannot be estimated (span < 3 s)
    CHECK(study.points[0].n_failures == 3);
    CHECK(study.points[1].n_failures == 3);
    CHECK(study.points[0].n_runs == 0);
    // hit counts keep growing with duration
    CHECK(study.points[7].mean_hits > study.points[2].mean_hits);
    CHECK(study.hits_regression.slope > 1.0);
    CHECK(study.hits_regression.r_squared > 0.95);
    // ten-second equivalents line up with the accuracy experiment
    const AccuracyStats accuracy = experiment_accuracy(default_scenario(), 30);
    const double hits_at_10 = study.hits_regression.at(10.0);
    CHECK(std::abs(hits_at_10 - accuracy.mean_k) < 3.0);
}

TEST_CASE("drift experiment recovers per-sensor drifts") {
    const std::vector<double> drifts{21e-6, 24.5e-6, 28e-6};
    const auto records = experiment_drift(default_scenario(), 300.0, 1200.0, drifts);
    REQUIRE(records.size() == 3);
    for (std::size_t j = 0; j < records.size(); ++j) {
        REQUIRE(records[j].deviations_s.size() == 4);  // events at 300..1200 s
        CHECK(records[j].reference_times_s.front() == Catch::Approx(300.0));
        CHECK(records[j].reference_times_s.back() == Catch::Approx(1200.0));
        CHECK(records[j].regression.r_squared > 0.99);
        CHECK(records[j].regression.slope == Catch::Approx(drifts[j]).margin(1e-6));
        REQUIRE(records[j].event_times_local_s.size() == records[j].deviations_s.size());
    }
}

TEST_CASE("zero-drift sensor stays at its offset") {
    const std::vector<double> drifts{0.0};
    const auto records = experiment_drift(default_scenario(), 300.0, 1500.0, drifts);
    REQUIRE(records.size() == 1);
    const auto& deviations = records.front().deviations_s;
    REQUIRE(deviations.size() == 5);
    double lo = deviations.front(), hi = deviations.front();
    for (double d : deviations) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CHECK(hi - lo < 1.5e-3);
    CHECK(std::abs(records.front().regression.slope) < 0.5e-6);
}

TEST_CASE("aggregate columns reproduce from the raw deltas") {
    const AccuracyStats stats = experiment_accuracy(default_scenario(), 40);
    const DescriptiveStats recomputed = descriptive_stats(stats.raw_dt_s);
    CHECK(stats.mean_dt_s == recomputed.mean);
    CHECK(stats.std_dt_s == recomputed.stddev);
    CHECK(stats.min_dt_s == recomputed.min);
    CHECK(stats.max_dt_s == recomputed.max);
    CHECK(stats.skewness_dt == recomputed.skewness);
}

TEST_CASE("experiment argument validation") {
    CHECK_THROWS_AS(experiment_accuracy(default_scenario(), 1), Error);
    CHECK_THROWS_AS(experiment_drift(default_scenario(), 300.0, 400.0, std::vector<double>{1e-6}),
                    Error);
    CHECK_THROWS_AS(
        experiment_drift(default_scenario(), 300.0, 1200.0, std::vector<double>{}), Error);
}
