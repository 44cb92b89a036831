#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "magsync/scenario_json.hpp"
#include "magsync/series_csv.hpp"
#include "magsync/simulator.hpp"

using namespace magsync;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("magsync_io_test_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("series CSV round-trips timestamps bit-exactly") {
    const SyncRun run = run_sync_procedure(default_scenario());
    const SampleSeries& original = run.magnetometer.front();
    const fs::path path = scratch_dir() / "series.csv";
    write_series_csv(original, path);
    const SampleSeries loaded = read_series_csv(path);

    CHECK(loaded.sensor_id == original.sensor_id);
    CHECK(loaded.channel == original.channel);
    CHECK(loaded.unit == original.unit);
    CHECK(loaded.nominal_rate_hz == original.nominal_rate_hz);
    REQUIRE(loaded.samples.size() == original.samples.size());
    for (std::size_t i = 0; i < loaded.samples.size(); ++i) {
        REQUIRE(loaded.samples[i].t_local_s == original.samples[i].t_local_s);
        // values pass through the gauss boundary: equal within 1 ulp
        REQUIRE(loaded.samples[i].value ==
                Catch::Approx(original.samples[i].value).epsilon(1e-15).margin(1e-18));
    }
}

TEST_CASE("volt series round-trips without unit conversion") {
    const SyncRun run = run_sync_procedure(default_scenario());
    REQUIRE(run.adc.has_value());
    const fs::path path = scratch_dir() / "adc.csv";
    write_series_csv(*run.adc, path);
    const SampleSeries loaded = read_series_csv(path);
    CHECK(loaded.channel == Channel::adc);
    CHECK(loaded.unit == Unit::volt);
    REQUIRE(loaded.samples.size() == run.adc->samples.size());
    for (std::size_t i = 0; i < loaded.samples.size(); ++i)
        REQUIRE(loaded.samples[i].value == run.adc->samples[i].value);
}

TEST_CASE("malformed CSV rows are rejected with schema errors") {
    const fs::path dir = scratch_dir();
    {
        std::ofstream out(dir / "bad.csv");
        out << "t_local_s,value\n0.1,1.0\nnot_a_number,2.0\n";
    }
    CHECK_THROWS_AS(read_series_csv(dir / "bad.csv"), Error);

    {
        std::ofstream out(dir / "empty.csv");
        out << "";
    }
    try {
        read_series_csv(dir / "empty.csv");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::empty_series);
    }

    {
        std::ofstream out(dir / "badheader.csv");
        out << "time,val\n0.1,2\n";
    }
    CHECK_THROWS_AS(read_series_csv(dir / "badheader.csv"), Error);
}

TEST_CASE("scenario JSON round-trips every field") {
    Scenario scenario = default_scenario();
    scenario.sensors.front().firmware_delay_s = 2.07e-3;
    scenario.sensors.front().clock.quad_per_s = 1e-10;
    scenario.adc_rate_hz = 655.0;
    scenario.seed = 424242;

    const Scenario loaded = scenario_from_json(scenario_to_json(scenario));
    CHECK(loaded.inductor.inductance_h == scenario.inductor.inductance_h);
    CHECK(loaded.inductor.windings == scenario.inductor.windings);
    CHECK(loaded.drive_freq_hz == scenario.drive_freq_hz);
    CHECK(loaded.drive_clock.drift == Catch::Approx(scenario.drive_clock.drift).epsilon(1e-12));
    REQUIRE(loaded.sensors.size() == 1);
    CHECK(loaded.sensors.front().sensor_id == "imu1");
    CHECK(loaded.sensors.front().clock.offset_s == scenario.sensors.front().clock.offset_s);
    CHECK(loaded.sensors.front().clock.drift ==
          Catch::Approx(scenario.sensors.front().clock.drift).epsilon(1e-12));
    CHECK(loaded.sensors.front().mag_rate_hz == scenario.sensors.front().mag_rate_hz);
    CHECK(loaded.sensors.front().firmware_delay_s == 2.07e-3);
    CHECK(loaded.sensors.front().flux_delta_t ==
          Catch::Approx(scenario.sensors.front().flux_delta_t).epsilon(1e-12));
    CHECK(loaded.sync_duration_s == scenario.sync_duration_s);
    CHECK(loaded.adc_rate_hz == 655.0);
    CHECK(loaded.seed == 424242);
}

TEST_CASE("unknown scenario keys are rejected with their path") {
    nlohmann::json doc = scenario_to_json(default_scenario());
    doc["sensors"][0]["clock"]["driftppm"] = 3.0;
    try {
        scenario_from_json(doc);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::schema_violation);
        CHECK(std::string(e.what()).find("sensors[0].clock.driftppm") != std::string::npos);
    }

    nlohmann::json top = scenario_to_json(default_scenario());
    top["sync_duration"] = 10;
    CHECK_THROWS_AS(scenario_from_json(top), Error);
}

TEST_CASE("scenario schema requires sensors") {
    nlohmann::json doc = scenario_to_json(default_scenario());
    doc.erase("sensors");
    CHECK_THROWS_AS(scenario_from_json(doc), Error);
    doc["sensors"] = nlohmann::json::array();
    CHECK_THROWS_AS(scenario_from_json(doc), Error);
}

TEST_CASE("shipped configs stay valid and in sync with the built-in default") {
    const fs::path configs = fs::path(MAGSYNC_SOURCE_DIR) / "configs";

    const Scenario file = load_scenario(configs / "default_scenario.json");
    const Scenario built_in = default_scenario();
    CHECK(file.validate().empty());
    CHECK(file.seed == built_in.seed);
    CHECK(file.drive_freq_hz == built_in.drive_freq_hz);
    CHECK(file.sync_duration_s == built_in.sync_duration_s);
    CHECK(file.adc_rate_hz == built_in.adc_rate_hz);
    REQUIRE(file.sensors.size() == built_in.sensors.size());
    CHECK(file.sensors.front().sensor_id == built_in.sensors.front().sensor_id);
    CHECK(file.sensors.front().mag_rate_hz == built_in.sensors.front().mag_rate_hz);
    CHECK(file.sensors.front().clock.offset_s == built_in.sensors.front().clock.offset_s);
    CHECK(file.sensors.front().clock.drift ==
          Catch::Approx(built_in.sensors.front().clock.drift).epsilon(1e-12));
    CHECK(file.sensors.front().noise_sigma_t == built_in.sensors.front().noise_sigma_t);

    const Scenario fleet = load_scenario(configs / "fleet3_scenario.json");
    CHECK(fleet.validate().empty());
    CHECK(fleet.sensors.size() == 3);
}

TEST_CASE("omitted keys fall back to rig defaults") {
    const nlohmann::json doc = {{"sensors", {{{"id", "x"}}}}};
    const Scenario scenario = scenario_from_json(doc);
    CHECK(scenario.inductor.inductance_h == 82e-3);
    CHECK(scenario.inductor.resistance_ohm == 212.0);
    CHECK(scenario.drive_freq_hz == 6.0);
    CHECK(scenario.sync_duration_s == 10.0);
    CHECK(scenario.adc_rate_hz == 1310.0);
    CHECK(scenario.sensors.front().mag_rate_hz == 100.0);
    CHECK(scenario.sensors.front().quant_bits == 16);
    CHECK(scenario.sensors.front().quant_range_t ==
          Catch::Approx(gauss_to_tesla(49.152)).epsilon(1e-15));
}
