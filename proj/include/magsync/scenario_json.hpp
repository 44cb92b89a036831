#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "magsync/errors.hpp"
#include "magsync/simulator.hpp"

namespace magsync {

/// Scenario config schema (units carried in the key suffixes):
/// {
///   "inductor": {"L": henry, "R": ohm, "N": count, "l": meter, "mu": H/m, "V": volt},
///   "drive":    {"freq_hz": number, "stability_ppb": number},
///   "sensors":  [{"id": string,
///                 "clock": {"offset_s", "drift_ppm", "quad", "jitter_s"},
///                 "mag_rate_hz", "noise_sigma_t", "quant_bits",
///                 "quant_range_gauss", "firmware_delay_s", "flux_delta_gauss"}],
///   "sync_duration_s": number, "adc_rate_hz": number, "seed": integer
/// }
/// Unknown keys are rejected with the offending field path.

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& path) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key))
            throw Error(ErrorCode::schema_violation, path + "." + key + ": unknown key");
}

inline double number_at(const json& obj, const std::string& key, const std::string& path,
                        double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw Error(ErrorCode::schema_violation, path + "." + key + ": expected a number");
    return obj[key].get<double>();
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& doc) {
    using detail::number_at;
    using detail::reject_unknown;
    if (!doc.is_object())
        throw Error(ErrorCode::schema_violation, "scenario: expected a JSON object");
    reject_unknown(doc, {"inductor", "drive", "sensors", "sync_duration_s", "adc_rate_hz", "seed"},
                   "scenario");

    Scenario scenario;
    if (doc.contains("inductor")) {
        const auto& ind = doc["inductor"];
        reject_unknown(ind, {"L", "R", "N", "l", "mu", "V"}, "inductor");
        scenario.inductor.inductance_h = number_at(ind, "L", "inductor", 82e-3);
        scenario.inductor.resistance_ohm = number_at(ind, "R", "inductor", 212.0);
        scenario.inductor.windings =
            static_cast<int>(number_at(ind, "N", "inductor", 1000.0));
        scenario.inductor.length_m = number_at(ind, "l", "inductor", 9e-3);
        scenario.inductor.permeability_h_per_m =
            number_at(ind, "mu", "inductor", scenario.inductor.permeability_h_per_m);
        scenario.inductor.supply_voltage_v = number_at(ind, "V", "inductor", 5.0);
    }
    if (doc.contains("drive")) {
        const auto& drive = doc["drive"];
        reject_unknown(drive, {"freq_hz", "stability_ppb"}, "drive");
        scenario.drive_freq_hz = number_at(drive, "freq_hz", "drive", 6.0);
        scenario.drive_clock.drift = number_at(drive, "stability_ppb", "drive", 1.0) * 1e-9;
    }
    if (!doc.contains("sensors") || !doc["sensors"].is_array() || doc["sensors"].empty())
        throw Error(ErrorCode::schema_violation, "scenario.sensors: need a non-empty array");

    std::size_t index = 0;
    for (const auto& s : doc["sensors"]) {
        const std::string path = "sensors[" + std::to_string(index) + "]";
        reject_unknown(s,
                       {"id", "clock", "mag_rate_hz", "noise_sigma_t", "quant_bits",
                        "quant_range_gauss", "firmware_delay_s", "flux_delta_gauss"},
                       path);
        SensorConfig sensor;
        if (!s.contains("id") || !s["id"].is_string())
            throw Error(ErrorCode::schema_violation, path + ".id: required string");
        sensor.sensor_id = s["id"].get<std::string>();
        if (s.contains("clock")) {
            const auto& c = s["clock"];
            reject_unknown(c, {"offset_s", "drift_ppm", "quad", "jitter_s"}, path + ".clock");
            sensor.clock.offset_s = number_at(c, "offset_s", path + ".clock", 0.0);
            sensor.clock.drift = number_at(c, "drift_ppm", path + ".clock", 0.0) * 1e-6;
            sensor.clock.quad_per_s = number_at(c, "quad", path + ".clock", 0.0);
            sensor.clock.jitter_sigma_s = number_at(c, "jitter_s", path + ".clock", 0.0);
        }
        sensor.mag_rate_hz = number_at(s, "mag_rate_hz", path, sensor.mag_rate_hz);
        sensor.noise_sigma_t = number_at(s, "noise_sigma_t", path, sensor.noise_sigma_t);
        sensor.quant_bits = static_cast<int>(
            number_at(s, "quant_bits", path, static_cast<double>(sensor.quant_bits)));
        sensor.quant_range_t = gauss_to_tesla(
            number_at(s, "quant_range_gauss", path, tesla_to_gauss(sensor.quant_range_t)));
        sensor.firmware_delay_s = number_at(s, "firmware_delay_s", path, 0.0);
        sensor.flux_delta_t = gauss_to_tesla(
            number_at(s, "flux_delta_gauss", path, tesla_to_gauss(sensor.flux_delta_t)));
        scenario.sensors.push_back(sensor);
        ++index;
    }
    scenario.sync_duration_s = number_at(doc, "sync_duration_s", "scenario", 10.0);
    scenario.adc_rate_hz = number_at(doc, "adc_rate_hz", "scenario", 1310.0);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned())
            throw Error(ErrorCode::schema_violation, "scenario.seed: expected an integer");
        scenario.seed = doc["seed"].get<std::uint64_t>();
    }
    return scenario;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::schema_violation, path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

inline nlohmann::json scenario_to_json(const Scenario& scenario) {
    nlohmann::json doc;
    doc["inductor"] = {{"L", scenario.inductor.inductance_h},
                       {"R", scenario.inductor.resistance_ohm},
                       {"N", scenario.inductor.windings},
                       {"l", scenario.inductor.length_m},
                       {"mu", scenario.inductor.permeability_h_per_m},
                       {"V", scenario.inductor.supply_voltage_v}};
    doc["drive"] = {{"freq_hz", scenario.drive_freq_hz},
                    {"stability_ppb", scenario.drive_clock.drift * 1e9}};
    doc["sensors"] = nlohmann::json::array();
    for (const auto& sensor : scenario.sensors) {
        doc["sensors"].push_back(
            {{"id", sensor.sensor_id},
             {"clock",
              {{"offset_s", sensor.clock.offset_s},
               {"drift_ppm", sensor.clock.drift * 1e6},
               {"quad", sensor.clock.quad_per_s},
               {"jitter_s", sensor.clock.jitter_sigma_s}}},
             {"mag_rate_hz", sensor.mag_rate_hz},
             {"noise_sigma_t", sensor.noise_sigma_t},
             {"quant_bits", sensor.quant_bits},
             {"quant_range_gauss", tesla_to_gauss(sensor.quant_range_t)},
             {"firmware_delay_s", sensor.firmware_delay_s},
             {"flux_delta_gauss", tesla_to_gauss(sensor.flux_delta_t)}});
    }
    doc["sync_duration_s"] = scenario.sync_duration_s;
    doc["adc_rate_hz"] = scenario.adc_rate_hz;
    doc["seed"] = scenario.seed;
    return doc;
}

}  // namespace magsync
