#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "magsync/errors.hpp"
#include "magsync/sample_series.hpp"

namespace magsync {

/// The two procedure start times recovered for one sensor, in its local
/// clock: session start and session end.
struct SyncEventPair {
    std::string sensor_id;
    double t0_first_s = 0.0;
    double t0_second_s = 0.0;

    void validate() const {
        if (!(t0_second_s > t0_first_s))
            throw Error(ErrorCode::invalid_argument,
                        "second event must come after the first");
    }
};

/// Affine map t_ref = scale * t_local + shift compensating offset and the
/// linear drift component between one sensor and the chosen reference.
struct AlignmentMap {
    std::string sensor_id;
    double scale = 1.0;
    double shift_s = 0.0;

    double apply(double t_local_s) const { return scale * t_local_s + shift_s; }

    AlignmentMap inverse() const {
        return {sensor_id, 1.0 / scale, -shift_s / scale};
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (!(scale > 0.999 && scale < 1.001))
            w.push_back("implausible-scale");
        return w;
    }
};

/// Two-point construction: both of the sensor's event times map exactly onto
/// the reference's.
inline AlignmentMap build_alignment(const SyncEventPair& sensor,
                                    const SyncEventPair& reference) {
    sensor.validate();
    reference.validate();
    const double sensor_interval = sensor.t0_second_s - sensor.t0_first_s;
    if (!(sensor_interval > 0))
        throw Error(ErrorCode::invalid_argument, "sensor event interval must be positive");
    AlignmentMap map;
    map.sensor_id = sensor.sensor_id;
    map.scale = (reference.t0_second_s - reference.t0_first_s) / sensor_interval;
    map.shift_s = reference.t0_first_s - map.scale * sensor.t0_first_s;
    if (!(map.scale > 0))
        throw Error(ErrorCode::invalid_argument, "alignment map must be increasing");
    return map;
}

/// Rewrites every timestamp through the map; values untouched.
inline SampleSeries apply_alignment(const AlignmentMap& map, const SampleSeries& series) {
    SampleSeries out = series;
    for (auto& sample : out.samples) sample.t_local_s = map.apply(sample.t_local_s);
    return out;
}

/// One map per sensor onto the given reference sensor's timeline; the
/// reference maps onto itself with identity.
inline std::vector<AlignmentMap> align_fleet(const std::vector<SyncEventPair>& events,
                                             const std::string& reference_id) {
    const SyncEventPair* reference = nullptr;
    for (const auto& pair : events)
        if (pair.sensor_id == reference_id) reference = &pair;
    if (reference == nullptr)
        throw Error(ErrorCode::invalid_argument,
                    "reference sensor '" + reference_id + "' not in the fleet");
    std::vector<AlignmentMap> maps;
    maps.reserve(events.size());
    for (const auto& pair : events) {
        if (pair.sensor_id == reference_id) {
            pair.validate();
            maps.push_back({pair.sensor_id, 1.0, 0.0});
        } else {
            maps.push_back(build_alignment(pair, *reference));
        }
    }
    return maps;
}

}  // namespace magsync
