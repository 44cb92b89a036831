#pragma once

#include <string>
#include <vector>

#include "magsync/errors.hpp"

namespace magsync {

enum class Channel { magnetometer, adc };
enum class Unit { tesla, volt };

inline const char* to_string(Channel c) {
    return c == Channel::magnetometer ? "magnetometer" : "adc";
}
inline const char* to_string(Unit u) { return u == Unit::tesla ? "tesla" : "volt"; }

struct Sample {
    double t_local_s;
    double value;
};

/// One sensor channel's trace in its local time context. Values are tesla
/// for magnetometer series and volts for the ADC reference channel.
struct SampleSeries {
    std::string sensor_id;
    Channel channel = Channel::magnetometer;
    double nominal_rate_hz = 0.0;
    Unit unit = Unit::tesla;
    std::vector<Sample> samples;

    void validate() const {
        if (samples.empty()) throw Error(ErrorCode::empty_series, "series has no samples");
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (!(samples[i].t_local_s > samples[i - 1].t_local_s))
                throw Error(ErrorCode::invalid_argument,
                            "timestamps must be strictly increasing");
    }

    double span_s() const {
        return samples.empty() ? 0.0 : samples.back().t_local_s - samples.front().t_local_s;
    }
};

}  // namespace magsync
