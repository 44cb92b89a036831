#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "magsync/errors.hpp"
#include "magsync/physics.hpp"
#include "magsync/sample_series.hpp"

namespace magsync {

/// CSV layout: `# key=value` metadata comments, a `t_local_s,value` header,
/// then one row per sample. Magnetometer values cross the file boundary in
/// gauss, ADC values in volts; timestamps round-trip bit-exactly.

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_series_csv(const SampleSeries& series, const std::filesystem::path& path) {
    series.validate();
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
    const bool as_gauss = series.unit == Unit::tesla;
    out << "# sensor_id=" << series.sensor_id << "\n";
    out << "# channel=" << to_string(series.channel) << "\n";
    out << "# rate_hz=" << detail::format_double(series.nominal_rate_hz) << "\n";
    out << "# unit=" << (as_gauss ? "gauss" : "volt") << "\n";
    out << "t_local_s,value\n";
    for (const auto& sample : series.samples) {
        const double value = as_gauss ? tesla_to_gauss(sample.value) : sample.value;
        out << detail::format_double(sample.t_local_s) << ',' << detail::format_double(value)
            << "\n";
    }
    if (!out) throw Error(ErrorCode::io_error, "short write to " + path.string());
}

inline SampleSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());

    SampleSeries series;
    std::string unit_label = "gauss";
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            std::string value = line.substr(eq + 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(' ') + 1);
            if (key == "sensor_id") series.sensor_id = value;
            else if (key == "channel")
                series.channel = value == "adc" ? Channel::adc : Channel::magnetometer;
            else if (key == "rate_hz") series.nominal_rate_hz = std::stod(value);
            else if (key == "unit") unit_label = value;
            continue;
        }
        if (!header_seen) {
            if (line != "t_local_s,value")
                throw Error(ErrorCode::schema_violation,
                            path.string() + ": expected header 't_local_s,value'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorCode::schema_violation,
                        path.string() + ":" + std::to_string(line_no) + ": malformed row");
        try {
            const double t = std::stod(line.substr(0, comma));
            double v = std::stod(line.substr(comma + 1));
            if (unit_label == "gauss") v = gauss_to_tesla(v);
            series.samples.push_back({t, v});
        } catch (const std::exception&) {
            throw Error(ErrorCode::schema_violation,
                        path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    series.unit = unit_label == "volt" ? Unit::volt : Unit::tesla;
    if (series.samples.empty())
        throw Error(ErrorCode::empty_series, path.string() + " contains no samples");
    series.validate();
    return series;
}

}  // namespace magsync
