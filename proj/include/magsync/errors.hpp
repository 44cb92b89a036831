#pragma once

#include <stdexcept>
#include <string>

namespace magsync {

/// Machine-readable reason codes surfaced by the CLI and carried by Error.
enum class ErrorCode {
    invalid_argument,
    schema_violation,
    io_error,
    empty_series,
    series_too_short,
    no_drive_signal,
    no_initial_baseline,
    sample_rate_too_low,
    too_few_hits,
    unstable_indices,
    below_baseline,
    in_saturation,
    flux_out_of_range,
    transient_out_of_range,
    no_edge,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::schema_violation: return "schema-violation";
        case ErrorCode::io_error: return "io-error";
        case ErrorCode::empty_series: return "empty-series";
        case ErrorCode::series_too_short: return "series-too-short";
        case ErrorCode::no_drive_signal: return "no-drive-signal";
        case ErrorCode::no_initial_baseline: return "no-initial-baseline";
        case ErrorCode::sample_rate_too_low: return "sample-rate-too-low";
        case ErrorCode::too_few_hits: return "too-few-hits";
        case ErrorCode::unstable_indices: return "unstable-indices";
        case ErrorCode::below_baseline: return "below-baseline";
        case ErrorCode::in_saturation: return "in-saturation";
        case ErrorCode::flux_out_of_range: return "flux-out-of-range";
        case ErrorCode::transient_out_of_range: return "transient-time-out-of-range";
        case ErrorCode::no_edge: return "no-edge";
    }
    return "unknown";
}

/// Single exception type for the whole library; the code distinguishes
/// configuration errors from data/estimation rejections.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace magsync
