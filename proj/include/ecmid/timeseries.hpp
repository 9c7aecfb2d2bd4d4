#pragma once

#include <cmath>
#include <vector>

#include "ecmid/errors.hpp"

namespace ecmid {

namespace detail {

/// Samples per excitation period; the ratio must be an integer >= 20 so
/// that whole-cycle windows exist exactly (discrete orthogonality then
/// nulls DC and every harmonic below Nyquist).
inline std::size_t samples_per_period(double f0_hz, double sample_rate_hz) {
    if (!(f0_hz > 0.0) || !(sample_rate_hz > 0.0))
        throw ConfigError("samples_per_period: f0 and sample rate must be > 0");
    const double ratio = sample_rate_hz / f0_hz;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio)
        throw ConfigError(
            "sample rate must be an integer multiple of the excitation frequency; resample the record");
    if (rounded < 20.0)
        throw ConfigError("sample rate must be at least 20x the excitation frequency");
    return static_cast<std::size_t>(rounded);
}

} // namespace detail

/// Uniformly sampled current/voltage record. Sample n is taken at
/// t = n / sample_rate_hz; both channels share the time base.
struct TimeSeries {
    double sample_rate_hz = 0.0;
    std::vector<double> current_a;
    std::vector<double> voltage_v;

    std::size_t size() const { return current_a.size(); }
    double duration_s() const {
        return sample_rate_hz > 0.0 ? static_cast<double>(size()) / sample_rate_hz : 0.0;
    }

    void validate() const {
        if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
            throw ValidationError("TimeSeries: sample_rate_hz must be > 0");
        if (current_a.size() != voltage_v.size())
            throw ValidationError("TimeSeries: current and voltage channels must have equal length");
        if (current_a.empty())
            throw ValidationError("TimeSeries: record is empty");
    }
};

} // namespace ecmid
