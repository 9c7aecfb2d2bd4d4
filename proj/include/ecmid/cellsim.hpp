#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ecmid/errors.hpp"
#include "ecmid/model.hpp"
#include "ecmid/timeseries.hpp"

namespace ecmid {

/// Pulsed charging-current excitation: rectangular pulses between
/// dc_bias_a and dc_bias_a + amplitude_a.
struct PulseSpec {
    double freq_hz = 0.0;
    double amplitude_a = 0.0;
    double duty = 0.5;
    int n_periods = 0;
    double dc_bias_a = 0.0;

    void validate() const {
        if (!(freq_hz > 0.0) || !std::isfinite(freq_hz))
            throw ValidationError("PulseSpec: freq_hz must be > 0");
        if (!(amplitude_a > 0.0) || !std::isfinite(amplitude_a))
            throw ValidationError("PulseSpec: amplitude_a must be > 0");
        if (!(duty > 0.0 && duty < 1.0))
            throw ValidationError("PulseSpec: duty must lie in (0, 1)");
        if (n_periods < 3)
            throw ValidationError("PulseSpec: n_periods must be at least 3");
        if (!std::isfinite(dc_bias_a))
            throw ValidationError("PulseSpec: dc_bias_a must be finite");
    }
};

/// Synthesis settings for the steady-state voltage response.
struct SimConfig {
    EcmParams params;
    double ocv_v = 3.7;
    int n_harmonics = 25;
    double sample_rate_hz = 0.0; ///< 0 = take the rate of the current record
    double noise_rms_v = 0.0;
    std::uint64_t seed = 1;

    void validate() const {
        params.validate();
        if (!std::isfinite(ocv_v))
            throw ValidationError("SimConfig: ocv_v must be finite");
        if (n_harmonics < 10)
            throw ValidationError("SimConfig: n_harmonics must be at least 10");
        if (!(noise_rms_v >= 0.0) || !std::isfinite(noise_rms_v))
            throw ValidationError("SimConfig: noise_rms_v must be >= 0");
    }
};

/// Ideal sampled square wave. The sample rate must be an integer multiple
/// (>= 20) of the pulse frequency so period boundaries land exactly on
/// samples; the duty edge is rounded to the nearest sample.
inline TimeSeries square_wave_current(const PulseSpec& spec, double sample_rate_hz) {
    spec.validate();
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
        throw ConfigError("square_wave_current: sample_rate_hz must be > 0");
    const double ratio = sample_rate_hz / spec.freq_hz;
    if (ratio < 20.0)
        throw ConfigError("square_wave_current: sample rate must be at least 20x the pulse frequency");
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw ConfigError("square_wave_current: sample rate must be an integer multiple of the pulse frequency");

    const std::size_t n_per = static_cast<std::size_t>(std::llround(ratio));
    const std::size_t n_on = static_cast<std::size_t>(std::llround(spec.duty * static_cast<double>(n_per)));
    if (n_on == 0 || n_on == n_per)
        throw ConfigError("square_wave_current: duty cycle unresolvable at this sample rate");

    TimeSeries ts;
    ts.sample_rate_hz = sample_rate_hz;
    const std::size_t total = n_per * static_cast<std::size_t>(spec.n_periods);
    ts.current_a.resize(total);
    ts.voltage_v.assign(total, 0.0);
    for (std::size_t n = 0; n < total; ++n)
        ts.current_a[n] = spec.dc_bias_a + ((n % n_per) < n_on ? spec.amplitude_a : 0.0);
    return ts;
}

/// Steady-state periodic voltage response of a Randles cell to a periodic
/// current record, by harmonic superposition: the excitation's Fourier
/// coefficients (taken from one period of the sampled record) are scaled
/// by the model impedance at each harmonic and summed. The DC term uses
/// R0 + R1 -- the Warburg element diverges at DC, and slow SoC drift is
/// out of scope -- so the offset is bounded but only meaningful over
/// short horizons. No start-up transient: the output is periodic from
/// sample zero.
inline TimeSeries simulate_voltage(const TimeSeries& current, double freq_hz, const SimConfig& cfg) {
    current.validate();
    cfg.validate();
    if (cfg.sample_rate_hz > 0.0 && std::abs(cfg.sample_rate_hz - current.sample_rate_hz) >
                                        1e-9 * current.sample_rate_hz)
        throw ConfigError("simulate_voltage: config sample rate disagrees with the record");

    const double fs = current.sample_rate_hz;
    if (fs < 2.0 * static_cast<double>(cfg.n_harmonics) * freq_hz)
        throw ConfigError("simulate_voltage: sample rate below 2*n_harmonics*freq (aliasing guard)");

    const std::size_t n_per = detail::samples_per_period(freq_hz, fs);
    if (current.size() < n_per)
        throw InsufficientDataError("simulate_voltage: record shorter than one period");

    constexpr double two_pi = 2.0 * std::numbers::pi;

    // Fourier coefficients of the sampled excitation over one period.
    double i_dc = 0.0;
    for (std::size_t n = 0; n < n_per; ++n)
        i_dc += current.current_a[n];
    i_dc /= static_cast<double>(n_per);

    std::vector<Complex> vh; // c_h * Z(h*w0), h = 1..n_harmonics below Nyquist
    vh.reserve(static_cast<std::size_t>(cfg.n_harmonics));
    for (int h = 1; h <= cfg.n_harmonics; ++h) {
        if (2.0 * static_cast<double>(h) * freq_hz >= fs)
            break;
        Complex ch(0.0, 0.0);
        for (std::size_t n = 0; n < n_per; ++n) {
            const double phi = two_pi * static_cast<double>(h) * static_cast<double>(n) /
                               static_cast<double>(n_per);
            ch += current.current_a[n] * Complex(std::cos(phi), -std::sin(phi));
        }
        ch /= static_cast<double>(n_per);
        vh.push_back(ch * randles_impedance(cfg.params, two_pi * static_cast<double>(h) * freq_hz));
    }

    TimeSeries out = current;
    const double v_dc = cfg.ocv_v + i_dc * (cfg.params.r0 + cfg.params.r1);

    // One period of the AC waveform, then tiled.
    std::vector<double> period_v(n_per, 0.0);
    for (std::size_t n = 0; n < n_per; ++n) {
        double v = 0.0;
        for (std::size_t h = 0; h < vh.size(); ++h) {
            const double phi = two_pi * static_cast<double>(h + 1) * static_cast<double>(n) /
                               static_cast<double>(n_per);
            v += 2.0 * (vh[h].real() * std::cos(phi) - vh[h].imag() * std::sin(phi));
        }
        period_v[n] = v;
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, cfg.noise_rms_v);
    for (std::size_t n = 0; n < out.size(); ++n) {
        double v = v_dc + period_v[n % n_per];
        if (cfg.noise_rms_v > 0.0)
            v += gauss(rng);
        out.voltage_v[n] = v;
    }
    return out;
}

/// Convenience: generate the excitation and its response in one call.
inline TimeSeries simulate_pulse_response(const PulseSpec& spec, const SimConfig& cfg) {
    const double fs = cfg.sample_rate_hz > 0.0 ? cfg.sample_rate_hz : 100.0 * spec.freq_hz;
    const TimeSeries current = square_wave_current(spec, fs);
    SimConfig c = cfg;
    c.sample_rate_hz = fs;
    return simulate_voltage(current, spec.freq_hz, c);
}

} // namespace ecmid
