#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "ecmid/errors.hpp"
#include "ecmid/filter.hpp"
#include "ecmid/model.hpp"
#include "ecmid/timeseries.hpp"

namespace ecmid {

/// Fundamental-frequency component in sine convention:
/// x(t) ~ amplitude * sin(2*pi*freq_hz*t + phase_rad).
struct Phasor {
    double amplitude = 0.0;
    double phase_rad = 0.0; ///< in (-pi, pi]
    double freq_hz = 0.0;
};

namespace detail {

inline double wrap_phase(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    phi = std::fmod(phi, two_pi);
    if (phi <= -std::numbers::pi)
        phi += two_pi;
    else if (phi > std::numbers::pi)
        phi -= two_pi;
    return phi;
}

} // namespace detail

/// Runs both channels through identical fresh band-pass instances. The
/// identical phase response is what keeps the later phase difference
/// unbiased; the band-pass zero at DC strips the offset.
inline TimeSeries filter_fundamental(const TimeSeries& ts, const BpfConfig& cfg) {
    ts.validate();
    cfg.validate();
    const std::size_t n_per = detail::samples_per_period(cfg.f0_hz, ts.sample_rate_hz);
    const std::size_t need = settle_samples(cfg, ts.sample_rate_hz) + 3 * n_per;
    if (ts.size() < need)
        throw InsufficientDataError(
            "filter_fundamental: record shorter than filter settling plus 3 cycles");

    TimeSeries out;
    out.sample_rate_hz = ts.sample_rate_hz;
    out.current_a.resize(ts.size());
    out.voltage_v.resize(ts.size());
    BandpassFilter fi(cfg, ts.sample_rate_hz);
    BandpassFilter fv(cfg, ts.sample_rate_hz);
    for (std::size_t n = 0; n < ts.size(); ++n) {
        out.current_a[n] = fi.process(ts.current_a[n]);
        out.voltage_v[n] = fv.process(ts.voltage_v[n]);
    }
    return out;
}

/// Quadrature demodulation over the largest whole number of cycles in the
/// given steady-state span (trailing partial cycle ignored, at least three
/// cycles required). The phase is referenced to t = 0 of the original
/// record; origin_offset_samples says where the span starts in that record.
inline Phasor extract_phasor(std::span<const double> steady, double f0_hz, double sample_rate_hz,
                             std::size_t origin_offset_samples = 0, double noise_floor = 1e-12) {
    const std::size_t n_per = detail::samples_per_period(f0_hz, sample_rate_hz);
    const std::size_t cycles = steady.size() / n_per;
    if (cycles < 3)
        throw InsufficientDataError("extract_phasor: need at least 3 whole cycles of steady-state data");
    const std::size_t n = cycles * n_per;

    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double dphi = two_pi * f0_hz / sample_rate_hz;
    double in_phase = 0.0;  // correlation with sin
    double quad = 0.0;      // correlation with cos
    for (std::size_t j = 0; j < n; ++j) {
        const double phi = dphi * static_cast<double>(origin_offset_samples + j);
        in_phase += steady[j] * std::sin(phi);
        quad += steady[j] * std::cos(phi);
    }
    in_phase *= 2.0 / static_cast<double>(n);
    quad *= 2.0 / static_cast<double>(n);

    Phasor p;
    p.freq_hz = f0_hz;
    p.amplitude = std::hypot(in_phase, quad);
    if (p.amplitude < noise_floor)
        throw LowSignalError("extract_phasor: fundamental amplitude below the noise floor");
    p.phase_rad = detail::wrap_phase(std::atan2(quad, in_phase));
    return p;
}

/// |Z| = |V|/|I|, arg Z = phase(V) - phase(I) wrapped to (-pi, pi].
inline ImpedancePoint impedance_from_phasors(const Phasor& v, const Phasor& i) {
    if (v.freq_hz != i.freq_hz)
        throw ContractError("impedance_from_phasors: voltage and current phasors are at different frequencies");
    if (!(i.amplitude > 0.0))
        throw LowSignalError("impedance_from_phasors: zero current amplitude");
    const double mag = v.amplitude / i.amplitude;
    const double phase = detail::wrap_phase(v.phase_rad - i.phase_rad);
    return {v.freq_hz, std::polar(mag, phase)};
}

/// Full record-to-impedance pipeline: band-pass both channels, discard the
/// settling samples, demodulate the last whole cycles, divide the phasors.
inline ImpedancePoint measure_impedance(const TimeSeries& ts, const BpfConfig& cfg) {
    const TimeSeries filtered = filter_fundamental(ts, cfg);
    const std::size_t n_per = detail::samples_per_period(cfg.f0_hz, ts.sample_rate_hz);
    const std::size_t n_settle = settle_samples(cfg, ts.sample_rate_hz);
    const std::size_t cycles = (ts.size() - n_settle) / n_per;
    if (cycles < 3)
        throw InsufficientDataError("measure_impedance: fewer than 3 whole cycles after settling");
    const std::size_t start = ts.size() - cycles * n_per;

    const auto v = extract_phasor(std::span(filtered.voltage_v).subspan(start), cfg.f0_hz,
                                  ts.sample_rate_hz, start);
    const auto i = extract_phasor(std::span(filtered.current_a).subspan(start), cfg.f0_hz,
                                  ts.sample_rate_hz, start);
    return impedance_from_phasors(v, i);
}

/// Phase magnitude read off the Lissajous ellipse of two per-unitized
/// channels: |v| at the zero crossings of i equals |sin(phase)|. Linear
/// interpolation at the crossings, averaged over all of them. Sign-blind;
/// take the sign from the phasor difference. Accuracy near 90 degrees is
/// limited by the sampling density (use >= 1000 samples per period there).
inline double lissajous_phase(std::span<const double> v_norm, std::span<const double> i_norm) {
    if (v_norm.size() != i_norm.size() || v_norm.size() < 4)
        throw ContractError("lissajous_phase: channels must have equal length >= 4");
    auto peak = [](std::span<const double> x) {
        double m = 0.0;
        for (double s : x)
            m = std::max(m, std::abs(s));
        return m;
    };
    if (peak(v_norm) < 1e-12 || peak(i_norm) < 1e-12)
        throw DegenerateInputError("lissajous_phase: degenerate (zero-amplitude) channel");

    double sum = 0.0;
    std::size_t crossings = 0;
    for (std::size_t n = 0; n + 1 < i_norm.size(); ++n) {
        const double a = i_norm[n];
        const double b = i_norm[n + 1];
        if (a == 0.0 && b == 0.0)
            continue;
        if ((a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0)) {
            const double t = a / (a - b);
            const double v_at = v_norm[n] + t * (v_norm[n + 1] - v_norm[n]);
            sum += std::min(std::abs(v_at), 1.0);
            ++crossings;
        }
    }
    if (crossings < 2)
        throw InsufficientDataError("lissajous_phase: too few current zero crossings");
    return std::asin(sum / static_cast<double>(crossings));
}

} // namespace ecmid
