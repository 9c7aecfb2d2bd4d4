#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "ecmid/errors.hpp"

namespace ecmid {

/// Band-pass configuration: second-order section centered at f0 with
/// damping gain k (k = 1 is the attenuation/settling compromise used
/// throughout), optionally cascaded twice for a fourth-order response.
struct BpfConfig {
    double f0_hz = 0.0;
    double k = 1.0;
    int cascade_order = 2; ///< 1 or 2 identical stages

    void validate() const {
        if (!(f0_hz > 0.0) || !std::isfinite(f0_hz))
            throw ValidationError("BpfConfig: f0_hz must be > 0");
        if (!(k > 0.0) || !std::isfinite(k))
            throw ValidationError("BpfConfig: k must be > 0");
        if (cascade_order != 1 && cascade_order != 2)
            throw ValidationError("BpfConfig: cascade_order must be 1 or 2");
    }
};

/// Normalized biquad coefficients (a0 == 1).
struct BiquadCoeffs {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// Discretizes the band-pass prototype k*s*w0 / (s^2 + k*s*w0 + w0^2) with
/// a frequency-matched bilinear transform: the discrete response at f0 is
/// exactly unity gain and zero phase, so the center-frequency behavior
/// survives sampling untouched. Requires sample_rate >= 20*f0.
inline BiquadCoeffs design_bpf(const BpfConfig& cfg, double sample_rate_hz) {
    cfg.validate();
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
        throw ConfigError("design_bpf: sample_rate_hz must be > 0");
    if (sample_rate_hz < 20.0 * cfg.f0_hz)
        throw ConfigError("design_bpf: sample rate must be at least 20x the center frequency");

    const double w0T = 2.0 * std::numbers::pi * cfg.f0_hz / sample_rate_hz;
    const double alpha = 0.5 * cfg.k * std::sin(w0T);
    const double a0 = 1.0 + alpha;

    BiquadCoeffs c;
    c.b0 = alpha / a0;
    c.b1 = 0.0;
    c.b2 = -alpha / a0;
    c.a1 = -2.0 * std::cos(w0T) / a0;
    c.a2 = (1.0 - alpha) / a0;
    return c;
}

/// Discrete-time frequency response H(e^{j*2*pi*f/fs}) of one section.
inline std::complex<double> biquad_response(const BiquadCoeffs& c, double f_hz, double sample_rate_hz) {
    const std::complex<double> zinv =
        std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * f_hz / sample_rate_hz));
    return (c.b0 + (c.b1 + c.b2 * zinv) * zinv) / (1.0 + (c.a1 + c.a2 * zinv) * zinv);
}

/// Samples to discard before trusting the output. 5/(k*f0) seconds pushes
/// the cascaded double-pole envelope (t/tau)*exp(-t/tau) below 1e-5 of the
/// signal; a 3/(k*f0) discard still leaves ~0.5% leakage in a short
/// quadrature window.
inline std::size_t settle_samples(const BpfConfig& cfg, double sample_rate_hz) {
    cfg.validate();
    return static_cast<std::size_t>(std::ceil(5.0 / (cfg.k * cfg.f0_hz) * sample_rate_hz));
}

/// Streaming band-pass filter, one or two cascaded identical biquads in
/// transposed direct form II. Instances hold mutable state and must not be
/// shared across threads; separate channels use separate instances.
class BandpassFilter {
public:
    BandpassFilter(const BpfConfig& cfg, double sample_rate_hz)
        : coeffs_(design_bpf(cfg, sample_rate_hz)), stages_(cfg.cascade_order) {
        reset();
    }

    void reset() { state_ = {}; }

    double process(double x) {
        double y = x;
        for (int s = 0; s < stages_; ++s) {
            auto& st = state_[static_cast<std::size_t>(s)];
            const double out = coeffs_.b0 * y + st[0];
            st[0] = coeffs_.b1 * y - coeffs_.a1 * out + st[1];
            st[1] = coeffs_.b2 * y - coeffs_.a2 * out;
            y = out;
        }
        return y;
    }

    const BiquadCoeffs& coeffs() const { return coeffs_; }
    int stages() const { return stages_; }

    /// Combined response of the whole cascade at f_hz.
    std::complex<double> response(double f_hz, double sample_rate_hz) const {
        std::complex<double> h = biquad_response(coeffs_, f_hz, sample_rate_hz);
        return stages_ == 2 ? h * h : h;
    }

private:
    BiquadCoeffs coeffs_;
    int stages_;
    std::array<std::array<double, 2>, 2> state_{};
};

} // namespace ecmid
