#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "ecmid/errors.hpp"

namespace ecmid {

using Complex = std::complex<double>;

/// Randles-circuit parameter set. Units are strict SI: ohms, farads,
/// ohm*(rad/s)^0.5. Milliohm conversions belong at I/O boundaries only.
///
/// c1 == 0 is accepted as an open capacitor (pure R0+R1+W cell) and
/// aw == 0 as the no-diffusion RC cell; both keep the forward model
/// well defined for degenerate round-trip tests.
struct EcmParams {
    double r0 = 0.0; ///< electrolyte (series) resistance, ohm
    double r1 = 0.0; ///< charge-transfer resistance, ohm
    double c1 = 0.0; ///< double-layer capacitance, farad
    double aw = 0.0; ///< Warburg gain, ohm*(rad/s)^0.5

    void validate() const {
        if (!std::isfinite(r0) || !std::isfinite(r1) || !std::isfinite(c1) || !std::isfinite(aw))
            throw ValidationError("EcmParams: all values must be finite");
        if (r0 <= 0.0)
            throw ValidationError("EcmParams: r0 must be > 0");
        if (r1 <= 0.0)
            throw ValidationError("EcmParams: r1 must be > 0");
        if (c1 < 0.0)
            throw ValidationError("EcmParams: c1 must be >= 0");
        if (aw < 0.0)
            throw ValidationError("EcmParams: aw must be >= 0");
    }
};

/// One complex impedance sample. Inductive points (imag > 0) are
/// representable; the model itself never produces them.
struct ImpedancePoint {
    double freq_hz = 0.0;
    Complex z;

    void validate() const {
        if (!(freq_hz > 0.0) || !std::isfinite(freq_hz))
            throw ValidationError("ImpedancePoint: freq_hz must be positive and finite");
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ValidationError("ImpedancePoint: impedance must be finite");
    }
};

/// Frequency-sorted impedance sweep. The container accepts any sweep with
/// at least one point; consumers that need a full EIS curve (parsing,
/// frequency selection) enforce their own minimum of three points.
class ImpedanceSpectrum {
public:
    ImpedanceSpectrum() = default;

    explicit ImpedanceSpectrum(std::vector<ImpedancePoint> points) : points_(std::move(points)) {
        if (points_.empty())
            throw ValidationError("ImpedanceSpectrum: needs at least one point");
        for (const auto& p : points_)
            p.validate();
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i - 1].freq_hz < points_[i].freq_hz))
                throw ValidationError("ImpedanceSpectrum: frequencies must be strictly increasing");
        }
    }

    std::size_t size() const { return points_.size(); }
    const ImpedancePoint& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<ImpedancePoint>& points() const { return points_; }
    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

    double min_freq_hz() const { return points_.front().freq_hz; }
    double max_freq_hz() const { return points_.back().freq_hz; }

    std::vector<double> frequencies() const {
        std::vector<double> f;
        f.reserve(points_.size());
        for (const auto& p : points_)
            f.push_back(p.freq_hz);
        return f;
    }

private:
    std::vector<ImpedancePoint> points_;
};

/// Warburg element A_w / sqrt(j*omega) = A_w/sqrt(2*omega) * (1 - j).
/// Phase is exactly -45 degrees for any positive gain.
inline Complex warburg_impedance(double aw, double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("warburg_impedance: omega must be > 0");
    if (aw < 0.0 || !std::isfinite(aw))
        throw DomainError("warburg_impedance: aw must be >= 0 and finite");
    if (aw == 0.0)
        return {0.0, 0.0};
    const double m = aw / std::sqrt(2.0 * omega);
    return {m, -m};
}

/// Full Randles impedance: Z = R0 + (R1 + W) / (1 + j*omega*C1*(R1 + W)),
/// i.e. C1 in parallel with the series R1-W branch. Limits: Z -> R0 as
/// omega -> inf; Z -> R0 + R1 + W as omega -> 0; c1 = 0 opens the
/// capacitor branch.
inline Complex randles_impedance(const EcmParams& p, double omega) {
    p.validate();
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("randles_impedance: omega must be > 0");
    const Complex series = p.r1 + warburg_impedance(p.aw, omega);
    const Complex branch = series / (1.0 + Complex(0.0, 1.0) * omega * p.c1 * series);
    return p.r0 + branch;
}

/// Batch forward evaluation over a strictly increasing frequency list.
inline ImpedanceSpectrum spectrum_from_params(const EcmParams& p, std::span<const double> freqs_hz) {
    if (freqs_hz.empty())
        throw ValidationError("spectrum_from_params: frequency list is empty");
    std::vector<ImpedancePoint> pts;
    pts.reserve(freqs_hz.size());
    double prev = 0.0;
    for (double f : freqs_hz) {
        if (!(f > prev))
            throw ValidationError("spectrum_from_params: frequencies must be strictly increasing and positive");
        prev = f;
        pts.push_back({f, randles_impedance(p, 2.0 * std::numbers::pi * f)});
    }
    return ImpedanceSpectrum(std::move(pts));
}

/// Log-spaced frequency grid, endpoints included.
inline std::vector<double> log_frequency_grid(double f_min_hz, double f_max_hz, std::size_t n_points) {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz) || n_points < 2)
        throw ValidationError("log_frequency_grid: need 0 < f_min < f_max and n >= 2");
    std::vector<double> f(n_points);
    const double lo = std::log10(f_min_hz);
    const double hi = std::log10(f_max_hz);
    for (std::size_t i = 0; i < n_points; ++i)
        f[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1));
    f.front() = f_min_hz;
    f.back() = f_max_hz;
    return f;
}

} // namespace ecmid
