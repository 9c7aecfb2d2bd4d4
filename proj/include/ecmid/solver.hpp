#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ecmid/errors.hpp"
#include "ecmid/model.hpp"

namespace ecmid {

/// The three probe frequencies driving the closed-form solver.
struct FrequencyTriplet {
    double f_low_hz = 0.0;
    double f_mid_hz = 0.0;
    double f_high_hz = 0.0;

    void validate() const {
        if (!(f_low_hz > 0.0 && f_low_hz < f_mid_hz && f_mid_hz < f_high_hz))
            throw ValidationError("FrequencyTriplet: need 0 < f_low < f_mid < f_high");
    }

    /// Warnings (not errors) when the separation ratios are too small for
    /// the asymptotic neglect assumptions to hold well.
    std::vector<std::string> separation_warnings(double min_ratio = 10.0) const {
        std::vector<std::string> w;
        std::ostringstream os;
        if (f_mid_hz / f_low_hz < min_ratio) {
            os << "f_mid/f_low = " << f_mid_hz / f_low_hz << " is below the recommended ratio "
               << min_ratio << "; low-frequency probe may sit inside the semicircle";
            w.push_back(os.str());
            os.str({});
        }
        if (f_high_hz / f_mid_hz < min_ratio) {
            os << "f_high/f_mid = " << f_high_hz / f_mid_hz << " is below the recommended ratio "
               << min_ratio << "; high-frequency probe may still see the RC branch";
            w.push_back(os.str());
        }
        return w;
    }
};

/// Complex impedances measured at the triplet frequencies.
struct TripletMeasurement {
    FrequencyTriplet triplet;
    Complex z_low;
    Complex z_mid;
    Complex z_high;

    void validate() const {
        triplet.validate();
        if (!(z_low.imag() < 0.0))
            throw DegenerateInputError(
                "TripletMeasurement: imag(z_low) must be negative (capacitive Warburg region)");
        if (!(z_mid.imag() < 0.0))
            throw DegenerateInputError("TripletMeasurement: imag(z_mid) must be negative");
    }
};

/// High-frequency step: R0 is the real part of z_high. The imaginary
/// residue is a diagnostic for the caller, not an error.
inline double solve_r0(Complex z_high) {
    if (!std::isfinite(z_high.real()) || !std::isfinite(z_high.imag()))
        throw DomainError("solve_r0: z_high must be finite");
    return z_high.real();
}

/// Low-frequency step: A_w = |Im(z_low)| * sqrt(2*omega_low).
inline double solve_aw(Complex z_low, double omega_low) {
    if (!(omega_low > 0.0) || !std::isfinite(omega_low))
        throw DomainError("solve_aw: omega_low must be > 0");
    if (z_low.imag() == 0.0)
        throw DegenerateInputError("solve_aw: imag(z_low) is zero, no diffusion tail observable");
    return std::abs(z_low.imag()) * std::sqrt(2.0 * omega_low);
}

/// Low-frequency real part minus the series and diffusion terms:
/// R1 = Re(z_low) - R0 - A_w/sqrt(2*omega_low).
inline double solve_r1(Complex z_low, double r0, double aw, double omega_low) {
    if (!(omega_low > 0.0) || !std::isfinite(omega_low))
        throw DomainError("solve_r1: omega_low must be > 0");
    const double r1 = z_low.real() - r0 - aw / std::sqrt(2.0 * omega_low);
    if (!(r1 > 0.0)) {
        std::ostringstream os;
        os << "solve_r1: non-physical charge-transfer resistance " << r1
           << " ohm; check the probe frequency selection";
        throw NonPhysicalError(os.str(), r1);
    }
    return r1;
}

/// Mid-frequency step: alpha = Re(z_mid) - R0, C1 = |Im(z_mid)|/(alpha*omega_mid*R1).
inline double solve_c1(Complex z_mid, double r0, double r1, double omega_mid) {
    if (!(omega_mid > 0.0) || !std::isfinite(omega_mid))
        throw DomainError("solve_c1: omega_mid must be > 0");
    if (!(r1 > 0.0))
        throw DomainError("solve_c1: r1 must be > 0");
    const double alpha = z_mid.real() - r0;
    if (!(alpha > 0.0)) {
        std::ostringstream os;
        os << "solve_c1: Re(z_mid) - r0 = " << alpha
           << " ohm is not positive; mid probe lies outside the semicircle";
        throw NonPhysicalError(os.str(), alpha);
    }
    if (z_mid.imag() >= 0.0)
        throw DegenerateInputError("solve_c1: imag(z_mid) must be negative (capacitive)");
    return std::abs(z_mid.imag()) / (alpha * omega_mid * r1);
}

/// Result of a full closed-form identification.
struct Identification {
    EcmParams params;
    /// Relative gap between C1 from the imaginary part (the result) and C1
    /// re-derived from the real part alone; quantifies how well the
    /// mid-frequency assumption held. Percent of the returned C1.
    double c1_consistency_gap_pct = 0.0;
    /// |Im(z_high)| left over after taking R0 = Re(z_high). Ohms.
    double r0_imag_residue_ohm = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

template <typename Fn>
auto tagged(double freq_hz, Fn&& fn) {
    auto tag = [freq_hz](const std::string& msg) {
        std::ostringstream os;
        os << "at " << freq_hz << " Hz: " << msg;
        return os.str();
    };
    try {
        return fn();
    } catch (const NonPhysicalError& e) {
        throw NonPhysicalError(tag(e.what()), e.value);
    } catch (const DegenerateInputError& e) {
        throw DegenerateInputError(tag(e.what()));
    } catch (const DomainError& e) {
        throw DomainError(tag(e.what()));
    }
}

} // namespace detail

/// Computes all four parameters from one triplet measurement, in the
/// dependency order R0 -> A_w -> R1 -> C1. Pure arithmetic: identical
/// inputs give bit-identical outputs. Sub-operation errors are rethrown
/// tagged with the offending frequency.
inline Identification identify(const TripletMeasurement& m, double min_separation_ratio = 10.0) {
    m.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double w_low = two_pi * m.triplet.f_low_hz;
    const double w_mid = two_pi * m.triplet.f_mid_hz;

    Identification out;
    const double r0 =
        detail::tagged(m.triplet.f_high_hz, [&] { return solve_r0(m.z_high); });
    if (!(r0 > 0.0))
        throw NonPhysicalError("identify: non-positive r0 from high-frequency probe", r0);
    const double aw =
        detail::tagged(m.triplet.f_low_hz, [&] { return solve_aw(m.z_low, w_low); });
    const double r1 =
        detail::tagged(m.triplet.f_low_hz, [&] { return solve_r1(m.z_low, r0, aw, w_low); });
    const double c1 =
        detail::tagged(m.triplet.f_mid_hz, [&] { return solve_c1(m.z_mid, r0, r1, w_mid); });

    out.params = {r0, r1, c1, aw};
    out.r0_imag_residue_ohm = std::abs(m.z_high.imag());

    // C1 is over-determined by the mid-frequency real and imaginary parts;
    // the gap between the two routes measures the neglected Warburg term.
    const double alpha = m.z_mid.real() - r0;
    const double c1_alt = std::sqrt(std::max(r1 / alpha - 1.0, 0.0)) / (w_mid * r1);
    out.c1_consistency_gap_pct = 100.0 * std::abs(c1 - c1_alt) / c1;

    out.warnings = m.triplet.separation_warnings(min_separation_ratio);
    return out;
}

} // namespace ecmid
