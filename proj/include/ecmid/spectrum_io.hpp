#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ecmid/errors.hpp"
#include "ecmid/model.hpp"
#include "ecmid/solver.hpp"
#include "ecmid/timeseries.hpp"

namespace ecmid {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return cells;
}

inline double parse_double(std::string_view cell, long line_number) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || cell.empty())
        throw ParseError("non-numeric cell '" + std::string(cell) + "'", line_number);
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

/// Reads an EIS CSV. Accepted headers:
///   freq_hz,re_ohm,im_ohm       (rectangular)
///   freq_hz,mag_ohm,phase_deg   (polar, capacitive phase negative)
/// '#'-prefixed comment lines and blank lines are ignored. Rows may be in
/// any order; the result is sorted. At least three rows are required.
inline ImpedanceSpectrum parse_eis_csv(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    long line_number = 0;
    bool header_seen = false;
    bool polar = false;
    std::vector<ImpedancePoint> pts;

    while (std::getline(in, line)) {
        ++line_number;
        const auto sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#')
            continue;
        if (!header_seen) {
            const auto cells = detail::split_csv(sv);
            if (cells.size() == 3 && cells[0] == "freq_hz" && cells[1] == "re_ohm" && cells[2] == "im_ohm")
                polar = false;
            else if (cells.size() == 3 && cells[0] == "freq_hz" && cells[1] == "mag_ohm" &&
                     cells[2] == "phase_deg")
                polar = true;
            else
                throw ParseError(name + ": unknown EIS header '" + std::string(sv) + "'", line_number);
            header_seen = true;
            continue;
        }
        const auto cells = detail::split_csv(sv);
        if (cells.size() != 3)
            throw ParseError(name + ": expected 3 cells", line_number);
        const double f = detail::parse_double(cells[0], line_number);
        const double a = detail::parse_double(cells[1], line_number);
        const double b = detail::parse_double(cells[2], line_number);
        Complex z;
        if (polar)
            z = std::polar(a, b * std::numbers::pi / 180.0);
        else
            z = {a, b};
        pts.push_back({f, z});
        pts.back().validate();
    }
    if (!header_seen)
        throw ParseError(name + ": missing header line");
    if (pts.size() < 3)
        throw ParseError(name + ": an EIS spectrum needs at least 3 rows");

    std::sort(pts.begin(), pts.end(),
              [](const ImpedancePoint& x, const ImpedancePoint& y) { return x.freq_hz < y.freq_hz; });
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].freq_hz == pts[i - 1].freq_hz)
            throw ParseError(name + ": duplicate frequency " + detail::format_double(pts[i].freq_hz));
    return ImpedanceSpectrum(std::move(pts));
}

inline ImpedanceSpectrum parse_eis_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open EIS file '" + path + "'");
    return parse_eis_csv(in, path);
}

inline void write_eis_csv(std::ostream& out, const ImpedanceSpectrum& s) {
    out << "freq_hz,re_ohm,im_ohm\n";
    for (const auto& p : s)
        out << detail::format_double(p.freq_hz) << ',' << detail::format_double(p.z.real()) << ','
            << detail::format_double(p.z.imag()) << '\n';
}

inline void write_eis_csv(const std::string& path, const ImpedanceSpectrum& s) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot open '" + path + "' for writing");
    write_eis_csv(out, s);
}

/// Time-series CSV, header t_s,i_a,v_v with strictly increasing uniform t.
inline TimeSeries read_timeseries_csv(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    long line_number = 0;
    bool header_seen = false;
    std::vector<double> t, i, v;

    while (std::getline(in, line)) {
        ++line_number;
        const auto sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#')
            continue;
        if (!header_seen) {
            const auto cells = detail::split_csv(sv);
            if (!(cells.size() == 3 && cells[0] == "t_s" && cells[1] == "i_a" && cells[2] == "v_v"))
                throw ParseError(name + ": unknown time-series header '" + std::string(sv) + "'",
                                 line_number);
            header_seen = true;
            continue;
        }
        const auto cells = detail::split_csv(sv);
        if (cells.size() != 3)
            throw ParseError(name + ": expected 3 cells", line_number);
        t.push_back(detail::parse_double(cells[0], line_number));
        i.push_back(detail::parse_double(cells[1], line_number));
        v.push_back(detail::parse_double(cells[2], line_number));
    }
    if (!header_seen)
        throw ParseError(name + ": missing header line");
    if (t.size() < 2)
        throw ParseError(name + ": a time-series record needs at least 2 rows");

    const double dt = t[1] - t[0];
    if (!(dt > 0.0))
        throw ParseError(name + ": time stamps must be strictly increasing");
    for (std::size_t n = 1; n < t.size(); ++n) {
        const double step = t[n] - t[n - 1];
        if (!(step > 0.0) || std::abs(step - dt) > 1e-6 * dt)
            throw ParseError(name + ": non-uniform sampling near row " + std::to_string(n + 1));
    }

    TimeSeries ts;
    ts.sample_rate_hz = 1.0 / dt;
    ts.current_a = std::move(i);
    ts.voltage_v = std::move(v);
    return ts;
}

inline TimeSeries read_timeseries_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open time-series file '" + path + "'");
    return read_timeseries_csv(in, path);
}

inline void write_timeseries_csv(std::ostream& out, const TimeSeries& ts) {
    ts.validate();
    out << "t_s,i_a,v_v\n";
    const double dt = 1.0 / ts.sample_rate_hz;
    for (std::size_t n = 0; n < ts.size(); ++n)
        out << detail::format_double(static_cast<double>(n) * dt) << ','
            << detail::format_double(ts.current_a[n]) << ','
            << detail::format_double(ts.voltage_v[n]) << '\n';
}

inline void write_timeseries_csv(const std::string& path, const TimeSeries& ts) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot open '" + path + "' for writing");
    write_timeseries_csv(out, ts);
}

/// How the probe triplet is picked from a spectrum.
struct SelectionPolicy {
    enum class HighRule { MinImag, ZeroSlope };

    std::optional<double> f_low_hz;  ///< explicit override
    std::optional<double> f_mid_hz;  ///< explicit override (else knee rule)
    std::optional<double> f_high_hz; ///< explicit override (else high_rule)
    HighRule high_rule = HighRule::MinImag;
    double min_separation_ratio = 10.0;
};

struct SelectedTriplet {
    FrequencyTriplet triplet;
    std::vector<std::string> warnings;
};

/// Picks (f_low, f_mid, f_high) from a measured spectrum:
///  - f_high: point with minimal |Im| before any inductive upturn
///    ("min-imag"), or the first point sweeping upward whose |d|Z|/dlog10 f|
///    drops below 1% of |Z| per decade ("zero-slope").
///  - f_mid: the knee (maximum -Im inside the capacitive semicircle, i.e.
///    after the diffusion tail stops falling), stepped one grid point
///    toward f_high.
///  - f_low: the grid frequency >= 0.05 Hz closest to 0.1 Hz in log space.
/// Explicit overrides are range-checked and returned verbatim.
inline SelectedTriplet select_frequencies(const ImpedanceSpectrum& s, const SelectionPolicy& policy) {
    if (s.size() < 3)
        throw SelectionError("select_frequencies: spectrum needs at least 3 points");
    if (std::log10(s.max_freq_hz() / s.min_freq_hz()) < 2.0)
        throw SelectionError("select_frequencies: spectrum must span at least two decades");

    auto check_range = [&](double f, const char* which) {
        if (f < s.min_freq_hz() || f > s.max_freq_hz()) {
            std::ostringstream os;
            os << "select_frequencies: " << which << " override " << f
               << " Hz lies outside the spectrum range [" << s.min_freq_hz() << ", "
               << s.max_freq_hz() << "]";
            throw SelectionError(os.str());
        }
    };

    const std::size_t n = s.size();

    // Candidates end at the first inductive point, if any.
    std::size_t n_cap = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i].z.imag() > 0.0) {
            n_cap = i;
            break;
        }
    }
    if (n_cap < 3)
        throw SelectionError("select_frequencies: too few capacitive points before the inductive upturn");

    // f_high
    double f_high;
    std::size_t i_high = n_cap - 1;
    if (policy.f_high_hz) {
        f_high = *policy.f_high_hz;
        check_range(f_high, "f_high");
        while (i_high > 0 && s[i_high].freq_hz > f_high)
            --i_high;
    } else if (policy.high_rule == SelectionPolicy::HighRule::MinImag) {
        for (std::size_t i = 0; i < n_cap; ++i)
            if (std::abs(s[i].z.imag()) < std::abs(s[i_high].z.imag()))
                i_high = i;
        f_high = s[i_high].freq_hz;
    } else {
        bool found = false;
        for (std::size_t i = 0; i + 1 < n_cap; ++i) {
            const double slope = (std::abs(s[i + 1].z) - std::abs(s[i].z)) /
                                 (std::log10(s[i + 1].freq_hz) - std::log10(s[i].freq_hz));
            if (std::abs(slope) < 0.01 * std::abs(s[i].z)) {
                i_high = i;
                found = true;
                break;
            }
        }
        if (!found)
            throw SelectionError("select_frequencies: no zero-slope plateau found for f_high");
        f_high = s[i_high].freq_hz;
    }

    // f_mid: knee of -Im between the end of the diffusion tail and f_high.
    double f_mid;
    if (policy.f_mid_hz) {
        f_mid = *policy.f_mid_hz;
        check_range(f_mid, "f_mid");
    } else {
        const std::size_t bound = i_high;
        // diffusion tail = initial run where -Im keeps falling
        std::size_t i_tail = 0;
        while (i_tail + 1 < bound && -s[i_tail + 1].z.imag() < -s[i_tail].z.imag())
            ++i_tail;
        std::size_t i_knee = i_tail;
        for (std::size_t i = i_tail; i < bound; ++i)
            if (-s[i].z.imag() > -s[i_knee].z.imag())
                i_knee = i;
        if (!(-s[i_knee].z.imag() > 0.0) || (i_tail > 0 && i_knee == i_tail))
            throw SelectionError("select_frequencies: no capacitive semicircle found");
        if (i_knee + 1 < bound)
            ++i_knee; // "earlier parts" of the semicircle: one step toward f_high
        f_mid = s[i_knee].freq_hz;
    }

    // f_low
    double f_low;
    if (policy.f_low_hz) {
        f_low = *policy.f_low_hz;
        check_range(f_low, "f_low");
    } else {
        bool found = false;
        double best = 0.0;
        double best_dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = s[i].freq_hz;
            if (f < 0.05 || f >= f_mid)
                continue;
            const double dist = std::abs(std::log10(f / 0.1));
            if (!found || dist < best_dist) {
                best = f;
                best_dist = dist;
                found = true;
            }
        }
        if (!found)
            throw SelectionError("select_frequencies: no usable low frequency >= 0.05 Hz below f_mid");
        f_low = best;
    }

    SelectedTriplet out;
    out.triplet = {f_low, f_mid, f_high};
    out.triplet.validate();
    out.warnings = out.triplet.separation_warnings(policy.min_separation_ratio);
    return out;
}

/// Impedance at an arbitrary in-range frequency: exact grid hits verbatim,
/// otherwise linear interpolation in log10(f), real and imaginary parts
/// independently. No extrapolation.
inline Complex interpolate_impedance(const ImpedanceSpectrum& s, double f_hz) {
    if (!(f_hz > 0.0))
        throw DomainError("interpolate_impedance: frequency must be > 0");
    if (f_hz < s.min_freq_hz() * (1.0 - 1e-12) || f_hz > s.max_freq_hz() * (1.0 + 1e-12))
        throw RangeError("interpolate_impedance: frequency outside the measured range");

    const auto& pts = s.points();
    auto it = std::lower_bound(pts.begin(), pts.end(), f_hz,
                               [](const ImpedancePoint& p, double f) { return p.freq_hz < f; });
    if (it != pts.end() && std::abs(it->freq_hz - f_hz) <= 1e-9 * f_hz)
        return it->z;
    if (it != pts.begin() && std::abs((it - 1)->freq_hz - f_hz) <= 1e-9 * f_hz)
        return (it - 1)->z;
    if (it == pts.begin())
        return pts.front().z;
    if (it == pts.end())
        return pts.back().z;
    const auto& lo = *(it - 1);
    const auto& hi = *it;
    const double t = (std::log10(f_hz) - std::log10(lo.freq_hz)) /
                     (std::log10(hi.freq_hz) - std::log10(lo.freq_hz));
    return {lo.z.real() + t * (hi.z.real() - lo.z.real()),
            lo.z.imag() + t * (hi.z.imag() - lo.z.imag())};
}

/// Reads the three triplet impedances out of a spectrum.
inline TripletMeasurement probe_spectrum(const ImpedanceSpectrum& s, const FrequencyTriplet& t) {
    t.validate();
    TripletMeasurement m;
    m.triplet = t;
    m.z_low = interpolate_impedance(s, t.f_low_hz);
    m.z_mid = interpolate_impedance(s, t.f_mid_hz);
    m.z_high = interpolate_impedance(s, t.f_high_hz);
    return m;
}

} // namespace ecmid
