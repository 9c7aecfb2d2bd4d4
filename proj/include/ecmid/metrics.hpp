#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ecmid/errors.hpp"
#include "ecmid/model.hpp"
#include "ecmid/solver.hpp"
#include "ecmid/spectrum_io.hpp"

namespace ecmid {

/// Everything a fit run reports: the identified parameters, where they
/// were probed, per-frequency magnitude errors and their RMSE/AME summary.
/// rmse/ame are absent when no reference spectrum was scored (pulse fits
/// without a reference EIS file).
struct FitReport {
    EcmParams params;
    std::optional<FrequencyTriplet> triplet;
    std::vector<std::pair<double, double>> per_freq_error_pct; ///< (freq_hz, signed %)
    std::optional<double> rmse_pct;
    std::optional<double> ame_pct;
    std::optional<double> c1_consistency_gap_pct;
    std::vector<std::string> warnings;
};

/// Signed per-point magnitude error 100*(|Z_model| - |Z_meas|)/|Z_meas|.
/// The grids must match point for point.
inline std::vector<std::pair<double, double>> magnitude_error_pct(const ImpedanceSpectrum& model,
                                                                  const ImpedanceSpectrum& measured) {
    if (model.size() != measured.size())
        throw ContractError("magnitude_error_pct: spectra have different sizes");
    std::vector<std::pair<double, double>> errs;
    errs.reserve(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (std::abs(model[i].freq_hz - measured[i].freq_hz) > 1e-9 * measured[i].freq_hz)
            throw ContractError("magnitude_error_pct: frequency grids do not match");
        const double zm = std::abs(measured[i].z);
        if (zm == 0.0)
            throw DomainError("magnitude_error_pct: measured |Z| is zero");
        errs.emplace_back(measured[i].freq_hz, 100.0 * (std::abs(model[i].z) - zm) / zm);
    }
    return errs;
}

/// RMSE and absolute maximum error of a percent-error list.
inline std::pair<double, double> summarize(std::span<const double> errors_pct) {
    if (errors_pct.empty())
        throw ContractError("summarize: empty error list");
    double sq = 0.0;
    double ame = 0.0;
    for (double e : errors_pct) {
        sq += e * e;
        ame = std::max(ame, std::abs(e));
    }
    return {std::sqrt(sq / static_cast<double>(errors_pct.size())), ame};
}

/// Indices scored against the model: all capacitive points (Im <= 0) plus
/// the minimum-|Im| point. The model has no inductance, so the inductive
/// tail is out-of-model physics and stays unscored.
inline std::vector<std::size_t> scoring_indices(const ImpedanceSpectrum& measured) {
    std::vector<std::size_t> idx;
    std::size_t i_min = 0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        if (std::abs(measured[i].z.imag()) < std::abs(measured[i_min].z.imag()))
            i_min = i;
        if (measured[i].z.imag() <= 0.0)
            idx.push_back(i);
    }
    if (measured[i_min].z.imag() > 0.0) {
        idx.push_back(i_min);
        std::sort(idx.begin(), idx.end());
    }
    return idx;
}

/// Forward-evaluates params on the measured grid (restricted to the
/// scoring indices) and summarizes the magnitude errors.
struct FitScore {
    std::vector<std::pair<double, double>> per_freq_error_pct;
    double rmse_pct = 0.0;
    double ame_pct = 0.0;
};

inline FitScore score_fit(const EcmParams& params, const ImpedanceSpectrum& measured) {
    const auto idx = scoring_indices(measured);
    if (idx.empty())
        throw ContractError("score_fit: nothing to score");
    std::vector<ImpedancePoint> meas_pts;
    std::vector<double> freqs;
    meas_pts.reserve(idx.size());
    freqs.reserve(idx.size());
    for (std::size_t i : idx) {
        meas_pts.push_back(measured[i]);
        freqs.push_back(measured[i].freq_hz);
    }
    const ImpedanceSpectrum meas_sub(std::move(meas_pts));
    const ImpedanceSpectrum model = spectrum_from_params(params, freqs);

    FitScore out;
    out.per_freq_error_pct = magnitude_error_pct(model, meas_sub);
    std::vector<double> e;
    e.reserve(out.per_freq_error_pct.size());
    for (const auto& [f, pct] : out.per_freq_error_pct)
        e.push_back(pct);
    const auto [rmse, ame] = summarize(e);
    out.rmse_pct = rmse;
    out.ame_pct = ame;
    return out;
}

// --- flat key-value report format -------------------------------------
//
// One `key=value` pair per line, full double precision, stable key names.
// The same format doubles as the parameter-file format consumed by the
// CLI, so reports can be fed straight back in.

inline void write_report_kv(std::ostream& out, const FitReport& r) {
    auto kv = [&](const char* key, double v) {
        out << key << '=' << detail::format_double(v) << '\n';
    };
    kv("r0_ohm", r.params.r0);
    kv("r1_ohm", r.params.r1);
    kv("c1_f", r.params.c1);
    kv("aw_ohm_sqrt_rad_s", r.params.aw);
    if (r.triplet) {
        kv("f_low_hz", r.triplet->f_low_hz);
        kv("f_mid_hz", r.triplet->f_mid_hz);
        kv("f_high_hz", r.triplet->f_high_hz);
    }
    if (r.rmse_pct)
        kv("rmse_pct", *r.rmse_pct);
    if (r.ame_pct)
        kv("ame_pct", *r.ame_pct);
    if (r.c1_consistency_gap_pct)
        kv("c1_consistency_gap_pct", *r.c1_consistency_gap_pct);
    out << "warning_count=" << r.warnings.size() << '\n';
    for (std::size_t i = 0; i < r.warnings.size(); ++i)
        out << "warning_" << (i + 1) << '=' << r.warnings[i] << '\n';
}

inline void write_report_kv(const std::string& path, const FitReport& r) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot open '" + path + "' for writing");
    write_report_kv(out, r);
}

/// Human-readable report; RMSE/AME printed to two decimals.
inline std::string format_report_text(const FitReport& r) {
    std::ostringstream os;
    char buf[64];
    os << "Identified Randles parameters\n";
    std::snprintf(buf, sizeof(buf), "  R0  = %.6g mOhm\n", r.params.r0 * 1e3);
    os << buf;
    std::snprintf(buf, sizeof(buf), "  R1  = %.6g mOhm\n", r.params.r1 * 1e3);
    os << buf;
    std::snprintf(buf, sizeof(buf), "  C1  = %.6g F\n", r.params.c1);
    os << buf;
    std::snprintf(buf, sizeof(buf), "  Aw  = %.6g mOhm(rad/s)^0.5\n", r.params.aw * 1e3);
    os << buf;
    if (r.triplet) {
        std::snprintf(buf, sizeof(buf), "Probe triplet: %.6g / %.6g / %.6g Hz\n",
                      r.triplet->f_low_hz, r.triplet->f_mid_hz, r.triplet->f_high_hz);
        os << buf;
    }
    if (r.rmse_pct && r.ame_pct) {
        std::snprintf(buf, sizeof(buf), "RMSE = %.2f %%   AME = %.2f %%\n", *r.rmse_pct, *r.ame_pct);
        os << buf;
    }
    if (r.c1_consistency_gap_pct) {
        std::snprintf(buf, sizeof(buf), "C1 consistency gap = %.2f %%\n", *r.c1_consistency_gap_pct);
        os << buf;
    }
    for (const auto& w : r.warnings)
        os << "warning: " << w << '\n';
    return os.str();
}

/// Reads `key=value` lines into a map; '#' comments and blanks ignored.
inline std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open key-value file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#')
            continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path + ": expected key=value", line_number);
        kv[std::string(detail::trim(sv.substr(0, eq)))] = std::string(detail::trim(sv.substr(eq + 1)));
    }
    return kv;
}

/// Parses an EcmParams file (same keys the reports use). A missing field
/// is a usage mistake; a malformed number is a parse failure.
inline EcmParams read_params_kv(const std::string& path) {
    const auto kv = read_kv_file(path);
    auto need = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw UsageError("params file '" + path + "' is missing field '" + key + "'");
        return detail::parse_double(it->second, 0);
    };
    EcmParams p{need("r0_ohm"), need("r1_ohm"), need("c1_f"), need("aw_ohm_sqrt_rad_s")};
    p.validate();
    return p;
}

} // namespace ecmid
