#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "ecmid/dsp.hpp"
#include "ecmid/errors.hpp"
#include "ecmid/metrics.hpp"
#include "ecmid/model.hpp"
#include "ecmid/solver.hpp"
#include "ecmid/spectrum_io.hpp"

namespace ecmid {

struct FitResult {
    FitReport report;
    TripletMeasurement measurement;
    ImpedanceSpectrum model; ///< forward evaluation on the scored grid
};

namespace detail {

inline FitResult assemble_fit(const TripletMeasurement& m, const ImpedanceSpectrum* reference,
                              double min_separation_ratio, std::vector<std::string> warnings) {
    const Identification idn = identify(m, min_separation_ratio);

    FitResult out{{}, m, ImpedanceSpectrum{}};
    out.report.params = idn.params;
    out.report.triplet = m.triplet;
    out.report.c1_consistency_gap_pct = idn.c1_consistency_gap_pct;
    out.report.warnings = std::move(warnings);
    out.report.warnings.insert(out.report.warnings.end(), idn.warnings.begin(), idn.warnings.end());

    if (reference) {
        const FitScore score = score_fit(idn.params, *reference);
        out.report.per_freq_error_pct = score.per_freq_error_pct;
        out.report.rmse_pct = score.rmse_pct;
        out.report.ame_pct = score.ame_pct;
        std::vector<double> freqs;
        freqs.reserve(score.per_freq_error_pct.size());
        for (const auto& [f, e] : score.per_freq_error_pct)
            freqs.push_back(f);
        out.model = spectrum_from_params(idn.params, freqs);
    }
    return out;
}

} // namespace detail

/// EIS workflow: select the triplet, probe the spectrum, identify, score
/// the reconstruction against the full measured sweep.
inline FitResult fit_eis(const ImpedanceSpectrum& measured, const SelectionPolicy& policy = {}) {
    const SelectedTriplet sel = select_frequencies(measured, policy);
    const TripletMeasurement m = probe_spectrum(measured, sel.triplet);
    return detail::assemble_fit(m, &measured, policy.min_separation_ratio, sel.warnings);
}

/// One pulse record tagged with its excitation frequency.
struct PulseRecord {
    TimeSeries series;
    double freq_hz = 0.0;
};

/// Pulse workflow: extract one impedance per record via the band-pass +
/// quadrature pipeline, then identify. Records are sorted by frequency
/// (with a warning) if handed over out of order. RMSE/AME are computed
/// only when a reference spectrum is supplied.
inline FitResult fit_pulse(std::vector<PulseRecord> records, double k = 1.0, int cascade_order = 2,
                           const ImpedanceSpectrum* reference = nullptr,
                           double min_separation_ratio = 10.0) {
    if (records.size() != 3)
        throw UsageError("fit_pulse: exactly three pulse records are required");

    std::vector<std::string> warnings;
    const bool sorted = std::is_sorted(records.begin(), records.end(),
                                       [](const PulseRecord& a, const PulseRecord& b) {
                                           return a.freq_hz < b.freq_hz;
                                       });
    if (!sorted) {
        std::sort(records.begin(), records.end(),
                  [](const PulseRecord& a, const PulseRecord& b) { return a.freq_hz < b.freq_hz; });
        warnings.emplace_back("pulse records were reordered by ascending frequency");
    }

    ImpedancePoint pts[3];
    for (std::size_t i = 0; i < 3; ++i) {
        const BpfConfig cfg{records[i].freq_hz, k, cascade_order};
        pts[i] = measure_impedance(records[i].series, cfg);
    }

    TripletMeasurement m;
    m.triplet = {pts[0].freq_hz, pts[1].freq_hz, pts[2].freq_hz};
    m.z_low = pts[0].z;
    m.z_mid = pts[1].z;
    m.z_high = pts[2].z;
    return detail::assemble_fit(m, reference, min_separation_ratio, std::move(warnings));
}

/// Scores an existing parameter set against a measured spectrum.
inline FitResult validate_params(const EcmParams& params, const ImpedanceSpectrum& measured) {
    params.validate();
    const FitScore score = score_fit(params, measured);

    FitResult out{{}, {}, ImpedanceSpectrum{}};
    out.report.params = params;
    out.report.per_freq_error_pct = score.per_freq_error_pct;
    out.report.rmse_pct = score.rmse_pct;
    out.report.ame_pct = score.ame_pct;
    std::vector<double> freqs;
    freqs.reserve(score.per_freq_error_pct.size());
    for (const auto& [f, e] : score.per_freq_error_pct)
        freqs.push_back(f);
    out.model = spectrum_from_params(params, freqs);
    return out;
}

} // namespace ecmid
