#ifndef NMZI_SPECTRUM_HPP
#define NMZI_SPECTRUM_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmzi/graph.hpp"

namespace nmzi {

enum class SignalMode { FirstOrder, Exact };

// Per-mirror oscillation drives plus the sampling setup. Frequencies must be
// distinct, below Nyquist, and complete at least 8 cycles over the record.
struct OscillationConfig {
    std::map<MirrorSymbol, double> frequency;  // Hz
    double tilt = 0.05;        // kick amplitude delta, same scale as g
    double sigma = 1.0;        // pointer width
    double sample_rate = 4096. ;  // Hz
    double duration = 1.0;     // s
    SignalMode mode = SignalMode::FirstOrder;
};

// Default drives: bin-centered (integer Hz over a 1 s record), pairwise
// non-harmonic, with sums and differences clear of every fundamental so the
// second-order intermodulation products stay identifiable.
OscillationConfig default_oscillation_config(const InterferometerGraph& graph);

// NyquistError / InvalidOscillationConfigError on any broken invariant.
void validate_config(const OscillationConfig& cfg, const InterferometerGraph& graph);

// Detector-centroid and detection-rate time series. In first-order mode the
// centroid is sum_n g_n(t) Re (P_n)_w; in exact mode it is the post-selected
// mean of a single pointer that accumulates every kick (a quad-cell reading)
// and the rate is the post-selection weight. Samples where the weight
// vanishes are zeroed and counted in `flagged_samples`.
struct SignalResult {
    std::vector<double> centroid;
    std::vector<double> rate;
    std::size_t flagged_samples = 0;
    double dt = 0.0;
};

SignalResult simulate_signal(const InterferometerGraph& graph, const std::string& detector,
                             const OscillationConfig& cfg);

struct SpectrumResult {
    std::vector<double> freqs;   // one-sided bin centers, Hz
    std::vector<double> power;   // sums to the mean square of the windowed signal
    // Power in the bin nearest each configured fundamental f_n.
    std::map<MirrorSymbol, double> peak_power;
    // Strongest sum/difference intermodulation bin involving f_n; this is
    // where second-order kick products land when a fundamental cancels.
    std::map<MirrorSymbol, double> signature_power;
    // Power at the f_E + f_F bin when both drives are configured.
    std::optional<double> sum_ef_power;

    double bin_width = 0.0;
};

// Hann-windowed one-sided periodogram, zero-padded to a power of two.
// EmptySignalError for records shorter than 16 samples. Peak maps are filled
// for the frequencies passed in (may be empty).
SpectrumResult power_spectrum(std::span<const double> signal, double sample_rate,
                              const std::map<MirrorSymbol, double>& frequencies = {});

struct SpectrumAnalysis {
    SignalResult signal;
    SpectrumResult centroid_spectrum;
    SpectrumResult rate_spectrum;
};

SpectrumAnalysis analyze_spectrum(const InterferometerGraph& graph,
                                  const std::string& detector, const OscillationConfig& cfg);

struct PeakScalingRow {
    MirrorSymbol mirror;
    double fundamental_slope;  // log-log slope of the centroid peak at f_n
    double signature_slope;    // log-log slope of the strongest rate intermod bin
    double slope;              // the slope of whichever channel carries the signal
    bool used_signature;
};

// Fits log-log slopes of peak power versus tilt over a decreasing ladder of
// tilt amplitudes (at least 4, spanning at least a decade, exact mode). A
// mirror whose fundamental is extinguished (below 1e-4 of the strongest
// fundamental) is scored on its second-order signature bin instead.
std::vector<PeakScalingRow> peak_scaling(const InterferometerGraph& graph,
                                         const std::string& detector, OscillationConfig cfg,
                                         std::span<const double> tilts);

}  // namespace nmzi

#endif  // NMZI_SPECTRUM_HPP
