#include "nmzi/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <fftw3.h>

#include "nmzi/pointer.hpp"
#include "nmzi/textio.hpp"
#include "nmzi/tsvf.hpp"

namespace nmzi {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Bin-centered over a 1 s record, pairwise non-harmonic, all sums and
// absolute differences distinct from every fundamental.
const std::map<MirrorSymbol, double> kDefaultFrequencies = {
    {MirrorSymbol::A, 331.0}, {MirrorSymbol::B, 377.0}, {MirrorSymbol::C, 433.0},
    {MirrorSymbol::E, 211.0}, {MirrorSymbol::F, 251.0}};

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::size_t nearest_bin(double freq, double bin_width, std::size_t n_bins) {
    const auto bin = static_cast<std::size_t>(std::llround(freq / bin_width));
    return std::min(bin, n_bins - 1);
}

}  // namespace

OscillationConfig default_oscillation_config(const InterferometerGraph& graph) {
    OscillationConfig cfg;
    for (MirrorSymbol m : graph.mirrors_present()) {
        const Element& e = graph.element(*graph.mirror_label(m));
        cfg.frequency[m] = e.frequency > 0.0 ? e.frequency : kDefaultFrequencies.at(m);
    }
    return cfg;
}

void validate_config(const OscillationConfig& cfg, const InterferometerGraph& graph) {
    if (cfg.sample_rate <= 0.0 || cfg.duration <= 0.0) {
        throw InvalidOscillationConfigError("sample rate and duration must be positive");
    }
    if (cfg.sigma <= 0.0) {
        throw InvalidOscillationConfigError("pointer width must be positive");
    }
    if (cfg.tilt < 0.0) {
        throw InvalidOscillationConfigError("tilt amplitude must be >= 0");
    }
    double f_max = 0.0;
    std::vector<double> freqs;
    for (MirrorSymbol m : graph.mirrors_present()) {
        auto it = cfg.frequency.find(m);
        if (it == cfg.frequency.end()) {
            throw InvalidOscillationConfigError("no drive frequency for mirror " + to_string(m));
        }
        if (it->second <= 0.0) {
            throw InvalidOscillationConfigError("drive frequencies must be positive");
        }
        if (cfg.duration * it->second < 8.0) {
            throw InvalidOscillationConfigError("mirror " + to_string(m) +
                                                " completes fewer than 8 cycles");
        }
        freqs.push_back(it->second);
        f_max = std::max(f_max, it->second);
    }
    std::sort(freqs.begin(), freqs.end());
    if (std::adjacent_find(freqs.begin(), freqs.end()) != freqs.end()) {
        throw InvalidOscillationConfigError("drive frequencies must be distinct");
    }
    if (cfg.sample_rate <= 2.0 * f_max) {
        throw NyquistError("sample rate " + format_double(cfg.sample_rate) +
                           " Hz does not exceed twice the fastest drive (" +
                           format_double(f_max) + " Hz)");
    }
}

SignalResult simulate_signal(const InterferometerGraph& graph, const std::string& detector,
                             const OscillationConfig& cfg) {
    validate_config(cfg, graph);

    const auto n_samples = static_cast<std::size_t>(std::llround(cfg.sample_rate * cfg.duration));
    SignalResult result;
    result.dt = 1.0 / cfg.sample_rate;
    result.centroid.resize(n_samples, 0.0);
    result.rate.resize(n_samples, 0.0);

    const auto mirrors = graph.mirrors_present();

    if (cfg.mode == SignalMode::FirstOrder) {
        const WeakValueResult wv = weak_values(graph, detector);
        const TwoStateVector tsv = two_state(graph, detector);
        const double base_rate = std::norm(tsv.overlap);
        for (std::size_t i = 0; i < n_samples; ++i) {
            const double t = static_cast<double>(i) * result.dt;
            double centroid = 0.0;
            for (MirrorSymbol m : mirrors) {
                const double g = cfg.tilt * std::sin(kTwoPi * cfg.frequency.at(m) * t);
                centroid += g * wv.per_mirror.at(m).real();
            }
            result.centroid[i] = centroid;
            result.rate[i] = base_rate * (1.0 - 2.0 * centroid);
        }
        return result;
    }

    // Exact mode: one accumulating pointer, overlap algebra per sample.
    BranchPointerState state = evolve_exact(graph, detector, 0.0, cfg.sigma);
    std::vector<std::vector<std::size_t>> branch_mirror_indices(state.branches.size());
    {
        const auto paths = enumerate_paths_to(graph, detector);
        for (std::size_t k = 0; k < paths.size(); ++k) {
            for (MirrorSymbol m : mirror_sequence(graph, paths[k])) {
                branch_mirror_indices[k].push_back(static_cast<std::size_t>(m));
            }
        }
    }

    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) * result.dt;
        std::array<double, kMirrorSymbolCount> g{};
        for (MirrorSymbol m : mirrors) {
            g[static_cast<std::size_t>(m)] =
                cfg.tilt * std::sin(kTwoPi * cfg.frequency.at(m) * t);
        }
        for (std::size_t k = 0; k < state.branches.size(); ++k) {
            state.branches[k].shift.fill(0.0);
            for (std::size_t idx : branch_mirror_indices[k]) {
                state.branches[k].shift[idx] = g[idx];
            }
        }
        try {
            const auto stats = accumulated_pointer_stats(state, cfg.sigma);
            result.centroid[i] = stats.mean;
            result.rate[i] = stats.normalization;
        } catch (const ZeroNormError&) {
            ++result.flagged_samples;  // isolated dark sample, zeroed
        }
    }
    return result;
}

SpectrumResult power_spectrum(std::span<const double> signal, double sample_rate,
                              const std::map<MirrorSymbol, double>& frequencies) {
    if (signal.size() < 16) {
        throw EmptySignalError("need at least 16 samples, got " +
                               std::to_string(signal.size()));
    }
    const std::size_t n = signal.size();
    const std::size_t padded = next_power_of_two(n);

    // Periodic Hann window, so bin-centered tones stay confined to three bins.
    std::vector<double> windowed(padded, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) /
                                               static_cast<double>(n)));
        windowed[i] = w * signal[i];
    }

    std::vector<std::complex<double>> transform(padded / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(
        static_cast<int>(padded), windowed.data(),
        reinterpret_cast<fftw_complex*>(transform.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    SpectrumResult result;
    result.bin_width = sample_rate / static_cast<double>(padded);
    const std::size_t n_bins = padded / 2 + 1;
    result.freqs.resize(n_bins);
    result.power.resize(n_bins);
    const double inv_n2 = 1.0 / (static_cast<double>(padded) * static_cast<double>(padded));
    for (std::size_t k = 0; k < n_bins; ++k) {
        result.freqs[k] = static_cast<double>(k) * result.bin_width;
        const double two_sided = std::norm(transform[k]) * inv_n2;
        const bool interior = k != 0 && (padded % 2 != 0 || k != padded / 2);
        result.power[k] = interior ? 2.0 * two_sided : two_sided;
    }

    for (const auto& [mirror, freq] : frequencies) {
        result.peak_power[mirror] = result.power[nearest_bin(freq, result.bin_width, n_bins)];
    }
    for (const auto& [mirror, freq] : frequencies) {
        double best = 0.0;
        for (const auto& [other, other_freq] : frequencies) {
            if (other == mirror) continue;
            for (double candidate : {freq + other_freq, std::abs(freq - other_freq)}) {
                if (candidate <= 0.0 || candidate >= sample_rate / 2.0) continue;
                best = std::max(best,
                                result.power[nearest_bin(candidate, result.bin_width, n_bins)]);
            }
        }
        result.signature_power[mirror] = best;
    }
    const auto e_it = frequencies.find(MirrorSymbol::E);
    const auto f_it = frequencies.find(MirrorSymbol::F);
    if (e_it != frequencies.end() && f_it != frequencies.end()) {
        const double sum_freq = e_it->second + f_it->second;
        if (sum_freq < sample_rate / 2.0) {
            result.sum_ef_power = result.power[nearest_bin(sum_freq, result.bin_width, n_bins)];
        }
    }
    return result;
}

SpectrumAnalysis analyze_spectrum(const InterferometerGraph& graph,
                                  const std::string& detector, const OscillationConfig& cfg) {
    SpectrumAnalysis analysis;
    analysis.signal = simulate_signal(graph, detector, cfg);

    std::map<MirrorSymbol, double> freqs;
    for (MirrorSymbol m : graph.mirrors_present()) {
        freqs[m] = cfg.frequency.at(m);
    }
    analysis.centroid_spectrum = power_spectrum(analysis.signal.centroid, cfg.sample_rate, freqs);
    analysis.rate_spectrum = power_spectrum(analysis.signal.rate, cfg.sample_rate, freqs);
    return analysis;
}

namespace {

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] <= 0.0) continue;  // empty bins carry no scaling information
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 2) return 0.0;
    const double denom = static_cast<double>(count) * sxx - sx * sx;
    return (static_cast<double>(count) * sxy - sx * sy) / denom;
}

}  // namespace

std::vector<PeakScalingRow> peak_scaling(const InterferometerGraph& graph,
                                         const std::string& detector, OscillationConfig cfg,
                                         std::span<const double> tilts) {
    if (cfg.mode != SignalMode::Exact) {
        throw InvalidOscillationConfigError("peak scaling needs exact mode");
    }
    if (tilts.size() < 4) {
        throw InvalidOscillationConfigError("need at least 4 tilt amplitudes");
    }
    for (std::size_t i = 0; i + 1 < tilts.size(); ++i) {
        if (tilts[i] <= tilts[i + 1]) {
            throw InvalidOscillationConfigError("tilt amplitudes must decrease");
        }
    }
    if (tilts.back() <= 0.0 || tilts.front() / tilts.back() < 10.0) {
        throw InvalidOscillationConfigError("tilt ladder must span at least a decade");
    }

    const auto mirrors = graph.mirrors_present();
    std::map<MirrorSymbol, std::vector<double>> fundamental;
    std::map<MirrorSymbol, std::vector<double>> signature;
    for (double tilt : tilts) {
        cfg.tilt = tilt;
        const auto analysis = analyze_spectrum(graph, detector, cfg);
        for (MirrorSymbol m : mirrors) {
            fundamental[m].push_back(analysis.centroid_spectrum.peak_power.at(m));
            signature[m].push_back(analysis.rate_spectrum.signature_power.at(m));
        }
    }

    // A mirror whose first-order trace is extinguished has essentially no
    // fundamental peak; its kicks only survive in second-order products.
    double strongest = 0.0;
    for (MirrorSymbol m : mirrors) {
        strongest = std::max(strongest, fundamental[m].front());
    }

    std::vector<PeakScalingRow> rows;
    const std::vector<double> x(tilts.begin(), tilts.end());
    for (MirrorSymbol m : mirrors) {
        PeakScalingRow row;
        row.mirror = m;
        row.fundamental_slope = fit_loglog_slope(x, fundamental[m]);
        row.signature_slope = fit_loglog_slope(x, signature[m]);
        row.used_signature = fundamental[m].front() < 1e-4 * strongest;
        row.slope = row.used_signature ? row.signature_slope : row.fundamental_slope;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nmzi
