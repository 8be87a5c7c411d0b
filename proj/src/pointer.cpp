#include "nmzi/pointer.hpp"

#include <cmath>

#include "nmzi/tsvf.hpp"

namespace nmzi {

namespace {

// <G(x - a) | G(x - b)> for unit-normalized Gaussians of common width sigma.
double gaussian_overlap(double a, double b, double sigma) {
    const double d = a - b;
    return std::exp(-d * d / (4.0 * sigma * sigma));
}

double branch_pair_overlap(const BranchPointerState& state, std::size_t k, std::size_t l) {
    double overlap = 1.0;
    for (std::size_t n = 0; n < kMirrorSymbolCount; ++n) {
        if (!state.present[n]) continue;
        overlap *= gaussian_overlap(state.branches[k].shift[n], state.branches[l].shift[n],
                                    state.sigma[n]);
    }
    return overlap;
}

}  // namespace

BranchPointerState evolve_exact(const InterferometerGraph& graph, const std::string& detector,
                                double g, double sigma) {
    std::array<double, kMirrorSymbolCount> couplings{};
    std::array<double, kMirrorSymbolCount> sigmas{};
    couplings.fill(g);
    sigmas.fill(sigma);
    return evolve_exact(graph, detector, couplings, sigmas);
}

BranchPointerState evolve_exact(const InterferometerGraph& graph, const std::string& detector,
                                const std::array<double, kMirrorSymbolCount>& couplings,
                                const std::array<double, kMirrorSymbolCount>& sigmas) {
    BranchPointerState state;
    state.detector = detector;
    state.sigma = sigmas;
    for (MirrorSymbol m : graph.mirrors_present()) {
        state.present[static_cast<std::size_t>(m)] = true;
        if (sigmas[static_cast<std::size_t>(m)] <= 0.0) {
            throw InvalidElementError("pointer width must be positive");
        }
    }

    for (const auto& path : enumerate_paths_to(graph, detector)) {
        PointerBranch branch;
        branch.amplitude = path_amplitude(graph, path);
        for (MirrorSymbol m : mirror_sequence(graph, path)) {
            branch.shift[static_cast<std::size_t>(m)] = couplings[static_cast<std::size_t>(m)];
        }
        state.branches.push_back(std::move(branch));
    }
    return state;
}

ConditionalPointerStats post_select_stats(const BranchPointerState& state) {
    const std::size_t n_branches = state.branches.size();
    if (n_branches == 0) {
        throw ZeroNormError("no path reaches detector '" + state.detector + "'");
    }

    double norm = 0.0;
    std::array<double, kMirrorSymbolCount> moment{};
    for (std::size_t k = 0; k < n_branches; ++k) {
        for (std::size_t l = 0; l < n_branches; ++l) {
            const Complex cc = state.branches[k].amplitude * std::conj(state.branches[l].amplitude);
            const double weight = cc.real() * branch_pair_overlap(state, k, l);
            norm += weight;
            for (std::size_t n = 0; n < kMirrorSymbolCount; ++n) {
                if (!state.present[n]) continue;
                moment[n] += weight *
                             0.5 * (state.branches[k].shift[n] + state.branches[l].shift[n]);
            }
        }
    }
    if (std::abs(norm) < kZeroNormThreshold) {
        throw ZeroNormError("post-selection weight vanishes (dark port with "
                            "indistinguishable pointers)");
    }

    ConditionalPointerStats stats;
    stats.normalization = norm;
    for (std::size_t n = 0; n < kMirrorSymbolCount; ++n) {
        if (state.present[n]) {
            stats.mean_shift[kAllMirrorSymbols[n]] = moment[n] / norm;
        }
    }
    return stats;
}

AccumulatedPointerStats accumulated_pointer_stats(const BranchPointerState& state,
                                                  double sigma) {
    const std::size_t n_branches = state.branches.size();
    if (n_branches == 0) {
        throw ZeroNormError("no path reaches detector '" + state.detector + "'");
    }
    std::vector<double> total_shift(n_branches, 0.0);
    for (std::size_t k = 0; k < n_branches; ++k) {
        for (std::size_t n = 0; n < kMirrorSymbolCount; ++n) {
            total_shift[k] += state.branches[k].shift[n];
        }
    }

    double norm = 0.0;
    double moment = 0.0;
    for (std::size_t k = 0; k < n_branches; ++k) {
        for (std::size_t l = 0; l < n_branches; ++l) {
            const Complex cc = state.branches[k].amplitude * std::conj(state.branches[l].amplitude);
            const double weight = cc.real() * gaussian_overlap(total_shift[k], total_shift[l], sigma);
            norm += weight;
            moment += weight * 0.5 * (total_shift[k] + total_shift[l]);
        }
    }
    if (std::abs(norm) < kZeroNormThreshold) {
        throw ZeroNormError("post-selection weight vanishes (dark port with "
                            "indistinguishable pointers)");
    }
    return {moment / norm, norm};
}

std::vector<ShiftTableRow> shift_vs_weakvalue(const InterferometerGraph& graph,
                                              const std::string& detector,
                                              std::span<const double> g_values, double sigma) {
    if (sigma <= 0.0) {
        throw InvalidElementError("pointer width must be positive");
    }
    const WeakValueResult wv = weak_values(graph, detector);

    std::vector<ShiftTableRow> table;
    for (double g : g_values) {
        if (g <= 0.0) {
            throw InvalidElementError("couplings must be positive");
        }
        const auto stats = post_select_stats(evolve_exact(graph, detector, g, sigma));
        for (const auto& [mirror, mean] : stats.mean_shift) {
            const double prediction = g * wv.per_mirror.at(mirror).real();
            table.push_back({mirror, g, mean, prediction, std::abs(mean - prediction)});
        }
    }
    return table;
}

double mirror_momentum_kick(double nbar, double omega, double theta_prime) {
    if (nbar < 0.0) {
        throw NegativePhotonNumberError("mean photon number must be >= 0");
    }
    return 2.0 * nbar * omega * std::cos(theta_prime);
}

}  // namespace nmzi
