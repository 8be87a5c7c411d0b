#ifndef NMZI_POINTER_HPP
#define NMZI_POINTER_HPP

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nmzi/graph.hpp"

namespace nmzi {

// Post-selection weights below this magnitude are treated as a perfectly
// dark port.
inline constexpr double kZeroNormThreshold = 1e-14;

// Couplings beyond this fraction of the pointer width leave the weak
// regime; callers may still go there, it is a soft limit only.
inline constexpr double kWeaknessLimit = 0.3;

struct GaussianPointer {
    double mean = 0.0;
    double sigma = 1.0;
    MirrorSymbol mirror = MirrorSymbol::A;
};

// One source->detector branch: bare path amplitude plus the rigid shift each
// mirror pointer acquired along it (g if the mirror lies on the path, 0
// otherwise).
struct PointerBranch {
    Complex amplitude;
    std::array<double, kMirrorSymbolCount> shift{};
};

// Exact product-Gaussian representation of the joint pointer state: a sum
// over the few path branches, each carrying one rigid shift per mirror. No
// order truncation anywhere.
struct BranchPointerState {
    std::vector<PointerBranch> branches;
    std::array<double, kMirrorSymbolCount> sigma{};
    std::array<bool, kMirrorSymbolCount> present{};
    std::string detector;
};

// Uniform coupling g on every mirror, shared width sigma.
BranchPointerState evolve_exact(const InterferometerGraph& graph, const std::string& detector,
                                double g, double sigma);
// Per-mirror couplings and widths.
BranchPointerState evolve_exact(const InterferometerGraph& graph, const std::string& detector,
                                const std::array<double, kMirrorSymbolCount>& couplings,
                                const std::array<double, kMirrorSymbolCount>& sigmas);

struct ConditionalPointerStats {
    std::map<MirrorSymbol, double> mean_shift;
    double normalization = 0.0;  // post-selection weight including pointer overlaps
};

// Post-selected means <X_n> from the exact Gaussian-overlap moments.
// ZeroNormError when the post-selection weight falls below 1e-14.
ConditionalPointerStats post_select_stats(const BranchPointerState& state);

// Same overlap algebra for a single pointer that accumulates every kick on
// one coordinate (a quad-cell reading): branch shift = sum over mirrors.
struct AccumulatedPointerStats {
    double mean = 0.0;
    double normalization = 0.0;
};
AccumulatedPointerStats accumulated_pointer_stats(const BranchPointerState& state,
                                                  double sigma);

struct ShiftTableRow {
    MirrorSymbol mirror;
    double g;
    double mean_shift;
    double first_order;  // g * Re (P_n)_w
    double residual;     // |mean_shift - first_order|
};

// Exact means against the first-order weak-value prediction for a ladder of
// couplings. The residual column is the data behind the O(g^2) contract.
std::vector<ShiftTableRow> shift_vs_weakvalue(const InterferometerGraph& graph,
                                              const std::string& detector,
                                              std::span<const double> g_values, double sigma);

// Mean momentum imparted per reflection by a coherent beam of mean photon
// number nbar at incidence angle theta_prime, in units of hbar (omega in
// rad/s): 2 * nbar * omega * cos(theta_prime).
double mirror_momentum_kick(double nbar, double omega, double theta_prime);

}  // namespace nmzi

#endif  // NMZI_POINTER_HPP
