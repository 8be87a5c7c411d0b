#ifndef NMZI_PROPAGATOR_HPP
#define NMZI_PROPAGATOR_HPP

#include <complex>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "nmzi/errors.hpp"

namespace nmzi {

using Complex = std::complex<double>;

// Natural units hbar = m = 1 throughout.
struct SpacetimePoint {
    double x = 0.0;
    double t = 0.0;
};

// sqrt(1/(2 pi i dt)) * exp(i dx^2 / (2 dt)). Undefined at dt = 0 by
// contract (delta-function limit); NonPositiveTimeError for dt <= 0.
Complex free_propagator(SpacetimePoint a, SpacetimePoint b);

// Semigroup composition integral(K(b,c) K(c,a) dx_c) at intermediate time
// t_mid, evaluated by Gauss-Legendre quadrature on the analytically
// completed (contour-rotated) Gaussian form. Converges to free_propagator.
Complex compose_free(SpacetimePoint a, SpacetimePoint b, double t_mid, int nodes = 96);

struct ScatteringEvent {
    SpacetimePoint point;
    double strength = 0.0;
};

// K(b,c_n) [-i V_n] K(c_n,c_{n-1}) ... [-i V_1] K(c_1,a). Event times must
// increase strictly inside (t_a, t_b); UnorderedEventsError otherwise.
Complex scattering_chain(SpacetimePoint a, std::span<const ScatteringEvent> events,
                         SpacetimePoint b);

// Gaussian envelope of width w at x_c, switched on for `duration` centred on
// `time`, peak strength V0.
struct LocalizedKick {
    double center = 0.0;
    double time = 0.0;
    double strength = 0.0;   // V0
    double width = 1.0;      // w > 0
    double duration = 0.1;   // active time window
};

// Tabulated potential, linearly interpolated, active on [t_start, t_end].
struct GridPotential {
    std::vector<double> x;
    std::vector<double> v;
    double t_start = 0.0;
    double t_end = 0.0;
};

using PotentialSpec = std::variant<LocalizedKick, GridPotential>;

// First Born term -i integral dt'' dx_c K(b,c) V(c) K(c,a) over the active
// window, by nested adaptive quadrature. Linear in the potential strength.
// QuadratureNonconvergenceError when refinement exceeds its depth budget.
Complex born_first_order(SpacetimePoint a, SpacetimePoint b, const PotentialSpec& potential);

enum class SlicedQuadrature {
    // Repeated grid convolution with a hard spatial window that widens with
    // the slice count; the leaked Fresnel tail shrinks as N grows, so the
    // result converges to the exact kernel from genuinely truncated path
    // sums.
    Windowed,
    // Exact complex-Gaussian integration of each intermediate coordinate;
    // reproduces the kernel to rounding for every N.
    ExactGaussian,
};

// N-slice discretization of the free path integral. Free case only.
Complex time_sliced_propagator(SpacetimePoint a, SpacetimePoint b, int slices,
                               SlicedQuadrature quadrature = SlicedQuadrature::Windowed);

// psi(x) = (2 pi w^2)^(-1/4) exp(-(x-c)^2/(4 w^2) + i k (x-c)); w is the
// position standard deviation.
struct GaussianPacket {
    double center = 0.0;
    double width = 1.0;
    double momentum = 0.0;
};

// Closed-form free evolution of the packet (spreading Gaussian).
Complex free_packet_value(const GaussianPacket& packet, double x, double t);

// (K0 + K1) applied to the packet, evaluated at (x, t) by quadrature.
Complex born_packet_value(const GaussianPacket& packet, const LocalizedKick& kick,
                          double x, double t);

struct GridWavefunction {
    std::vector<double> x;
    std::vector<Complex> psi;
    double dx = 0.0;

    double norm() const;               // sqrt(integral |psi|^2 dx)
    Complex value_at(double x) const;  // linear interpolation
};

// Split-step Fourier evolution of the packet under the optional potential.
// The grid must resolve the packet (>= 16 points per width) and its momentum
// content; GridResolutionError otherwise. Norm is conserved to rounding.
GridWavefunction schrodinger_oracle(const GaussianPacket& initial,
                                    const std::optional<PotentialSpec>& potential,
                                    double t_final, int grid_points = 4096,
                                    double half_span = 40.0, int min_steps = 1);

}  // namespace nmzi

#endif  // NMZI_PROPAGATOR_HPP
