#include "nmzi/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fftw3.h>

namespace nmzi {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr Complex kI{0.0, 1.0};

// Free kernel continued to complex spatial arguments (used on rotated
// integration contours).
Complex kernel_c(Complex x_from, double t_from, Complex x_to, double t_to) {
    const double dt = t_to - t_from;
    const Complex dx = x_to - x_from;
    return std::sqrt(1.0 / (2.0 * kPi * kI * dt)) * std::exp(kI * dx * dx / (2.0 * dt));
}

// integral exp(a z^2 + b z + c) dz over the real line, Re(a) < 0 required.
Complex gaussian_integral(Complex a, Complex b, Complex c) {
    return std::sqrt(-kPi / a) * std::exp(c - b * b / (4.0 * a));
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p_prime = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            p_prime = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / p_prime;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * p_prime * p_prime);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

// Adaptive Simpson on a complex-valued integrand.
struct AdaptiveSimpson {
    std::function<Complex(double)> f;
    double tol;
    int max_depth;

    Complex run(double lo, double hi) const {
        const Complex f_lo = f(lo), f_hi = f(hi), f_mid = f(0.5 * (lo + hi));
        const Complex whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
        return recurse(lo, hi, f_lo, f_mid, f_hi, whole, max_depth);
    }

    Complex recurse(double lo, double hi, Complex f_lo, Complex f_mid, Complex f_hi,
                    Complex whole, int depth) const {
        const double mid = 0.5 * (lo + hi);
        const Complex f_l = f(0.5 * (lo + mid));
        const Complex f_r = f(0.5 * (mid + hi));
        const Complex left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_l + f_mid);
        const Complex right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_r + f_hi);
        const Complex delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        if (depth <= 0) {
            throw QuadratureNonconvergenceError("adaptive quadrature exceeded its depth budget");
        }
        return recurse(lo, mid, f_lo, f_l, f_mid, left, depth - 1) +
               recurse(mid, hi, f_mid, f_r, f_hi, right, depth - 1);
    }
};

double potential_t_start(const PotentialSpec& p) {
    if (const auto* kick = std::get_if<LocalizedKick>(&p)) {
        return kick->time - 0.5 * kick->duration;
    }
    return std::get<GridPotential>(p).t_start;
}

double potential_t_end(const PotentialSpec& p) {
    if (const auto* kick = std::get_if<LocalizedKick>(&p)) {
        return kick->time + 0.5 * kick->duration;
    }
    return std::get<GridPotential>(p).t_end;
}

double potential_value(const PotentialSpec& p, double x) {
    if (const auto* kick = std::get_if<LocalizedKick>(&p)) {
        const double u = (x - kick->center) / kick->width;
        return kick->strength * std::exp(-0.5 * u * u);
    }
    const auto& grid = std::get<GridPotential>(p);
    if (grid.x.empty() || x <= grid.x.front() || x >= grid.x.back()) return 0.0;
    const auto it = std::upper_bound(grid.x.begin(), grid.x.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid.x.begin());
    const std::size_t lo = hi - 1;
    const double frac = (x - grid.x[lo]) / (grid.x[hi] - grid.x[lo]);
    return grid.v[lo] + frac * (grid.v[hi] - grid.v[lo]);
}

// Spatial half-width outside which the potential is negligible.
double potential_x_lo(const PotentialSpec& p) {
    if (const auto* kick = std::get_if<LocalizedKick>(&p)) {
        return kick->center - 10.0 * kick->width;
    }
    return std::get<GridPotential>(p).x.front();
}

double potential_x_hi(const PotentialSpec& p) {
    if (const auto* kick = std::get_if<LocalizedKick>(&p)) {
        return kick->center + 10.0 * kick->width;
    }
    return std::get<GridPotential>(p).x.back();
}

}  // namespace

Complex free_propagator(SpacetimePoint a, SpacetimePoint b) {
    if (!(b.t > a.t)) {
        throw NonPositiveTimeError("free propagator needs t_b > t_a");
    }
    return kernel_c(a.x, a.t, b.x, b.t);
}

Complex compose_free(SpacetimePoint a, SpacetimePoint b, double t_mid, int nodes) {
    if (!(a.t < t_mid && t_mid < b.t)) {
        throw NonPositiveTimeError("intermediate time must lie inside (t_a, t_b)");
    }
    const double dt1 = t_mid - a.t;
    const double dt2 = b.t - t_mid;
    // Stationary point of the combined quadratic phase: the classical
    // straight-line position at t_mid.
    const double alpha = 0.5 / dt1 + 0.5 / dt2;
    const double x0 = (a.x / dt1 + b.x / dt2) / (1.0 / dt1 + 1.0 / dt2);
    // Rotate the contour by pi/4 so the Fresnel factor becomes a real
    // Gaussian of scale 1/sqrt(alpha); integrate it by Gauss-Legendre.
    const double radius = 8.0 / std::sqrt(alpha);
    const Complex rotation = std::polar(1.0, kPi / 4.0);

    std::vector<double> gl_x, gl_w;
    gauss_legendre(nodes, gl_x, gl_w);

    Complex sum{0.0, 0.0};
    for (int i = 0; i < nodes; ++i) {
        const double u = radius * gl_x[i];
        const Complex x = x0 + rotation * u;
        sum += gl_w[i] * kernel_c(x, t_mid, b.x, b.t) * kernel_c(a.x, a.t, x, t_mid);
    }
    return sum * radius * rotation;
}

Complex scattering_chain(SpacetimePoint a, std::span<const ScatteringEvent> events,
                         SpacetimePoint b) {
    double t_prev = a.t;
    for (const auto& event : events) {
        if (!(event.point.t > t_prev) || !(event.point.t < b.t)) {
            throw UnorderedEventsError(
                "event times must increase strictly inside (t_a, t_b)");
        }
        t_prev = event.point.t;
    }

    Complex product{1.0, 0.0};
    SpacetimePoint from = a;
    for (const auto& event : events) {
        product *= free_propagator(from, event.point) * (-kI * event.strength);
        from = event.point;
    }
    return product * free_propagator(from, b);
}

Complex born_first_order(SpacetimePoint a, SpacetimePoint b, const PotentialSpec& potential) {
    const double t_lo = potential_t_start(potential);
    const double t_hi = potential_t_end(potential);
    if (!(t_lo > a.t) || !(t_hi < b.t) || !(t_hi > t_lo)) {
        throw Error("potential active window must lie strictly inside (t_a, t_b)");
    }
    const double x_lo = potential_x_lo(potential);
    const double x_hi = potential_x_hi(potential);

    auto spatial = [&](double t) {
        AdaptiveSimpson inner{
            [&](double x) {
                const double v = potential_value(potential, x);
                if (v == 0.0) return Complex{0.0, 0.0};
                return kernel_c(x, t, b.x, b.t) * v * kernel_c(a.x, a.t, x, t);
            },
            1e-12, 28};
        return inner.run(x_lo, x_hi);
    };

    AdaptiveSimpson outer{spatial, 1e-12, 20};
    return -kI * outer.run(t_lo, t_hi);
}

namespace {

Complex time_sliced_exact(SpacetimePoint a, SpacetimePoint b, int slices) {
    const double dt = (b.t - a.t) / slices;
    // Running kernel as exp(qa x^2 + qb x + qc) in the next intermediate
    // coordinate; each slice is integrated out in closed complex-Gaussian
    // form.
    Complex prefactor = std::sqrt(1.0 / (2.0 * kPi * kI * dt));
    Complex qa = kI / (2.0 * dt);
    Complex qb = -kI * a.x / dt;
    Complex qc = kI * a.x * a.x / (2.0 * dt);

    for (int j = 1; j < slices; ++j) {
        // Multiply by the next slice kernel exp(i (y - x)^2 / (2 dt)) and
        // integrate x out; the result is again Gaussian in y.
        const Complex k = kI / (2.0 * dt);
        const Complex a2 = qa + k;
        // exp(a2 x^2 + (qb - 2 k y) x + qc + k y^2) integrated over x:
        //   sqrt(-pi/a2) exp(qc + k y^2 - (qb - 2 k y)^2 / (4 a2))
        prefactor *= std::sqrt(1.0 / (2.0 * kPi * kI * dt)) * std::sqrt(-kPi / a2);
        const Complex new_qa = k - k * k / a2;
        const Complex new_qb = qb * k / a2;
        const Complex new_qc = qc - qb * qb / (4.0 * a2);
        qa = new_qa;
        qb = new_qb;
        qc = new_qc;
    }
    return prefactor * std::exp(qa * b.x * b.x + qb * b.x + qc);
}

Complex time_sliced_windowed(SpacetimePoint a, SpacetimePoint b, int slices) {
    const double dt = (b.t - a.t) / slices;
    const double total_t = b.t - a.t;

    // Hard window on every intermediate coordinate, centred between the
    // endpoints. It widens linearly with the slice count, so the truncated
    // Fresnel tail (the scheme's whole error) shrinks roughly like
    // (N-1)/N^2.
    const double base = 0.5 * std::abs(b.x - a.x) + 1.25 * std::max(1.0, std::sqrt(total_t));
    const double half_width = base * slices;
    const double center = 0.5 * (a.x + b.x);

    // Resolve the fastest kernel oscillation inside the window; the grid
    // spacing stays 8x below the aliasing threshold pi*dt/half_width.
    const double max_rate = 2.0 * half_width / dt;  // d(phase)/dx at the edge
    const double h = 2.0 * kPi / max_rate / 8.0;
    auto m = static_cast<std::size_t>(std::ceil(2.0 * half_width / h)) + 1;

    std::vector<Complex> psi(m);
    auto grid_x = [&](std::size_t i) {
        return center - half_width + (2.0 * half_width) * static_cast<double>(i) /
                                         static_cast<double>(m - 1);
    };
    const double step = 2.0 * half_width / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        psi[i] = kernel_c(a.x, a.t, grid_x(i), a.t + dt);
    }

    // Step kernel sampled on the window; convolution via zero-padded FFT.
    const std::size_t padded = [&] {
        std::size_t p = 1;
        while (p < 2 * m) p <<= 1;
        return p;
    }();
    std::vector<Complex> kernel_fft(padded, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < m; ++i) {
        // offsets -(m-1)..(m-1) stored circularly
        const double u = static_cast<double>(i) * step;
        const Complex value = kernel_c(0.0, 0.0, u, dt);
        kernel_fft[i] = value;
        if (i > 0) kernel_fft[padded - i] = value;
    }

    fftw_plan fwd = fftw_plan_dft_1d(static_cast<int>(padded),
                                     reinterpret_cast<fftw_complex*>(kernel_fft.data()),
                                     reinterpret_cast<fftw_complex*>(kernel_fft.data()),
                                     FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);

    std::vector<Complex> work(padded);
    for (int j = 1; j < slices - 1; ++j) {
        std::fill(work.begin(), work.end(), Complex{0.0, 0.0});
        std::copy(psi.begin(), psi.end(), work.begin());
        fftw_plan f = fftw_plan_dft_1d(static_cast<int>(padded),
                                       reinterpret_cast<fftw_complex*>(work.data()),
                                       reinterpret_cast<fftw_complex*>(work.data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(f);
        fftw_destroy_plan(f);
        for (std::size_t i = 0; i < padded; ++i) {
            work[i] *= kernel_fft[i] / static_cast<double>(padded);
        }
        fftw_plan inv = fftw_plan_dft_1d(static_cast<int>(padded),
                                         reinterpret_cast<fftw_complex*>(work.data()),
                                         reinterpret_cast<fftw_complex*>(work.data()),
                                         FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_execute(inv);
        fftw_destroy_plan(inv);
        for (std::size_t i = 0; i < m; ++i) {
            psi[i] = work[i] * step;
        }
    }

    // Last slice: single integral straight to the endpoint.
    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
        const double weight = (i == 0 || i == m - 1) ? 0.5 : 1.0;
        sum += weight * kernel_c(grid_x(i), b.t - dt, b.x, b.t) * psi[i];
    }
    return sum * step;
}

}  // namespace

Complex time_sliced_propagator(SpacetimePoint a, SpacetimePoint b, int slices,
                               SlicedQuadrature quadrature) {
    if (!(b.t > a.t)) {
        throw NonPositiveTimeError("time-sliced propagator needs t_b > t_a");
    }
    if (slices < 2) {
        throw Error("need at least 2 slices");
    }
    return quadrature == SlicedQuadrature::ExactGaussian
               ? time_sliced_exact(a, b, slices)
               : time_sliced_windowed(a, b, slices);
}

Complex free_packet_value(const GaussianPacket& packet, double x, double t) {
    const double w = packet.width;
    const Complex norm = std::pow(2.0 * kPi * w * w, -0.25);
    if (t == 0.0) {
        const double d = x - packet.center;
        return norm * std::exp(Complex{-d * d / (4.0 * w * w), packet.momentum * d});
    }
    // integral K(x,t; y,0) psi(y,0) dy in closed Gaussian form.
    const Complex a = kI / (2.0 * t) - 1.0 / (4.0 * w * w);
    const Complex b = -kI * x / t + kI * packet.momentum + packet.center / (2.0 * w * w);
    const Complex c = kI * x * x / (2.0 * t) - kI * packet.momentum * packet.center -
                      packet.center * packet.center / (4.0 * w * w);
    return norm * std::sqrt(1.0 / (2.0 * kPi * kI * t)) * gaussian_integral(a, b, c);
}

Complex born_packet_value(const GaussianPacket& packet, const LocalizedKick& kick,
                          double x, double t) {
    const double t_lo = kick.time - 0.5 * kick.duration;
    const double t_hi = kick.time + 0.5 * kick.duration;
    if (!(t_lo > 0.0) || !(t_hi < t)) {
        throw Error("kick window must lie strictly inside (0, t)");
    }

    auto spatial = [&](double t_c) {
        AdaptiveSimpson inner{
            [&](double x_c) {
                const double u = (x_c - kick.center) / kick.width;
                const double v = kick.strength * std::exp(-0.5 * u * u);
                return kernel_c(x_c, t_c, x, t) * v * free_packet_value(packet, x_c, t_c);
            },
            1e-13, 28};
        return inner.run(kick.center - 10.0 * kick.width, kick.center + 10.0 * kick.width);
    };
    AdaptiveSimpson outer{spatial, 1e-13, 20};
    return free_packet_value(packet, x, t) - kI * outer.run(t_lo, t_hi);
}

double GridWavefunction::norm() const {
    double total = 0.0;
    for (const auto& value : psi) {
        total += std::norm(value);
    }
    return std::sqrt(total * dx);
}

Complex GridWavefunction::value_at(double pos) const {
    if (x.empty() || pos < x.front() || pos > x.back()) return {0.0, 0.0};
    const double frac = (pos - x.front()) / dx;
    const auto lo = static_cast<std::size_t>(frac);
    if (lo + 1 >= x.size()) return psi.back();
    const double w = frac - static_cast<double>(lo);
    return psi[lo] * (1.0 - w) + psi[lo + 1] * w;
}

GridWavefunction schrodinger_oracle(const GaussianPacket& initial,
                                    const std::optional<PotentialSpec>& potential,
                                    double t_final, int grid_points, double half_span,
                                    int min_steps) {
    if (t_final <= 0.0) {
        throw NonPositiveTimeError("final time must be positive");
    }
    const auto m = static_cast<std::size_t>(grid_points);
    const double dx = 2.0 * half_span / static_cast<double>(m);
    if (initial.width / dx < 16.0) {
        throw GridResolutionError("fewer than 16 grid points per packet width");
    }
    const double k_nyquist = kPi / dx;
    if (std::abs(initial.momentum) + 8.0 / initial.width > k_nyquist) {
        throw GridResolutionError("grid does not resolve the packet's momentum content");
    }

    GridWavefunction wave;
    wave.dx = dx;
    wave.x.resize(m);
    wave.psi.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        wave.x[i] = -half_span + dx * static_cast<double>(i);
        wave.psi[i] = free_packet_value(initial, wave.x[i], 0.0);
    }

    std::vector<double> k(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double idx = i < m / 2 ? static_cast<double>(i)
                                     : static_cast<double>(i) - static_cast<double>(m);
        k[i] = 2.0 * kPi * idx / (2.0 * half_span);
    }

    fftw_plan fwd = fftw_plan_dft_1d(static_cast<int>(m),
                                     reinterpret_cast<fftw_complex*>(wave.psi.data()),
                                     reinterpret_cast<fftw_complex*>(wave.psi.data()),
                                     FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_1d(static_cast<int>(m),
                                     reinterpret_cast<fftw_complex*>(wave.psi.data()),
                                     reinterpret_cast<fftw_complex*>(wave.psi.data()),
                                     FFTW_BACKWARD, FFTW_ESTIMATE);

    auto free_step = [&](double dt) {
        if (dt <= 0.0) return;
        fftw_execute(fwd);
        for (std::size_t i = 0; i < m; ++i) {
            wave.psi[i] *= std::exp(-kI * 0.5 * k[i] * k[i] * dt) /
                           static_cast<double>(m);
        }
        fftw_execute(bwd);
    };

    if (!potential) {
        const double dt = t_final / static_cast<double>(std::max(1, min_steps));
        for (int s = 0; s < std::max(1, min_steps); ++s) free_step(dt);
    } else {
        const double t_on = std::max(0.0, potential_t_start(*potential));
        const double t_off = std::min(t_final, potential_t_end(*potential));
        free_step(t_on);
        if (t_off > t_on) {
            const int steps = std::max({min_steps, 128,
                                        static_cast<int>(std::ceil((t_off - t_on) / 1e-3))});
            const double dt = (t_off - t_on) / steps;
            for (int s = 0; s < steps; ++s) {
                free_step(0.5 * dt);
                for (std::size_t i = 0; i < m; ++i) {
                    wave.psi[i] *= std::exp(-kI * potential_value(*potential, wave.x[i]) * dt);
                }
                free_step(0.5 * dt);
            }
        }
        free_step(t_final - std::max(t_on, t_off));
    }

    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    return wave;
}

}  // namespace nmzi
