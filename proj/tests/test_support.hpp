#ifndef NMZI_TEST_SUPPORT_HPP
#define NMZI_TEST_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "nmzi/graph.hpp"

namespace nmzi::test {

inline bool complex_close(Complex a, Complex b, double tol = 1e-12) {
    return std::abs(a - b) <= tol;
}

// Ordinary least squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Nested network with randomized splitter amplitudes and mirror phases;
// exercises the generic (non-dark) regime.
inline InterferometerGraph random_nested_mzi(std::mt19937_64& rng,
                                             bool with_spare_ports = false) {
    std::uniform_real_distribution<double> split(0.2, 0.95);
    std::uniform_real_distribution<double> phase(-3.0, 3.0);
    const InterferometerGraph base =
        build_nested_mzi(phase(rng), split(rng), split(rng), with_spare_ports);

    InterferometerGraph g;
    for (Element e : base.elements()) {
        if (e.kind == ElementKind::Mirror) {
            e.phase += phase(rng);
        } else if (e.kind == ElementKind::BeamSplitter) {
            e.transmissivity = split(rng);
        }
        g.add_element(e);
    }
    for (const auto& [from, to] : base.edges()) {
        g.add_edge(from, to);
    }
    g.validate();
    return g;
}

}  // namespace nmzi::test

#endif  // NMZI_TEST_SUPPORT_HPP
