#ifndef NMZI_TEXTIO_HPP
#define NMZI_TEXTIO_HPP

#include <complex>
#include <cstdio>
#include <string>

namespace nmzi {

// All floating-point text output goes through these helpers: 17 significant
// digits, locale-independent, so golden files are byte-stable.
inline std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

inline std::string format_complex(std::complex<double> value) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", value.real(), value.imag());
    return buf;
}

}  // namespace nmzi

#endif  // NMZI_TEXTIO_HPP
