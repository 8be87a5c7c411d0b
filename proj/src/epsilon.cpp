#include "nmzi/epsilon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nmzi/textio.hpp"

namespace nmzi {

EpsilonMonomial EpsilonMonomial::single(MirrorSymbol m) {
    EpsilonMonomial mono;
    mono.exponents[static_cast<std::size_t>(m)] = 1;
    return mono;
}

EpsilonMonomial EpsilonMonomial::of(std::initializer_list<MirrorSymbol> symbols) {
    EpsilonMonomial mono;
    for (MirrorSymbol m : symbols) {
        ++mono.exponents[static_cast<std::size_t>(m)];
    }
    return mono;
}

int EpsilonMonomial::degree() const {
    int d = 0;
    for (auto e : exponents) d += e;
    return d;
}

bool EpsilonMonomial::operator<(const EpsilonMonomial& other) const {
    const int da = degree();
    const int db = other.degree();
    if (da != db) return da < db;
    // Within a degree, higher exponents on earlier symbols come first, so the
    // printout runs eps_A*eps_E, eps_A*eps_F, eps_B*eps_E, ...
    return exponents > other.exponents;
}

std::string EpsilonMonomial::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < kMirrorSymbolCount; ++i) {
        if (exponents[i] == 0) continue;
        if (!out.empty()) out += "*";
        out += "eps_";
        out += to_char(kAllMirrorSymbols[i]);
        if (exponents[i] > 1) {
            out += "^" + std::to_string(exponents[i]);
        }
    }
    return out.empty() ? "1" : out;
}

EpsilonMonomial operator*(const EpsilonMonomial& a, const EpsilonMonomial& b) {
    EpsilonMonomial mono;
    for (std::size_t i = 0; i < kMirrorSymbolCount; ++i) {
        mono.exponents[i] = static_cast<std::uint8_t>(a.exponents[i] + b.exponents[i]);
    }
    return mono;
}

EpsilonPolynomial::EpsilonPolynomial(int truncation_order) : order_(truncation_order) {
    if (truncation_order < 0) {
        throw OrderOutOfRangeError("truncation order must be >= 0");
    }
}

EpsilonPolynomial EpsilonPolynomial::constant(Complex value, int truncation_order) {
    EpsilonPolynomial p(truncation_order);
    p.add_term(EpsilonMonomial::one(), value);
    return p;
}

Complex EpsilonPolynomial::coefficient(const EpsilonMonomial& monomial) const {
    auto it = terms_.find(monomial);
    return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
}

Complex EpsilonPolynomial::coefficient(std::initializer_list<MirrorSymbol> symbols) const {
    return coefficient(EpsilonMonomial::of(symbols));
}

void EpsilonPolynomial::set_coefficient(const EpsilonMonomial& monomial, Complex value) {
    if (monomial.degree() > order_) {
        throw OrderOutOfRangeError("monomial degree " + std::to_string(monomial.degree()) +
                                   " exceeds truncation order " + std::to_string(order_));
    }
    if (value == Complex{0.0, 0.0}) {
        terms_.erase(monomial);
    } else {
        terms_[monomial] = value;
    }
}

void EpsilonPolynomial::add_term(const EpsilonMonomial& monomial, Complex value) {
    if (monomial.degree() > order_) return;  // truncation
    auto [it, inserted] = terms_.emplace(monomial, value);
    if (!inserted) {
        it->second += value;
    }
    if (it->second == Complex{0.0, 0.0}) {
        terms_.erase(it);  // exact-zero pruning
    }
}

EpsilonPolynomial& EpsilonPolynomial::operator+=(const EpsilonPolynomial& other) {
    if (other.order_ != order_) {
        throw OrderMismatchError("truncation orders differ: " + std::to_string(order_) +
                                 " vs " + std::to_string(other.order_));
    }
    for (const auto& [mono, coeff] : other.terms_) {
        add_term(mono, coeff);
    }
    return *this;
}

EpsilonPolynomial& EpsilonPolynomial::operator-=(const EpsilonPolynomial& other) {
    if (other.order_ != order_) {
        throw OrderMismatchError("truncation orders differ: " + std::to_string(order_) +
                                 " vs " + std::to_string(other.order_));
    }
    for (const auto& [mono, coeff] : other.terms_) {
        add_term(mono, -coeff);
    }
    return *this;
}

EpsilonPolynomial& EpsilonPolynomial::operator*=(Complex scale) {
    if (scale == Complex{0.0, 0.0}) {
        terms_.clear();
        return *this;
    }
    for (auto& [mono, coeff] : terms_) {
        coeff *= scale;
    }
    return *this;
}

EpsilonPolynomial operator+(EpsilonPolynomial a, const EpsilonPolynomial& b) {
    a += b;
    return a;
}

EpsilonPolynomial operator-(EpsilonPolynomial a, const EpsilonPolynomial& b) {
    a -= b;
    return a;
}

EpsilonPolynomial operator*(const EpsilonPolynomial& a, const EpsilonPolynomial& b) {
    if (a.order_ != b.order_) {
        throw OrderMismatchError("truncation orders differ: " + std::to_string(a.order_) +
                                 " vs " + std::to_string(b.order_));
    }
    EpsilonPolynomial product(a.order_);
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            product.add_term(ma * mb, ca * cb);
        }
    }
    return product;
}

EpsilonPolynomial operator*(Complex scale, EpsilonPolynomial p) {
    p *= scale;
    return p;
}

void EpsilonPolynomial::prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= tol) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
}

std::string EpsilonPolynomial::to_string() const {
    if (terms_.empty()) return "0";

    std::string out;
    for (const auto& [mono, coeff] : terms_) {
        const bool is_unit_mono = mono.degree() == 0;
        const bool first = out.empty();
        if (coeff.imag() == 0.0) {
            double re = coeff.real();
            const bool negative = std::signbit(re) && re != 0.0;
            const double mag = negative ? -re : re;
            if (first) {
                out += negative ? "-" : "";
            } else {
                out += negative ? " - " : " + ";
            }
            if (is_unit_mono) {
                out += format_double(mag);
            } else if (mag == 1.0) {
                out += mono.to_string();
            } else {
                out += format_double(mag) + "*" + mono.to_string();
            }
        } else {
            if (!first) out += " + ";
            out += "(" + format_complex(coeff) + ")";
            if (!is_unit_mono) {
                out += "*" + mono.to_string();
            }
        }
    }
    return out;
}

std::string EpsilonPolynomial::to_json() const {
    nlohmann::ordered_json j;
    j["truncation_order"] = order_;
    j["terms"] = nlohmann::ordered_json::array();
    for (const auto& [mono, coeff] : terms_) {
        nlohmann::ordered_json term;
        term["monomial"] = mono.to_string();
        term["re"] = coeff.real();
        term["im"] = coeff.imag();
        j["terms"].push_back(std::move(term));
    }
    return j.dump(2);
}

EpsilonPolynomial expand_path(Complex amplitude, std::span<const MirrorSymbol> mirrors,
                              int order) {
    std::vector<SignedMirror> signed_mirrors;
    signed_mirrors.reserve(mirrors.size());
    for (MirrorSymbol m : mirrors) {
        signed_mirrors.push_back({m, +1});
    }
    return expand_path(amplitude, std::span<const SignedMirror>(signed_mirrors), order);
}

EpsilonPolynomial expand_path(Complex amplitude, std::span<const SignedMirror> mirrors,
                              int order) {
    EpsilonPolynomial poly = EpsilonPolynomial::constant(amplitude, order);
    for (const SignedMirror& sm : mirrors) {
        EpsilonPolynomial factor = EpsilonPolynomial::constant({1.0, 0.0}, order);
        factor.set_coefficient(EpsilonMonomial::single(sm.symbol),
                               Complex{-static_cast<double>(sm.orientation), 0.0});
        poly = poly * factor;
    }
    return poly;
}

EpsilonPolynomial sum_paths(std::span<const EpsilonPolynomial> polys) {
    if (polys.empty()) {
        return EpsilonPolynomial{};
    }
    EpsilonPolynomial total(polys.front().truncation_order());
    for (const auto& p : polys) {
        total += p;
    }
    return total;
}

EpsilonPolynomial extract_order(const EpsilonPolynomial& poly, int k) {
    if (k < 0 || k > poly.truncation_order()) {
        throw OrderOutOfRangeError("order " + std::to_string(k) + " outside [0, " +
                                   std::to_string(poly.truncation_order()) + "]");
    }
    EpsilonPolynomial result(poly.truncation_order());
    for (const auto& [mono, coeff] : poly.terms()) {
        if (mono.degree() == k) {
            result.set_coefficient(mono, coeff);
        }
    }
    return result;
}

Complex evaluate(const EpsilonPolynomial& poly,
                 const std::map<MirrorSymbol, Complex>& assignment) {
    Complex total{0.0, 0.0};
    for (const auto& [mono, coeff] : poly.terms()) {
        Complex term = coeff;
        for (std::size_t i = 0; i < kMirrorSymbolCount; ++i) {
            const int exponent = mono.exponents[i];
            if (exponent == 0) continue;
            auto it = assignment.find(kAllMirrorSymbols[i]);
            if (it == assignment.end()) {
                throw MissingAssignmentError("no value assigned to eps_" +
                                             to_string(kAllMirrorSymbols[i]));
            }
            for (int p = 0; p < exponent; ++p) {
                term *= it->second;
            }
        }
        total += term;
    }
    return total;
}

std::vector<PathExpansionTerm> expansion_terms(const InterferometerGraph& graph,
                                               const std::string& detector,
                                               ExpansionAmplitudes mode) {
    const auto paths = enumerate_paths_to(graph, detector);
    std::vector<PathExpansionTerm> terms(paths.size());
    std::vector<Complex> amplitudes(paths.size());
    for (std::size_t k = 0; k < paths.size(); ++k) {
        amplitudes[k] = path_amplitude(graph, paths[k]);
        for (MirrorSymbol m : mirror_sequence(graph, paths[k])) {
            terms[k].mirrors.push_back({m, +1});
        }
    }

    switch (mode) {
        case ExpansionAmplitudes::Unit:
            for (auto& t : terms) t.amplitude = {1.0, 0.0};
            break;
        case ExpansionAmplitudes::Physical:
            for (std::size_t k = 0; k < paths.size(); ++k) {
                terms[k].amplitude = amplitudes[k];
            }
            break;
        case ExpansionAmplitudes::DarkSigned: {
            // Unit-magnitude bookkeeping. When two paths share interaction
            // regions and their amplitudes cancel exactly, the pi relative
            // phase reverses the orientation with which the shared kicks
            // enter the later path's product.
            for (std::size_t k = 0; k < paths.size(); ++k) {
                terms[k].amplitude = {std::abs(amplitudes[k]), 0.0};
            }
            for (std::size_t k = 0; k < paths.size(); ++k) {
                for (std::size_t l = k + 1; l < paths.size(); ++l) {
                    const double scale = std::abs(amplitudes[k]) + std::abs(amplitudes[l]);
                    if (scale == 0.0 ||
                        std::abs(amplitudes[k] + amplitudes[l]) > 1e-12 * scale) {
                        continue;  // not an exactly cancelling pair
                    }
                    for (auto& sm : terms[l].mirrors) {
                        const bool shared = std::any_of(
                            terms[k].mirrors.begin(), terms[k].mirrors.end(),
                            [&](const SignedMirror& other) { return other.symbol == sm.symbol; });
                        if (shared) {
                            sm.orientation = -sm.orientation;
                        }
                    }
                }
            }
            break;
        }
    }
    return terms;
}

EpsilonPolynomial detector_expansion(const InterferometerGraph& graph,
                                     const std::string& detector, int order,
                                     ExpansionAmplitudes mode) {
    const auto terms = expansion_terms(graph, detector, mode);
    EpsilonPolynomial total(order);
    for (const auto& term : terms) {
        total += expand_path(term.amplitude, std::span<const SignedMirror>(term.mirrors), order);
    }
    return total;
}

}  // namespace nmzi
