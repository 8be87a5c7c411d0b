#ifndef NMZI_EPSILON_HPP
#define NMZI_EPSILON_HPP

#include <array>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nmzi/graph.hpp"

namespace nmzi {

// Monomial in the five interaction symbols, canonical key order A,B,C,E,F.
struct EpsilonMonomial {
    std::array<std::uint8_t, kMirrorSymbolCount> exponents{};

    static EpsilonMonomial one() { return {}; }
    static EpsilonMonomial single(MirrorSymbol m);
    static EpsilonMonomial of(std::initializer_list<MirrorSymbol> symbols);

    int degree() const;
    bool operator==(const EpsilonMonomial&) const = default;
    // Graded lexicographic: by total degree, then by exponent tuple.
    bool operator<(const EpsilonMonomial& other) const;

    std::string to_string() const;  // e.g. "eps_A*eps_E^2", "1" for the unit
};

EpsilonMonomial operator*(const EpsilonMonomial& a, const EpsilonMonomial& b);

// Complex-coefficient polynomial in eps_A..eps_F, truncated at a fixed total
// degree. Terms above the truncation order are dropped by every operation;
// coefficients that come out exactly zero are pruned.
class EpsilonPolynomial {
public:
    static constexpr int kDefaultOrder = 3;

    explicit EpsilonPolynomial(int truncation_order = kDefaultOrder);
    static EpsilonPolynomial constant(Complex value, int truncation_order = kDefaultOrder);

    int truncation_order() const { return order_; }
    const std::map<EpsilonMonomial, Complex>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    Complex coefficient(const EpsilonMonomial& monomial) const;
    Complex coefficient(std::initializer_list<MirrorSymbol> symbols) const;

    void set_coefficient(const EpsilonMonomial& monomial, Complex value);

    EpsilonPolynomial& operator+=(const EpsilonPolynomial& other);  // OrderMismatchError
    EpsilonPolynomial& operator-=(const EpsilonPolynomial& other);
    EpsilonPolynomial& operator*=(Complex scale);
    friend EpsilonPolynomial operator+(EpsilonPolynomial a, const EpsilonPolynomial& b);
    friend EpsilonPolynomial operator-(EpsilonPolynomial a, const EpsilonPolynomial& b);
    friend EpsilonPolynomial operator*(const EpsilonPolynomial& a, const EpsilonPolynomial& b);
    friend EpsilonPolynomial operator*(Complex scale, EpsilonPolynomial p);

    // Drops terms with |coefficient| <= tol (numeric cousin of the exact-zero
    // pruning that runs after every arithmetic step).
    void prune(double tol = 1e-14);

    // Canonical printout: graded-lexicographically sorted monomials, 17
    // significant digits, stable for golden files.
    std::string to_string() const;
    std::string to_json() const;

private:
    void add_term(const EpsilonMonomial& monomial, Complex value);

    int order_;
    std::map<EpsilonMonomial, Complex> terms_;
};

// Mirror symbol together with the orientation its kick enters a path product
// with. Orientation -1 flips the sign of the interaction term (the factor
// becomes 1 + eps); it encodes the kick-orientation reversal a pi phase
// between two shared interaction regions induces on the interfering partner
// path.
struct SignedMirror {
    MirrorSymbol symbol;
    int orientation = +1;
};

// amplitude * prod_n (1 - eps_n) truncated at `order`.
EpsilonPolynomial expand_path(Complex amplitude, std::span<const MirrorSymbol> mirrors,
                              int order);
EpsilonPolynomial expand_path(Complex amplitude, std::span<const SignedMirror> mirrors,
                              int order);

// Termwise sum; all inputs must share one truncation order.
EpsilonPolynomial sum_paths(std::span<const EpsilonPolynomial> polys);

// Polynomial holding only the degree-k terms. OrderOutOfRangeError if k is
// outside [0, truncation order].
EpsilonPolynomial extract_order(const EpsilonPolynomial& poly, int k);

// Numeric value of the truncated polynomial. MissingAssignmentError when a
// symbol occurring with nonzero exponent has no assignment.
Complex evaluate(const EpsilonPolynomial& poly,
                 const std::map<MirrorSymbol, Complex>& assignment);

// ---- graph bridge -----------------------------------------------------------

// How the per-path amplitudes enter a detector expansion.
enum class ExpansionAmplitudes {
    Unit,        // every path amplitude replaced by 1, orientations +1
    Physical,    // amplitudes from path_amplitude, orientations +1
    DarkSigned,  // unit magnitudes; mirrors shared with an anti-aligned
                 // interfering partner enter with orientation -1
};

struct PathExpansionTerm {
    Complex amplitude;
    std::vector<SignedMirror> mirrors;
};

// One term per simple path to `detector`, lexicographic path order.
std::vector<PathExpansionTerm> expansion_terms(const InterferometerGraph& graph,
                                               const std::string& detector,
                                               ExpansionAmplitudes mode);

// Sum of the expanded path products for all paths to `detector`.
EpsilonPolynomial detector_expansion(const InterferometerGraph& graph,
                                     const std::string& detector, int order,
                                     ExpansionAmplitudes mode);

}  // namespace nmzi

#endif  // NMZI_EPSILON_HPP
