#ifndef NMZI_GRAPH_HPP
#define NMZI_GRAPH_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmzi/errors.hpp"

namespace nmzi {

using Complex = std::complex<double>;

// The five mirror coupling symbols of a nested interferometer.
enum class MirrorSymbol : std::uint8_t { A = 0, B = 1, C = 2, E = 3, F = 4 };

inline constexpr std::size_t kMirrorSymbolCount = 5;
inline constexpr std::array<MirrorSymbol, kMirrorSymbolCount> kAllMirrorSymbols = {
    MirrorSymbol::A, MirrorSymbol::B, MirrorSymbol::C, MirrorSymbol::E, MirrorSymbol::F};

char to_char(MirrorSymbol m);
std::string to_string(MirrorSymbol m);
// Throws UnknownMirrorSymbolError for anything outside {A,B,C,E,F}.
MirrorSymbol mirror_symbol_from(std::string_view token);

enum class ElementKind { Source, BeamSplitter, Mirror, PhaseShifter, Detector };

std::string to_string(ElementKind kind);

// One node of the optical network. Parameter fields are meaningful only for
// the kinds that use them.
struct Element {
    std::string label;
    ElementKind kind = ElementKind::Source;

    // BeamSplitter: transmission amplitude t in (0,1); reflection amplitude is
    // sqrt(1 - t^2) and picks up a factor i (symmetric convention).
    double transmissivity = 0.0;

    // Mirror: coupling symbol, static phase (radians), oscillation drive.
    MirrorSymbol coupling = MirrorSymbol::A;
    double phase = 0.0;      // Mirror and PhaseShifter, radians
    double frequency = 0.0;  // Hz
    double tilt = 0.0;       // dimensionless, same scale as the coupling g

    double reflectivity() const;  // sqrt(1 - t^2)
};

// A simple source->detector path, stored as the ordered element labels.
struct PathDescriptor {
    std::vector<std::string> labels;

    bool operator==(const PathDescriptor&) const = default;
    bool operator<(const PathDescriptor& other) const { return labels < other.labels; }
};

// Directed acyclic optical network. Beam-splitter port pairing follows edge
// declaration order: the i-th declared in-edge transmits into the i-th
// declared out-edge; crossing ports reflect (amplitude i*r).
class InterferometerGraph {
public:
    void add_element(Element element);                                  // DuplicateLabelError
    void add_edge(const std::string& from, const std::string& to);      // DanglingEdgeError
    void validate() const;  // throws typed errors on any broken invariant

    bool has_element(const std::string& label) const;
    const Element& element(const std::string& label) const;
    const std::vector<Element>& elements() const { return elements_; }
    const std::vector<std::pair<std::string, std::string>>& edges() const { return edges_; }

    // Neighbor labels in edge-declaration order.
    const std::vector<std::string>& out_neighbors(const std::string& label) const;
    const std::vector<std::string>& in_neighbors(const std::string& label) const;

    std::string source_label() const;                       // NoSourceError
    std::vector<std::string> detector_labels() const;
    std::optional<std::string> mirror_label(MirrorSymbol symbol) const;
    std::vector<MirrorSymbol> mirrors_present() const;      // sorted by symbol

    // Scattering amplitude for traversing `label` from `from` to `to`.
    // Source and Detector contribute 1, Mirror and PhaseShifter e^{i phase},
    // BeamSplitter t or i*r depending on the port pairing.
    Complex traversal_amplitude(const std::string& label, const std::string& from,
                                const std::string& to) const;

    std::string to_json() const;
    static InterferometerGraph from_json(const std::string& text);

private:
    std::vector<Element> elements_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::pair<std::string, std::string>> edges_;
    std::map<std::string, std::vector<std::string>> out_;
    std::map<std::string, std::vector<std::string>> in_;
};

// Parses the line-oriented layout DSL (see docs/layout-format.md). Returns a
// validated graph or throws a typed error; never returns an invalid graph.
InterferometerGraph parse_layout(const std::string& text);

// Canonical nested Mach-Zehnder network: outer splitter -> {inner
// interferometer with mirrors E,A,B,F / outer arm with mirror C} -> outer
// recombiner -> detector D1. Mirror B carries `inner_phase`; pi gives the
// dark-port tuning where the two inner paths cancel at F. `outer_split` and
// `inner_split` are transmission amplitudes of the outer and inner splitter
// pairs. With `with_spare_ports` every splitter exit ends in a detector and
// the network is lossless.
InterferometerGraph build_nested_mzi(double inner_phase, double outer_split,
                                     double inner_split, bool with_spare_ports = false);

// Transmission amplitude sqrt(2/3) of the outer splitters for which the
// canonical dark-tuned network has equal through-A and through-C amplitudes
// (the outer arm carries amplitude 1/sqrt(3)).
inline constexpr double kSymmetricOuterSplit = 0.81649658092772603;
inline constexpr double kBalancedInnerSplit = 0.70710678118654752;

// All simple Source->Detector paths, lexicographic by label sequence.
std::vector<PathDescriptor> enumerate_paths(const InterferometerGraph& graph);
// Same, restricted to one detector. UnknownDetectorError if absent.
std::vector<PathDescriptor> enumerate_paths_to(const InterferometerGraph& graph,
                                               const std::string& detector);

// Product of the traversal amplitudes of the path's interior elements; the
// two endpoints contribute nothing, so amplitudes compose multiplicatively
// when paths are concatenated at a shared node.
Complex path_amplitude(const InterferometerGraph& graph, const PathDescriptor& path);

// Mirror symbols along a path, in traversal order.
std::vector<MirrorSymbol> mirror_sequence(const InterferometerGraph& graph,
                                          const PathDescriptor& path);

}  // namespace nmzi

#endif  // NMZI_GRAPH_HPP
