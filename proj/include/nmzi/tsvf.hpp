#ifndef NMZI_TSVF_HPP
#define NMZI_TSVF_HPP

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nmzi/graph.hpp"

namespace nmzi {

// Overlaps below this magnitude count as failed post-selection.
inline constexpr double kZeroOverlapThreshold = 1e-12;

struct PathInfo {
    PathDescriptor path;
    std::vector<MirrorSymbol> mirrors;
    Complex amplitude;
};

// Forward amplitudes are the pre-selected state propagated from the source:
// the value at a mirror is the amplitude arriving there, before the mirror's
// own factor. Backward amplitudes are the bra side of the post-selected
// state propagated back from the detector: the mirror's own factor times the
// onward amplitude to the detector. Their product summed over any complete
// cut reproduces the overlap.
struct TwoStateVector {
    std::map<std::string, Complex> forward;   // source, mirrors, detector
    std::map<std::string, Complex> backward;  // detector, mirrors, source
    Complex overlap;
    std::string detector;
    std::map<MirrorSymbol, std::string> mirror_labels;
    std::vector<PathInfo> paths;  // simple paths to the detector, lexicographic
};

// Amplitude of the forward-propagated state at the source, every mirror and
// every detector.
std::map<std::string, Complex> forward_state(const InterferometerGraph& graph);

// Bra-side amplitude from every region to `detector`. UnknownDetectorError.
std::map<std::string, Complex> backward_state(const InterferometerGraph& graph,
                                              const std::string& detector);

TwoStateVector two_state(const InterferometerGraph& graph, const std::string& detector);

// backward(mirror) * forward(mirror) / overlap. ZeroOverlapError when
// |overlap| < 1e-12 or the mirror is absent from the graph.
Complex projector_weak_value(const TwoStateVector& tsv, MirrorSymbol mirror);

// Sum of projector weak values over the listed mirrors (empty list -> 0).
Complex cumulative_weak_value(const TwoStateVector& tsv,
                              std::span<const MirrorSymbol> mirrors);

// Sum of projector weak values over a complete cut; contract: equals 1.
// IncompleteCutError if some path to the detector crosses the cut zero or
// more than one time.
Complex completeness_check(const TwoStateVector& tsv, const std::set<MirrorSymbol>& cut);

struct WeakValueResult {
    std::map<MirrorSymbol, Complex> per_mirror;
    // Keyed by the path's mirror chain ("E-A-F", "C"), plus "detector" for
    // the cumulative sum over every mirror present.
    std::map<std::string, Complex> cumulative;
    double post_selection_probability = 0.0;

    std::string to_json() const;
    std::string to_text() const;
};

WeakValueResult weak_values(const InterferometerGraph& graph, const std::string& detector);

}  // namespace nmzi

#endif  // NMZI_TSVF_HPP
