#include "nmzi/tsvf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nmzi/textio.hpp"

namespace nmzi {

namespace {

// Edge amplitudes of the forward wave: value on edge (u,v) is the amplitude
// of everything from the source up to and including u's factor.
std::map<std::pair<std::string, std::string>, Complex> forward_edge_amplitudes(
    const InterferometerGraph& graph) {
    std::map<std::pair<std::string, std::string>, Complex> amp;
    const std::string source = graph.source_label();

    // Elements in topological order via DFS post-order reversal.
    std::vector<std::string> topo;
    std::map<std::string, bool> done;
    std::function<void(const std::string&)> dfs = [&](const std::string& label) {
        done[label] = true;
        for (const auto& next : graph.out_neighbors(label)) {
            if (!done[next]) dfs(next);
        }
        topo.push_back(label);
    };
    dfs(source);
    std::reverse(topo.begin(), topo.end());

    for (const auto& label : topo) {
        if (label == source) {
            for (const auto& next : graph.out_neighbors(label)) {
                amp[{label, next}] = {1.0, 0.0};
            }
            continue;
        }
        for (const auto& next : graph.out_neighbors(label)) {
            Complex total{0.0, 0.0};
            for (const auto& prev : graph.in_neighbors(label)) {
                auto it = amp.find({prev, label});
                if (it == amp.end()) continue;  // unreached branch
                total += it->second * graph.traversal_amplitude(label, prev, next);
            }
            amp[{label, next}] = total;
        }
    }
    return amp;
}

// Edge amplitudes of the backward wave: value on edge (u,v) is the bra-side
// amplitude from v (inclusive) to the detector.
std::map<std::pair<std::string, std::string>, Complex> backward_edge_amplitudes(
    const InterferometerGraph& graph, const std::string& detector) {
    std::map<std::pair<std::string, std::string>, Complex> amp;
    std::map<std::pair<std::string, std::string>, bool> done;

    std::function<Complex(const std::string&, const std::string&)> solve =
        [&](const std::string& from, const std::string& to) -> Complex {
        auto key = std::make_pair(from, to);
        if (done[key]) return amp[key];
        done[key] = true;
        Complex total{0.0, 0.0};
        if (to == detector) {
            total = {1.0, 0.0};
        } else {
            for (const auto& next : graph.out_neighbors(to)) {
                total += graph.traversal_amplitude(to, from, next) * solve(to, next);
            }
        }
        amp[key] = total;
        return total;
    };

    for (const auto& [from, to] : graph.edges()) {
        solve(from, to);
    }
    return amp;
}

Complex sum_inputs(const InterferometerGraph& graph,
                   const std::map<std::pair<std::string, std::string>, Complex>& amp,
                   const std::string& label) {
    Complex total{0.0, 0.0};
    for (const auto& prev : graph.in_neighbors(label)) {
        auto it = amp.find({prev, label});
        if (it != amp.end()) total += it->second;
    }
    return total;
}

}  // namespace

std::map<std::string, Complex> forward_state(const InterferometerGraph& graph) {
    const auto edge_amp = forward_edge_amplitudes(graph);
    std::map<std::string, Complex> state;
    state[graph.source_label()] = {1.0, 0.0};
    for (const auto& e : graph.elements()) {
        if (e.kind == ElementKind::Mirror || e.kind == ElementKind::Detector) {
            state[e.label] = sum_inputs(graph, edge_amp, e.label);
        }
    }
    return state;
}

std::map<std::string, Complex> backward_state(const InterferometerGraph& graph,
                                              const std::string& detector) {
    if (!graph.has_element(detector) ||
        graph.element(detector).kind != ElementKind::Detector) {
        throw UnknownDetectorError("no detector labelled '" + detector + "'");
    }
    const auto edge_amp = backward_edge_amplitudes(graph, detector);

    std::map<std::string, Complex> state;
    state[detector] = {1.0, 0.0};
    const std::string source = graph.source_label();
    for (const auto& e : graph.elements()) {
        if (e.kind == ElementKind::Mirror) {
            // Own factor times the onward amplitude: exactly the value the
            // backward recursion assigns to the mirror's incoming edge.
            const auto& prev = graph.in_neighbors(e.label).front();
            auto it = edge_amp.find({prev, e.label});
            state[e.label] = it == edge_amp.end() ? Complex{0.0, 0.0} : it->second;
        } else if (e.label == source) {
            Complex total{0.0, 0.0};
            for (const auto& next : graph.out_neighbors(source)) {
                auto it = edge_amp.find({source, next});
                if (it != edge_amp.end()) total += it->second;
            }
            state[source] = total;
        }
    }
    return state;
}

TwoStateVector two_state(const InterferometerGraph& graph, const std::string& detector) {
    TwoStateVector tsv;
    tsv.detector = detector;
    tsv.forward = forward_state(graph);
    tsv.backward = backward_state(graph, detector);
    for (MirrorSymbol m : graph.mirrors_present()) {
        tsv.mirror_labels[m] = *graph.mirror_label(m);
    }

    Complex overlap{0.0, 0.0};
    for (const auto& path : enumerate_paths_to(graph, detector)) {
        PathInfo info;
        info.path = path;
        info.mirrors = mirror_sequence(graph, path);
        info.amplitude = path_amplitude(graph, path);
        overlap += info.amplitude;
        tsv.paths.push_back(std::move(info));
    }
    tsv.overlap = overlap;
    return tsv;
}

Complex projector_weak_value(const TwoStateVector& tsv, MirrorSymbol mirror) {
    if (std::abs(tsv.overlap) < kZeroOverlapThreshold) {
        throw ZeroOverlapError("post-selection amplitude vanishes; weak values undefined");
    }
    auto it = tsv.mirror_labels.find(mirror);
    if (it == tsv.mirror_labels.end()) {
        throw UnknownMirrorSymbolError("mirror " + to_string(mirror) +
                                       " is not part of the graph");
    }
    const Complex fwd = tsv.forward.at(it->second);
    const Complex bwd = tsv.backward.at(it->second);
    return bwd * fwd / tsv.overlap;
}

Complex cumulative_weak_value(const TwoStateVector& tsv,
                              std::span<const MirrorSymbol> mirrors) {
    if (std::abs(tsv.overlap) < kZeroOverlapThreshold) {
        throw ZeroOverlapError("post-selection amplitude vanishes; weak values undefined");
    }
    Complex total{0.0, 0.0};
    for (MirrorSymbol m : mirrors) {
        total += projector_weak_value(tsv, m);
    }
    return total;
}

Complex completeness_check(const TwoStateVector& tsv, const std::set<MirrorSymbol>& cut) {
    for (const auto& info : tsv.paths) {
        std::size_t crossings = 0;
        for (MirrorSymbol m : info.mirrors) {
            if (cut.count(m) != 0) ++crossings;
        }
        if (crossings != 1) {
            std::string chain;
            for (MirrorSymbol m : info.mirrors) {
                if (!chain.empty()) chain += "-";
                chain += to_char(m);
            }
            throw IncompleteCutError("path [" + (chain.empty() ? "-" : chain) + "] crosses the cut " +
                                     std::to_string(crossings) + " times (want exactly 1)");
        }
    }
    std::vector<MirrorSymbol> mirrors(cut.begin(), cut.end());
    return cumulative_weak_value(tsv, mirrors);
}

WeakValueResult weak_values(const InterferometerGraph& graph, const std::string& detector) {
    const TwoStateVector tsv = two_state(graph, detector);
    if (std::abs(tsv.overlap) < kZeroOverlapThreshold) {
        throw ZeroOverlapError("post-selection amplitude vanishes; weak values undefined");
    }

    WeakValueResult result;
    result.post_selection_probability = std::norm(tsv.overlap);
    for (const auto& [symbol, label] : tsv.mirror_labels) {
        result.per_mirror[symbol] = projector_weak_value(tsv, symbol);
    }
    for (const auto& info : tsv.paths) {
        std::string key;
        for (MirrorSymbol m : info.mirrors) {
            if (!key.empty()) key += "-";
            key += to_char(m);
        }
        if (key.empty()) key = "-";
        result.cumulative[key] = cumulative_weak_value(tsv, info.mirrors);
    }
    Complex detector_total{0.0, 0.0};
    for (const auto& [symbol, value] : result.per_mirror) {
        detector_total += value;
    }
    result.cumulative["detector"] = detector_total;
    return result;
}

std::string WeakValueResult::to_json() const {
    nlohmann::ordered_json j;
    j["per_mirror"] = nlohmann::ordered_json::object();
    for (const auto& [symbol, value] : per_mirror) {
        j["per_mirror"][to_string(symbol)] = {{"re", value.real()}, {"im", value.imag()}};
    }
    j["cumulative"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : cumulative) {
        j["cumulative"][key] = {{"re", value.real()}, {"im", value.imag()}};
    }
    j["post_selection_probability"] = post_selection_probability;
    return j.dump(2);
}

std::string WeakValueResult::to_text() const {
    std::ostringstream out;
    out << "mirror weak values\n";
    for (const auto& [symbol, value] : per_mirror) {
        out << "  P_" << to_string(symbol) << "  " << format_complex(value) << "\n";
    }
    out << "cumulative\n";
    for (const auto& [key, value] : cumulative) {
        out << "  " << key << "  " << format_complex(value) << "\n";
    }
    out << "post_selection_probability  " << format_double(post_selection_probability) << "\n";
    return out.str();
}

}  // namespace nmzi
