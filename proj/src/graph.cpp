#include "nmzi/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nmzi {

namespace {

constexpr double kPi = 3.14159265358979323846;

// exp(i*phase), exact at the quarter-turn points so that a pi mirror phase
// cancels its partner amplitude bit for bit instead of leaving a ~1e-16
// imaginary remnant from sin(pi).
Complex phase_factor(double phase) {
    if (phase == 0.0) return {1.0, 0.0};
    if (phase == kPi || phase == -kPi) return {-1.0, 0.0};
    if (phase == kPi / 2.0) return {0.0, 1.0};
    if (phase == -kPi / 2.0) return {0.0, -1.0};
    return std::polar(1.0, phase);
}

}  // namespace

char to_char(MirrorSymbol m) {
    switch (m) {
        case MirrorSymbol::A: return 'A';
        case MirrorSymbol::B: return 'B';
        case MirrorSymbol::C: return 'C';
        case MirrorSymbol::E: return 'E';
        case MirrorSymbol::F: return 'F';
    }
    return '?';
}

std::string to_string(MirrorSymbol m) { return std::string(1, to_char(m)); }

MirrorSymbol mirror_symbol_from(std::string_view token) {
    if (token.size() == 1) {
        switch (token[0]) {
            case 'A': return MirrorSymbol::A;
            case 'B': return MirrorSymbol::B;
            case 'C': return MirrorSymbol::C;
            case 'E': return MirrorSymbol::E;
            case 'F': return MirrorSymbol::F;
            default: break;
        }
    }
    throw UnknownMirrorSymbolError("unknown mirror symbol '" + std::string(token) +
                                   "' (expected one of A,B,C,E,F)");
}

std::string to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::Source: return "source";
        case ElementKind::BeamSplitter: return "splitter";
        case ElementKind::Mirror: return "mirror";
        case ElementKind::PhaseShifter: return "phase";
        case ElementKind::Detector: return "detector";
    }
    return "?";
}

double Element::reflectivity() const {
    return std::sqrt(std::max(0.0, 1.0 - transmissivity * transmissivity));
}

void InterferometerGraph::add_element(Element element) {
    if (index_.count(element.label) != 0) {
        throw DuplicateLabelError("duplicate element label '" + element.label + "'");
    }
    if (element.kind == ElementKind::BeamSplitter &&
        (element.transmissivity <= 0.0 || element.transmissivity >= 1.0)) {
        throw InvalidElementError("splitter '" + element.label +
                                  "' needs a transmission amplitude in (0,1)");
    }
    index_[element.label] = elements_.size();
    out_[element.label];
    in_[element.label];
    elements_.push_back(std::move(element));
}

void InterferometerGraph::add_edge(const std::string& from, const std::string& to) {
    if (!has_element(from)) {
        throw DanglingEdgeError("edge references undeclared element '" + from + "'");
    }
    if (!has_element(to)) {
        throw DanglingEdgeError("edge references undeclared element '" + to + "'");
    }
    edges_.emplace_back(from, to);
    out_[from].push_back(to);
    in_[to].push_back(from);
}

bool InterferometerGraph::has_element(const std::string& label) const {
    return index_.count(label) != 0;
}

const Element& InterferometerGraph::element(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) {
        throw DanglingEdgeError("unknown element '" + label + "'");
    }
    return elements_[it->second];
}

const std::vector<std::string>& InterferometerGraph::out_neighbors(const std::string& label) const {
    auto it = out_.find(label);
    if (it == out_.end()) {
        throw DanglingEdgeError("unknown element '" + label + "'");
    }
    return it->second;
}

const std::vector<std::string>& InterferometerGraph::in_neighbors(const std::string& label) const {
    auto it = in_.find(label);
    if (it == in_.end()) {
        throw DanglingEdgeError("unknown element '" + label + "'");
    }
    return it->second;
}

std::string InterferometerGraph::source_label() const {
    std::string found;
    for (const auto& e : elements_) {
        if (e.kind == ElementKind::Source) {
            if (!found.empty()) {
                throw MultipleSourcesError("graph declares more than one source");
            }
            found = e.label;
        }
    }
    if (found.empty()) {
        throw NoSourceError("graph declares no source");
    }
    return found;
}

std::vector<std::string> InterferometerGraph::detector_labels() const {
    std::vector<std::string> labels;
    for (const auto& e : elements_) {
        if (e.kind == ElementKind::Detector) {
            labels.push_back(e.label);
        }
    }
    return labels;
}

std::optional<std::string> InterferometerGraph::mirror_label(MirrorSymbol symbol) const {
    for (const auto& e : elements_) {
        if (e.kind == ElementKind::Mirror && e.coupling == symbol) {
            return e.label;
        }
    }
    return std::nullopt;
}

std::vector<MirrorSymbol> InterferometerGraph::mirrors_present() const {
    std::vector<MirrorSymbol> symbols;
    for (MirrorSymbol m : kAllMirrorSymbols) {
        if (mirror_label(m)) {
            symbols.push_back(m);
        }
    }
    return symbols;
}

void InterferometerGraph::validate() const {
    const std::string source = source_label();  // NoSourceError / MultipleSourcesError
    if (!in_neighbors(source).empty()) {
        throw InvalidElementError("source '" + source + "' has incoming edges");
    }

    bool has_detector = false;
    std::set<MirrorSymbol> seen_couplings;
    for (const auto& e : elements_) {
        const auto in_deg = in_neighbors(e.label).size();
        const auto out_deg = out_neighbors(e.label).size();
        switch (e.kind) {
            case ElementKind::Source:
                if (out_deg != 1) {
                    throw InvalidElementError("source '" + e.label + "' must have exactly one out-edge");
                }
                break;
            case ElementKind::Detector:
                has_detector = true;
                if (out_deg != 0) {
                    throw InvalidElementError("detector '" + e.label + "' has outgoing edges");
                }
                if (in_deg == 0) {
                    throw InvalidElementError("detector '" + e.label + "' is not connected");
                }
                break;
            case ElementKind::BeamSplitter:
                if (in_deg > 2 || out_deg > 2 || in_deg == 0 || out_deg == 0) {
                    throw InvalidElementError("splitter '" + e.label +
                                              "' must have 1-2 in-edges and 1-2 out-edges");
                }
                break;
            case ElementKind::Mirror:
                if (!seen_couplings.insert(e.coupling).second) {
                    throw InvalidElementError("mirror coupling symbol '" +
                                              to_string(e.coupling) + "' is used twice");
                }
                [[fallthrough]];
            case ElementKind::PhaseShifter:
                if (in_deg != 1 || out_deg != 1) {
                    throw InvalidElementError("element '" + e.label +
                                              "' must have exactly one in-edge and one out-edge");
                }
                break;
        }
    }
    if (!has_detector) {
        throw InvalidElementError("graph declares no detector");
    }

    // Cycle check: depth-first search with colors.
    std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
    std::function<void(const std::string&)> dfs = [&](const std::string& label) {
        color[label] = 1;
        for (const auto& next : out_neighbors(label)) {
            if (color[next] == 1) {
                throw CycleError("cycle through '" + next + "'");
            }
            if (color[next] == 0) {
                dfs(next);
            }
        }
        color[label] = 2;
    };
    for (const auto& e : elements_) {
        if (color[e.label] == 0) {
            dfs(e.label);
        }
    }

    // Reachability from the source.
    std::set<std::string> reached;
    std::function<void(const std::string&)> walk = [&](const std::string& label) {
        if (!reached.insert(label).second) return;
        for (const auto& next : out_neighbors(label)) {
            walk(next);
        }
    };
    walk(source);
    for (const auto& e : elements_) {
        if (reached.count(e.label) == 0) {
            throw UnreachableElementError("element '" + e.label +
                                          "' is unreachable from the source");
        }
    }
}

Complex InterferometerGraph::traversal_amplitude(const std::string& label,
                                                 const std::string& from,
                                                 const std::string& to) const {
    const Element& e = element(label);
    switch (e.kind) {
        case ElementKind::Source:
        case ElementKind::Detector:
            return {1.0, 0.0};
        case ElementKind::Mirror:
        case ElementKind::PhaseShifter:
            return phase_factor(e.phase);
        case ElementKind::BeamSplitter: {
            const auto& ins = in_neighbors(label);
            const auto& outs = out_neighbors(label);
            const auto in_it = std::find(ins.begin(), ins.end(), from);
            const auto out_it = std::find(outs.begin(), outs.end(), to);
            if (in_it == ins.end() || out_it == outs.end()) {
                throw InvalidPathError("'" + from + "' -> '" + label + "' -> '" + to +
                                       "' does not follow declared edges");
            }
            const auto in_port = static_cast<std::size_t>(in_it - ins.begin());
            const auto out_port = static_cast<std::size_t>(out_it - outs.begin());
            if (in_port == out_port) {
                return {e.transmissivity, 0.0};
            }
            return {0.0, e.reflectivity()};
        }
    }
    return {1.0, 0.0};
}

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;
    std::size_t col = 1;
};

struct Token {
    std::string text;
    std::size_t line;
    std::size_t col;
};

// Splits one line into whitespace-separated tokens, dropping '#' comments.
std::vector<Token> tokenize_line(const std::string& line, std::size_t line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#') {
            ++i;
        }
        tokens.push_back({line.substr(start, i - start), line_no, start + 1});
    }
    return tokens;
}

double parse_number(const Token& tok) {
    try {
        std::size_t used = 0;
        double v = std::stod(tok.text, &used);
        if (used != tok.text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw SyntaxError(tok.line, tok.col, "expected a number, got '" + tok.text + "'");
    }
}

}  // namespace

InterferometerGraph parse_layout(const std::string& text) {
    InterferometerGraph graph;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::pair<Token, Token>> pending_edges;

    while (std::getline(stream, line)) {
        ++line_no;
        auto tokens = tokenize_line(line, line_no);
        if (tokens.empty()) continue;

        const Token& head = tokens[0];
        auto expect_args = [&](std::size_t n) {
            if (tokens.size() != n + 1) {
                throw SyntaxError(head.line, head.col,
                                  "'" + head.text + "' expects " + std::to_string(n) +
                                      " argument(s), got " + std::to_string(tokens.size() - 1));
            }
        };

        if (head.text == "source" || head.text == "detector") {
            expect_args(1);
            Element e;
            e.label = tokens[1].text;
            e.kind = head.text == "source" ? ElementKind::Source : ElementKind::Detector;
            graph.add_element(std::move(e));
        } else if (head.text == "splitter") {
            expect_args(2);
            Element e;
            e.label = tokens[1].text;
            e.kind = ElementKind::BeamSplitter;
            e.transmissivity = parse_number(tokens[2]);
            if (e.transmissivity <= 0.0 || e.transmissivity >= 1.0) {
                throw SyntaxError(tokens[2].line, tokens[2].col,
                                  "splitter transmission amplitude must lie in (0,1)");
            }
            graph.add_element(std::move(e));
        } else if (head.text == "phase") {
            expect_args(2);
            Element e;
            e.label = tokens[1].text;
            e.kind = ElementKind::PhaseShifter;
            e.phase = parse_number(tokens[2]);
            graph.add_element(std::move(e));
        } else if (head.text == "mirror") {
            if (tokens.size() < 3) {
                throw SyntaxError(head.line, head.col,
                                  "'mirror' expects a label and coupling=SYMBOL");
            }
            Element e;
            e.label = tokens[1].text;
            e.kind = ElementKind::Mirror;
            bool have_coupling = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                const auto& tok = tokens[i];
                auto eq = tok.text.find('=');
                if (eq == std::string::npos) {
                    throw SyntaxError(tok.line, tok.col,
                                      "mirror option must be key=value, got '" + tok.text + "'");
                }
                const std::string key = tok.text.substr(0, eq);
                const Token value{tok.text.substr(eq + 1), tok.line, tok.col + eq + 1};
                if (key == "coupling") {
                    try {
                        e.coupling = mirror_symbol_from(value.text);
                    } catch (const UnknownMirrorSymbolError& err) {
                        throw SyntaxError(value.line, value.col, err.what());
                    }
                    have_coupling = true;
                } else if (key == "phase") {
                    e.phase = parse_number(value);
                } else if (key == "freq") {
                    e.frequency = parse_number(value);
                } else if (key == "tilt") {
                    e.tilt = parse_number(value);
                } else {
                    throw SyntaxError(tok.line, tok.col, "unknown mirror option '" + key + "'");
                }
            }
            if (!have_coupling) {
                throw SyntaxError(head.line, head.col,
                                  "mirror '" + e.label + "' is missing coupling=SYMBOL");
            }
            graph.add_element(std::move(e));
        } else if (head.text == "edge") {
            expect_args(2);
            pending_edges.emplace_back(tokens[1], tokens[2]);
        } else {
            throw SyntaxError(head.line, head.col, "unknown directive '" + head.text + "'");
        }
    }

    for (const auto& [from, to] : pending_edges) {
        graph.add_edge(from.text, to.text);  // DanglingEdgeError
    }
    graph.validate();
    return graph;
}

InterferometerGraph build_nested_mzi(double inner_phase, double outer_split,
                                     double inner_split, bool with_spare_ports) {
    if (outer_split <= 0.0 || outer_split >= 1.0 || inner_split <= 0.0 || inner_split >= 1.0) {
        throw InvalidElementError("splitter amplitudes must lie strictly between 0 and 1");
    }

    InterferometerGraph g;
    auto add = [&](std::string label, ElementKind kind, double t = 0.0) {
        Element e;
        e.label = std::move(label);
        e.kind = kind;
        e.transmissivity = t;
        g.add_element(std::move(e));
    };
    auto add_mirror = [&](std::string label, MirrorSymbol coupling, double phase) {
        Element e;
        e.label = std::move(label);
        e.kind = ElementKind::Mirror;
        e.coupling = coupling;
        e.phase = phase;
        g.add_element(std::move(e));
    };

    add("S", ElementKind::Source);
    add("BS1", ElementKind::BeamSplitter, outer_split);
    add_mirror("E", MirrorSymbol::E, 0.0);
    add("BS2", ElementKind::BeamSplitter, inner_split);
    add_mirror("A", MirrorSymbol::A, 0.0);
    add_mirror("B", MirrorSymbol::B, inner_phase);
    add("BS3", ElementKind::BeamSplitter, inner_split);
    add_mirror("F", MirrorSymbol::F, 0.0);
    // The outer arm carries a -pi/2 alignment phase so that the through-A and
    // through-C amplitudes reach D1 in phase (both outer ports then interfere
    // cleanly; the dark tuning stays a pure mirror-B phase).
    add_mirror("C", MirrorSymbol::C, -kPi / 2.0);
    add("BS4", ElementKind::BeamSplitter, outer_split);
    add("D1", ElementKind::Detector);

    g.add_edge("S", "BS1");
    g.add_edge("BS1", "E");   // out port 0: transmission into the inner arm
    g.add_edge("BS1", "C");   // out port 1: reflection into the outer arm
    g.add_edge("E", "BS2");
    g.add_edge("BS2", "A");   // transmission
    g.add_edge("BS2", "B");   // reflection
    g.add_edge("B", "BS3");   // in port 0: B transmits towards F
    g.add_edge("A", "BS3");   // in port 1: A reflects towards F
    g.add_edge("BS3", "F");
    g.add_edge("F", "BS4");   // in port 0: F transmits towards D1
    g.add_edge("C", "BS4");   // in port 1: C reflects towards D1
    g.add_edge("BS4", "D1");

    if (with_spare_ports) {
        add("DI", ElementKind::Detector);  // inner recombiner exit
        add("D2", ElementKind::Detector);  // second outer port
        g.add_edge("BS3", "DI");
        g.add_edge("BS4", "D2");
    }

    g.validate();
    return g;
}

namespace {

void collect_paths(const InterferometerGraph& graph, const std::string& node,
                   std::vector<std::string>& stack, std::set<std::string>& visited,
                   std::vector<PathDescriptor>& out,
                   const std::optional<std::string>& only_detector) {
    stack.push_back(node);
    visited.insert(node);
    if (graph.element(node).kind == ElementKind::Detector) {
        if (!only_detector || node == *only_detector) {
            out.push_back(PathDescriptor{stack});
        }
    } else {
        for (const auto& next : graph.out_neighbors(node)) {
            if (visited.count(next) == 0) {
                collect_paths(graph, next, stack, visited, out, only_detector);
            }
        }
    }
    visited.erase(node);
    stack.pop_back();
}

std::vector<PathDescriptor> paths_impl(const InterferometerGraph& graph,
                                       const std::optional<std::string>& only_detector) {
    std::vector<PathDescriptor> paths;
    std::vector<std::string> stack;
    std::set<std::string> visited;
    collect_paths(graph, graph.source_label(), stack, visited, paths, only_detector);
    std::sort(paths.begin(), paths.end());
    return paths;
}

}  // namespace

std::vector<PathDescriptor> enumerate_paths(const InterferometerGraph& graph) {
    return paths_impl(graph, std::nullopt);
}

std::vector<PathDescriptor> enumerate_paths_to(const InterferometerGraph& graph,
                                               const std::string& detector) {
    if (!graph.has_element(detector) ||
        graph.element(detector).kind != ElementKind::Detector) {
        throw UnknownDetectorError("no detector labelled '" + detector + "'");
    }
    return paths_impl(graph, detector);
}

Complex path_amplitude(const InterferometerGraph& graph, const PathDescriptor& path) {
    if (path.labels.size() < 2) {
        throw InvalidPathError("a path needs at least two elements");
    }
    std::set<std::string> seen;
    for (const auto& label : path.labels) {
        if (!graph.has_element(label)) {
            throw InvalidPathError("path references unknown element '" + label + "'");
        }
        if (!seen.insert(label).second) {
            throw InvalidPathError("path repeats element '" + label + "'");
        }
    }
    for (std::size_t i = 0; i + 1 < path.labels.size(); ++i) {
        const auto& outs = graph.out_neighbors(path.labels[i]);
        if (std::find(outs.begin(), outs.end(), path.labels[i + 1]) == outs.end()) {
            throw InvalidPathError("no edge '" + path.labels[i] + "' -> '" +
                                   path.labels[i + 1] + "'");
        }
    }

    Complex amplitude{1.0, 0.0};
    for (std::size_t i = 1; i + 1 < path.labels.size(); ++i) {
        amplitude *= graph.traversal_amplitude(path.labels[i], path.labels[i - 1],
                                               path.labels[i + 1]);
    }
    return amplitude;
}

std::vector<MirrorSymbol> mirror_sequence(const InterferometerGraph& graph,
                                          const PathDescriptor& path) {
    std::vector<MirrorSymbol> symbols;
    for (const auto& label : path.labels) {
        const Element& e = graph.element(label);
        if (e.kind == ElementKind::Mirror) {
            symbols.push_back(e.coupling);
        }
    }
    return symbols;
}

std::string InterferometerGraph::to_json() const {
    nlohmann::ordered_json j;
    j["elements"] = nlohmann::ordered_json::array();
    for (const auto& e : elements_) {
        nlohmann::ordered_json je;
        je["label"] = e.label;
        je["kind"] = nmzi::to_string(e.kind);
        switch (e.kind) {
            case ElementKind::BeamSplitter:
                je["transmissivity"] = e.transmissivity;
                break;
            case ElementKind::Mirror:
                je["coupling"] = nmzi::to_string(e.coupling);
                je["phase"] = e.phase;
                je["freq"] = e.frequency;
                je["tilt"] = e.tilt;
                break;
            case ElementKind::PhaseShifter:
                je["phase"] = e.phase;
                break;
            default:
                break;
        }
        j["elements"].push_back(std::move(je));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [from, to] : edges_) {
        j["edges"].push_back({from, to});
    }
    return j.dump(2);
}

InterferometerGraph InterferometerGraph::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw SyntaxError(1, 1, err.what());
    }

    InterferometerGraph g;
    for (const auto& je : j.at("elements")) {
        Element e;
        e.label = je.at("label").get<std::string>();
        const auto kind = je.at("kind").get<std::string>();
        if (kind == "source") {
            e.kind = ElementKind::Source;
        } else if (kind == "detector") {
            e.kind = ElementKind::Detector;
        } else if (kind == "splitter") {
            e.kind = ElementKind::BeamSplitter;
            e.transmissivity = je.at("transmissivity").get<double>();
        } else if (kind == "phase") {
            e.kind = ElementKind::PhaseShifter;
            e.phase = je.at("phase").get<double>();
        } else if (kind == "mirror") {
            e.kind = ElementKind::Mirror;
            e.coupling = mirror_symbol_from(je.at("coupling").get<std::string>());
            e.phase = je.value("phase", 0.0);
            e.frequency = je.value("freq", 0.0);
            e.tilt = je.value("tilt", 0.0);
        } else {
            throw SyntaxError(1, 1, "unknown element kind '" + kind + "'");
        }
        g.add_element(std::move(e));
    }
    for (const auto& edge : j.at("edges")) {
        g.add_edge(edge.at(0).get<std::string>(), edge.at(1).get<std::string>());
    }
    g.validate();
    return g;
}

}  // namespace nmzi
