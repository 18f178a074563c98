#pragma once

// =============================================================================
// Two-domain circuit graph. Electrical and magnetic nodes live in one element
// list; the only element allowed to couple the domains is the gyrator. The
// magnetic domain follows the gyrator-capacitor analogy: node potential is
// mmf in amp-turns, branch flow is dPhi/dt in Wb/s, and permeances appear as
// capacitances.
//
// A Circuit is built once, validated, and then treated as immutable; it can
// be shared freely across concurrent simulation runs.
// =============================================================================

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gcsim/magnetics.hpp"

namespace gcsim {

enum class Domain { electrical, magnetic };

inline const char* domain_name(Domain d) {
    return d == Domain::electrical ? "electrical" : "magnetic";
}

struct NodeRef {
    int id = -1;
    Domain domain = Domain::electrical;

    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

// --- element parameter payloads ---------------------------------------------

struct Resistor {
    double resistance_ohm = 0.0;
};

struct Inductor {
    double inductance_h = 0.0;
    double initial_current_a = 0.0;
};

/// Linear charge-storage element. On electrical nodes the value is a
/// capacitance in farads; on magnetic nodes it is a linear permeance in
/// Wb/A-turn and the "initial voltage" is an initial mmf.
struct Capacitor {
    double value = 0.0;
    double initial_voltage = 0.0;
};

/// Saturating permeance of one core leg (nonlinear capacitance in the
/// magnetic domain).
struct FluxCapacitor {
    CoreLegGeometry geometry;
    SaturationCurve curve;
};

/// Winding: couples an electrical port to a magnetic port. With winding
/// sense s and turns N the port laws are
///   mmf = s N i_e        and        v_e = -s N w
/// where i_e is the current into the electrical + terminal and w the flux
/// rate into the magnetic + terminal. Instantaneous power absorbed by the
/// two ports sums to zero.
struct Gyrator {
    WindingGyrator winding;
};

struct SourceDc {
    double volts = 0.0;
    double ramp_time_s = 0.0;  // linear 0 -> volts over [0, ramp_time]; 0 = no ramp
};

struct SourceSine {
    double amplitude_v = 0.0;
    double frequency_hz = 0.0;
    double phase_rad = 0.0;
};

/// Ideal current source; the forced current flows from the first terminal to
/// the second through the source.
struct SourceCurrentDc {
    double amps = 0.0;
    double ramp_time_s = 0.0;
};

using ElementParams = std::variant<Resistor, Inductor, Capacitor, FluxCapacitor, Gyrator,
                                   SourceDc, SourceSine, SourceCurrentDc>;

struct Element {
    std::string label;
    std::vector<NodeRef> terminals;  // 2, or 4 for gyrators (e+, e-, m+, m-)
    ElementParams params;

    template <typename T>
    [[nodiscard]] bool is() const {
        return std::holds_alternative<T>(params);
    }
    template <typename T>
    [[nodiscard]] const T& as() const {
        return std::get<T>(params);
    }
};

// --- circuit -----------------------------------------------------------------

class Circuit {
public:
    NodeRef add_node(Domain domain) {
        NodeRef n{static_cast<int>(domains_.size()), domain};
        domains_.push_back(domain);
        return n;
    }

    void set_ground(NodeRef node) {
        if (node.id < 0 || node.id >= static_cast<int>(domains_.size()) ||
            domains_[static_cast<std::size_t>(node.id)] != node.domain)
            throw std::invalid_argument("set_ground: node does not belong to this circuit");
        ground(node.domain) = node.id;
    }

    void add_resistor(std::string label, NodeRef n1, NodeRef n2, double ohms) {
        elements_.push_back({std::move(label), {n1, n2}, Resistor{ohms}});
    }
    void add_inductor(std::string label, NodeRef n1, NodeRef n2, double henry,
                      double initial_current = 0.0) {
        elements_.push_back({std::move(label), {n1, n2}, Inductor{henry, initial_current}});
    }
    void add_capacitor(std::string label, NodeRef n1, NodeRef n2, double value,
                       double initial_voltage = 0.0) {
        elements_.push_back({std::move(label), {n1, n2}, Capacitor{value, initial_voltage}});
    }
    void add_flux_capacitor(std::string label, NodeRef n1, NodeRef n2,
                            const CoreLegGeometry& geometry, const SaturationCurve& curve) {
        elements_.push_back({std::move(label), {n1, n2}, FluxCapacitor{geometry, curve}});
    }
    void add_gyrator(std::string label, NodeRef e_plus, NodeRef e_minus, NodeRef m_plus,
                     NodeRef m_minus, const WindingGyrator& winding) {
        elements_.push_back({std::move(label), {e_plus, e_minus, m_plus, m_minus}, Gyrator{winding}});
    }
    void add_source_dc(std::string label, NodeRef pos, NodeRef neg, double volts,
                       double ramp_time_s = 0.0) {
        elements_.push_back({std::move(label), {pos, neg}, SourceDc{volts, ramp_time_s}});
    }
    void add_source_sine(std::string label, NodeRef pos, NodeRef neg, double amplitude,
                         double frequency_hz, double phase_rad = 0.0) {
        elements_.push_back(
            {std::move(label), {pos, neg}, SourceSine{amplitude, frequency_hz, phase_rad}});
    }
    void add_source_current_dc(std::string label, NodeRef from, NodeRef to, double amps,
                               double ramp_time_s = 0.0) {
        elements_.push_back({std::move(label), {from, to}, SourceCurrentDc{amps, ramp_time_s}});
    }

    [[nodiscard]] int node_count() const { return static_cast<int>(domains_.size()); }
    [[nodiscard]] Domain node_domain(int id) const { return domains_.at(static_cast<std::size_t>(id)); }
    [[nodiscard]] const std::vector<Element>& elements() const { return elements_; }
    [[nodiscard]] std::vector<Element>& elements_mutable() { return elements_; }

    [[nodiscard]] std::optional<int> ground_id(Domain d) const {
        return d == Domain::electrical ? ground_electrical_ : ground_magnetic_;
    }
    [[nodiscard]] bool is_ground(int node_id) const {
        return (ground_electrical_ && *ground_electrical_ == node_id) ||
               (ground_magnetic_ && *ground_magnetic_ == node_id);
    }

    [[nodiscard]] const Element* find(const std::string& label) const {
        for (const auto& e : elements_)
            if (e.label == label) return &e;
        return nullptr;
    }

private:
    std::optional<int>& ground(Domain d) {
        return d == Domain::electrical ? ground_electrical_ : ground_magnetic_;
    }

    std::vector<Domain> domains_;
    std::vector<Element> elements_;
    std::optional<int> ground_electrical_;
    std::optional<int> ground_magnetic_;
};

// --- validation ---------------------------------------------------------------

struct Violation {
    std::string subject;  // element label or node id
    std::string message;
};

namespace detail {

inline bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

inline void require(std::vector<Violation>& out, bool ok, std::string subject, std::string msg) {
    if (!ok) out.push_back({std::move(subject), std::move(msg)});
}

} // namespace detail

/// Structural validation. Violations are data, not failures: an empty report
/// means every circuit and element invariant holds.
inline std::vector<Violation> validate(const Circuit& circuit) {
    using detail::require;
    std::vector<Violation> out;

    bool domain_present[2] = {false, false};
    for (int id = 0; id < circuit.node_count(); ++id)
        domain_present[circuit.node_domain(id) == Domain::magnetic ? 1 : 0] = true;

    for (Domain d : {Domain::electrical, Domain::magnetic}) {
        const bool present = domain_present[d == Domain::magnetic ? 1 : 0];
        const auto g = circuit.ground_id(d);
        if (present && !g)
            out.push_back({"circuit", std::string("missing ground: ") + domain_name(d)});
        if (g && (*g < 0 || *g >= circuit.node_count() || circuit.node_domain(*g) != d))
            out.push_back({"circuit", std::string("ground node invalid for domain ") + domain_name(d)});
    }

    auto node_ok = [&](NodeRef n) {
        return n.id >= 0 && n.id < circuit.node_count() &&
               circuit.node_domain(n.id) == n.domain;
    };

    std::vector<std::string> labels;
    for (const auto& e : circuit.elements()) {
        require(out, !e.label.empty(), e.label, "element label empty");
        for (const auto& l : labels)
            require(out, l != e.label, e.label, "duplicate element label");
        labels.push_back(e.label);

        bool terminals_ok = true;
        for (const auto& t : e.terminals)
            if (!node_ok(t)) {
                out.push_back({e.label, "terminal references unknown node"});
                terminals_ok = false;
            }
        if (!terminals_ok) continue;

        const std::size_t want = e.is<Gyrator>() ? 4 : 2;
        if (e.terminals.size() != want) {
            out.push_back({e.label, "wrong terminal count"});
            continue;
        }

        if (e.is<Gyrator>()) {
            const auto& t = e.terminals;
            require(out,
                    t[0].domain == Domain::electrical && t[1].domain == Domain::electrical,
                    e.label, "domain mismatch: gyrator electrical pair must be electrical");
            require(out, t[2].domain == Domain::magnetic && t[3].domain == Domain::magnetic,
                    e.label, "domain mismatch: gyrator magnetic pair must be magnetic");
            require(out, e.as<Gyrator>().winding.valid(), e.label,
                    "gyrator winding invalid (turns >= 1, orientation +-1)");
        } else {
            require(out, e.terminals[0].domain == e.terminals[1].domain, e.label,
                    "domain mismatch: two-terminal element bridges electrical and magnetic nodes");
        }

        if (e.is<Resistor>())
            require(out, detail::finite_positive(e.as<Resistor>().resistance_ohm), e.label,
                    "resistance must be finite and strictly positive");
        else if (e.is<Inductor>())
            require(out,
                    detail::finite_positive(e.as<Inductor>().inductance_h) &&
                        std::isfinite(e.as<Inductor>().initial_current_a),
                    e.label, "inductance must be finite and strictly positive");
        else if (e.is<Capacitor>())
            require(out,
                    detail::finite_positive(e.as<Capacitor>().value) &&
                        std::isfinite(e.as<Capacitor>().initial_voltage),
                    e.label, "capacitance must be finite and strictly positive");
        else if (e.is<FluxCapacitor>())
            require(out,
                    e.as<FluxCapacitor>().geometry.valid() && e.as<FluxCapacitor>().curve.valid(),
                    e.label, "flux capacitor geometry/saturation curve invalid");
        else if (e.is<SourceDc>())
            require(out,
                    std::isfinite(e.as<SourceDc>().volts) && e.as<SourceDc>().ramp_time_s >= 0.0 &&
                        std::isfinite(e.as<SourceDc>().ramp_time_s),
                    e.label, "dc source parameters must be finite, ramp time nonnegative");
        else if (e.is<SourceSine>())
            require(out,
                    std::isfinite(e.as<SourceSine>().amplitude_v) &&
                        detail::finite_positive(e.as<SourceSine>().frequency_hz) &&
                        std::isfinite(e.as<SourceSine>().phase_rad),
                    e.label, "sine source parameters invalid (frequency must be positive)");
        else if (e.is<SourceCurrentDc>())
            require(out,
                    std::isfinite(e.as<SourceCurrentDc>().amps) &&
                        e.as<SourceCurrentDc>().ramp_time_s >= 0.0 &&
                        std::isfinite(e.as<SourceCurrentDc>().ramp_time_s),
                    e.label, "current source parameters must be finite, ramp time nonnegative");
    }

    // Conduction connectivity per domain: ports conduct within their own
    // domain, gyrators never conduct across. Every connected component needs
    // exactly one ground to reference its potentials.
    const int n = circuit.node_count();
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find_root = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    auto unite = [&](NodeRef a, NodeRef b) {
        if (!node_ok(a) || !node_ok(b)) return;
        parent[static_cast<std::size_t>(find_root(a.id))] = find_root(b.id);
    };
    for (const auto& e : circuit.elements()) {
        if (e.is<Gyrator>()) {
            if (e.terminals.size() == 4) {
                unite(e.terminals[0], e.terminals[1]);
                unite(e.terminals[2], e.terminals[3]);
            }
        } else if (e.terminals.size() == 2) {
            unite(e.terminals[0], e.terminals[1]);
        }
    }
    std::vector<int> ground_count(static_cast<std::size_t>(n), 0);
    for (Domain d : {Domain::electrical, Domain::magnetic})
        if (auto g = circuit.ground_id(d); g && *g >= 0 && *g < n)
            ++ground_count[static_cast<std::size_t>(find_root(*g))];
    for (int id = 0; id < n; ++id) {
        const int root = find_root(id);
        if (ground_count[static_cast<std::size_t>(root)] == 0)
            out.push_back({"node " + std::to_string(id),
                           "floating island: not connected to any ground"});
        else if (ground_count[static_cast<std::size_t>(root)] > 1 && id == root)
            out.push_back({"node " + std::to_string(id),
                           "multiple grounds in one connected component"});
    }

    return out;
}

} // namespace gcsim
