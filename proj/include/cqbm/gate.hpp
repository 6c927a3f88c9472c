#pragma once

// Gate alphabet shared by the circuit builders and both simulator backends.
//
// Qubit 0 is the least significant bit of a basis index. A ket written
// |q_{n-1} ... q_1 q_0> therefore reads the basis index in ordinary binary.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cqbm/error.hpp"

namespace cqbm {

using Qubit = std::uint32_t;
using BasisIndex = std::uint64_t;
using Amplitude = std::complex<double>;

constexpr BasisIndex bit(Qubit q) { return BasisIndex{1} << q; }

struct Control {
    Qubit qubit = 0;
    bool on_one = true;  // false: fires when the qubit is |0>

    friend bool operator==(const Control&, const Control&) = default;
};

inline Control on(Qubit q) { return {q, true}; }
inline Control off(Qubit q) { return {q, false}; }

/// Mask/value pair such that a basis index satisfies every control iff
/// (index & mask) == value.
struct ControlMask {
    BasisIndex mask = 0;
    BasisIndex value = 0;

    bool matches(BasisIndex index) const { return (index & mask) == value; }

    static ControlMask of(std::span<const Control> controls) {
        ControlMask m;
        for (const auto& c : controls) {
            m.mask |= bit(c.qubit);
            if (c.on_one) m.value |= bit(c.qubit);
        }
        return m;
    }
};

enum class GateKind { X, H, Phase, Swap };

inline const char* name(GateKind k) {
    switch (k) {
        case GateKind::X: return "X";
        case GateKind::H: return "H";
        case GateKind::Phase: return "P";
        case GateKind::Swap: return "SWAP";
    }
    return "?";
}

struct Gate {
    GateKind kind = GateKind::X;
    std::vector<Qubit> targets;
    std::vector<Control> controls;
    double theta = 0.0;  // Phase only

    static Gate x(Qubit t, std::vector<Control> c = {}) { return {GateKind::X, {t}, std::move(c), 0.0}; }
    static Gate h(Qubit t) { return {GateKind::H, {t}, {}, 0.0}; }
    static Gate phase(Qubit t, double theta, std::vector<Control> c = {}) {
        return {GateKind::Phase, {t}, std::move(c), theta};
    }
    static Gate swap(Qubit a, Qubit b) { return {GateKind::Swap, {a, b}, {}, 0.0}; }

    Gate inverse() const {
        Gate g = *this;
        if (kind == GateKind::Phase) g.theta = -theta;
        return g;
    }

    /// Throws unless every index is in range, targets and controls are
    /// disjoint and the angle is finite.
    void validate(unsigned num_qubits) const {
        const std::size_t want = kind == GateKind::Swap ? 2 : 1;
        if (targets.size() != want) throw Error(std::string(name(kind)) + ": wrong number of targets");
        BasisIndex seen = 0;
        auto claim = [&](Qubit q) {
            if (q >= num_qubits)
                throw Error(std::string(name(kind)) + ": qubit index " + std::to_string(q) +
                            " out of range for " + std::to_string(num_qubits) + " qubits");
            if (seen & bit(q))
                throw Error(std::string(name(kind)) + ": qubit " + std::to_string(q) +
                            " used twice (targets and controls must be disjoint)");
            seen |= bit(q);
        };
        for (auto t : targets) claim(t);
        for (const auto& c : controls) claim(c.qubit);
        if (!std::isfinite(theta)) throw Error("P: non-finite angle");
    }
};

/// One trace line: kind, targets, controls (~q marks a control on |0>), theta.
inline std::string to_string(const Gate& g) {
    std::ostringstream os;
    os << name(g.kind) << " t=";
    for (std::size_t i = 0; i < g.targets.size(); ++i) os << (i ? "," : "") << g.targets[i];
    os << " c=[";
    for (std::size_t i = 0; i < g.controls.size(); ++i)
        os << (i ? "," : "") << (g.controls[i].on_one ? "" : "~") << g.controls[i].qubit;
    os << ']';
    if (g.kind == GateKind::Phase) os << " theta=" << std::setprecision(17) << g.theta;
    return os.str();
}

inline void dump_trace(std::ostream& os, std::span<const Gate> gates) {
    for (const auto& g : gates) os << to_string(g) << '\n';
}

}  // namespace cqbm
