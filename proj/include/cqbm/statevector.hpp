#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <vector>

#include "cqbm/error.hpp"
#include "cqbm/gate.hpp"
#include "cqbm/ledger.hpp"
#include "cqbm/primitive.hpp"

namespace cqbm {

/// Dense vector of 2^n amplitudes.
class StateVector {
public:
    explicit StateVector(unsigned num_qubits, BasisIndex basis = 0)
        : num_qubits_(num_qubits), amplitudes_(std::size_t{1} << num_qubits) {
        if (num_qubits > 30) throw Error("dense state vector limited to 30 qubits");
        if (basis >= amplitudes_.size()) throw Error("basis index out of range");
        amplitudes_[basis] = 1.0;
    }

    static StateVector from_amplitudes(unsigned num_qubits, std::vector<Amplitude> amps) {
        StateVector s(num_qubits);
        if (amps.size() != s.amplitudes_.size()) throw Error("amplitude count must be 2^num_qubits");
        s.amplitudes_ = std::move(amps);
        return s;
    }

    unsigned num_qubits() const { return num_qubits_; }
    std::size_t size() const { return amplitudes_.size(); }
    std::span<const Amplitude> amplitudes() const { return amplitudes_; }
    std::span<Amplitude> amplitudes() { return amplitudes_; }
    Amplitude operator[](BasisIndex i) const { return amplitudes_[i]; }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes_) s += std::norm(a);
        return std::sqrt(s);
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amplitudes_.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amplitudes_[i]);
        return p;
    }

    void apply(const Gate& g);

private:
    unsigned num_qubits_;
    std::vector<Amplitude> amplitudes_;
};

namespace detail {

// Calls f(index) for every basis index whose `fixed` bits equal `base`.
// The free bits are enumerated in increasing order by carrying through the
// fixed positions.
template <class F>
void for_each_with_fixed_bits(unsigned num_qubits, const std::vector<Qubit>& fixed, BasisIndex base, F&& f) {
    BasisIndex fixed_mask = 0;
    for (Qubit p : fixed) fixed_mask |= bit(p);
    const BasisIndex free = ((BasisIndex{1} << num_qubits) - 1) & ~fixed_mask;
    BasisIndex k = 0;
    do {
        f(k | base);
        k = ((k | fixed_mask) + 1) & free;
    } while (k != 0);
}

}  // namespace detail

inline void StateVector::apply(const Gate& g) {
    g.validate(num_qubits_);
    std::vector<Qubit> fixed(g.targets);
    for (const auto& c : g.controls) fixed.push_back(c.qubit);
    const BasisIndex cval = ControlMask::of(g.controls).value;
    auto& a = amplitudes_;
    const BasisIndex t = bit(g.targets[0]);

    switch (g.kind) {
        case GateKind::X:
            detail::for_each_with_fixed_bits(num_qubits_, fixed, cval,
                                             [&](BasisIndex i) { std::swap(a[i], a[i | t]); });
            break;
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            detail::for_each_with_fixed_bits(num_qubits_, fixed, cval, [&](BasisIndex i) {
                const Amplitude u = a[i], v = a[i | t];
                a[i] = r * (u + v);
                a[i | t] = r * (u - v);
            });
            break;
        }
        case GateKind::Phase: {
            const double wr = std::cos(g.theta), wi = std::sin(g.theta);
            detail::for_each_with_fixed_bits(num_qubits_, fixed, cval | t, [&](BasisIndex i) {
                const double re = a[i].real(), im = a[i].imag();
                a[i] = {re * wr - im * wi, re * wi + im * wr};
            });
            break;
        }
        case GateKind::Swap: {
            const BasisIndex u = bit(g.targets[1]);
            detail::for_each_with_fixed_bits(num_qubits_, fixed, cval | t,
                                             [&](BasisIndex i) { std::swap(a[i], a[i ^ t ^ u]); });
            break;
        }
    }
}

inline void apply_gate(StateVector& state, const Gate& gate) { state.apply(gate); }

/// Exact multi-controlled NOT; the ledger is charged under the cost model.
inline void apply_mcx(StateVector& state, std::span<const Control> controls, Qubit target, GateLedger& ledger) {
    if (controls.empty()) throw Error("MCX needs at least one control");
    Gate g = Gate::x(target, {controls.begin(), controls.end()});
    state.apply(g);
    ledger.charge("mcx", cost::mcx(controls.size()));
}

constexpr double kNormTolerance = 1e-8;

inline void check_norm(const StateVector& state, const std::string& where) {
    const double n = state.norm();
    if (!std::isfinite(n)) throw Error("non-finite amplitude after " + where);
    if (std::abs(n - 1.0) > kNormTolerance) {
        std::ostringstream os;
        os << "norm drifted to " << n << " after " << where;
        throw Error(os.str());
    }
}

/// Executes a primitive's gates. Comparators that require a clean result
/// qubit are checked before running; the norm is checked afterwards.
inline void apply_primitive(StateVector& state, const Primitive& p, GateLedger* ledger = nullptr) {
    if (auto* c = std::get_if<semantics::CompareMark>(&p.semantics); c && c->require_clean) {
        double dirty = 0.0;
        const auto amps = state.amplitudes();
        for (BasisIndex i = 0; i < amps.size(); ++i)
            if (i & bit(c->result)) dirty += std::norm(amps[i]);
        if (dirty > 1e-12)
            throw Error(p.label + ": comparator result qubit " + std::to_string(c->result) + " is not |0>");
    }
    for (const auto& g : p.gates) state.apply(g);
    check_norm(state, p.label);
    if (ledger) ledger->charge(p.label, p.cnots);
}

inline void run_dense(StateVector& state, std::span<const Primitive> circuit, GateLedger* ledger = nullptr) {
    for (const auto& p : circuit) apply_primitive(state, p, ledger);
}

using Histogram = std::map<BasisIndex, std::uint64_t>;

/// Draws `shots` outcomes from `probabilities` renormalised over the
/// non-excluded outcomes. Excluded outcomes must carry no more than 1e-9.
inline Histogram measure_sample(std::span<const double> probabilities, std::uint64_t shots, std::uint64_t seed,
                                const std::set<BasisIndex>& excluded = {}) {
    if (shots == 0) throw Error("shots must be positive");
    std::ostringstream leaks;
    std::size_t nleaks = 0;
    for (auto e : excluded) {
        if (e < probabilities.size() && probabilities[e] > 1e-9) {
            if (nleaks++ < 16) leaks << ' ' << e << ':' << probabilities[e];
        }
    }
    if (nleaks)
        throw LeakageError("excluded outcomes carry probability (" + std::to_string(nleaks) +
                           " states):" + leaks.str());

    std::vector<double> cumulative(probabilities.size());
    double total = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (!excluded.contains(i)) total += probabilities[i];
        cumulative[i] = total;
    }
    if (!(total > 0.0)) throw Error("no probability left to sample");

    std::mt19937_64 rng(seed);
    Histogram h;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto idx = static_cast<BasisIndex>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                   static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
        // upper_bound can land on a zero-width (excluded or empty) slot only
        // through rounding; step back to the owning outcome.
        while (idx > 0 && (excluded.contains(idx) || probabilities[idx] == 0.0)) --idx;
        ++h[idx];
    }
    return h;
}

inline Histogram measure_sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed,
                                const std::set<BasisIndex>& excluded = {}) {
    const auto p = state.probabilities();
    return measure_sample(std::span<const double>(p), shots, seed, excluded);
}

}  // namespace cqbm
