#pragma once

// CNOT cost model and per-primitive accounting.
//
// The ledger charges closed-form costs per primitive rather than counting
// the gates the simulator executes. `gate_level_cnots` counts the executed
// gates for comparison; the two agree wherever the closed forms are exact.
//
//   primitive                          CNOTs
//   ---------------------------------  ------------------------------
//   MCX with p controls                0 (p=0), 1 (p=1), 2p^2 (p>=2)
//   phase gate with c controls         2c
//   swap                               3
//   stand-alone QFT on k qubits        k(k-1) + floor(3k/2)
//   QFT/QFT^dagger pair of an adder    2n^2 + n
//   constant comparator on n qubits    4n^2 + 6n + 3

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>

#include "cqbm/gate.hpp"

namespace cqbm {

namespace cost {

constexpr std::uint64_t mcx(std::uint64_t p) { return p == 0 ? 0 : p == 1 ? 1 : 2 * p * p; }
constexpr std::uint64_t controlled_phase(std::uint64_t controls) { return 2 * controls; }
constexpr std::uint64_t swap() { return 3; }
constexpr std::uint64_t qft(std::uint64_t k) { return k * (k - 1) + (3 * k) / 2; }
constexpr std::uint64_t adder_basis_change(std::uint64_t n) { return 2 * n * n + n; }
constexpr std::uint64_t comparator(std::uint64_t n) { return 4 * n * n + 6 * n + 3; }

/// CNOTs needed by one executed gate under the same decomposition rules.
inline std::uint64_t gate_level(const Gate& g) {
    switch (g.kind) {
        case GateKind::X: return mcx(g.controls.size());
        case GateKind::H: return g.controls.empty() ? 0 : 2 * g.controls.size();
        case GateKind::Phase: return controlled_phase(g.controls.size());
        case GateKind::Swap:
            // Controlled swap: CNOT, C^{c+1}NOT, CNOT.
            return g.controls.empty() ? swap() : 2 + mcx(g.controls.size() + 1);
    }
    return 0;
}

}  // namespace cost

inline std::uint64_t gate_level_cnots(std::span<const Gate> gates) {
    std::uint64_t n = 0;
    for (const auto& g : gates) n += cost::gate_level(g);
    return n;
}

class GateLedger {
public:
    void charge(const std::string& label, std::uint64_t cnots) {
        breakdown_[label] += cnots;
        total_ += cnots;
    }

    std::uint64_t cnot_count() const { return total_; }
    const std::map<std::string, std::uint64_t>& breakdown() const { return breakdown_; }

    std::uint64_t count(const std::string& label) const {
        auto it = breakdown_.find(label);
        return it == breakdown_.end() ? 0 : it->second;
    }

    GateLedger& operator+=(const GateLedger& other) {
        for (const auto& [label, n] : other.breakdown_) charge(label, n);
        return *this;
    }

    friend GateLedger operator+(GateLedger a, const GateLedger& b) { return a += b; }
    friend bool operator==(const GateLedger&, const GateLedger&) = default;

    void print(std::ostream& os) const {
        for (const auto& [label, n] : breakdown_) os << label << ',' << n << '\n';
        os << "total," << total_ << '\n';
    }

private:
    std::map<std::string, std::uint64_t> breakdown_;
    std::uint64_t total_ = 0;
};

}  // namespace cqbm
