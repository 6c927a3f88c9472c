#pragma once

// Register map and the position/velocity encodings.
//
// Qubit order, lowest index first:
//   velocity magnitude bits of x, y[, z]   (per dimension, LSB first)
//   velocity direction bits v_dir,x, v_dir,y[, v_dir,z]
//   grid bits of x, y[, z]                 (per dimension, LSB first)
//   a_v,i (d)   a_o,i (d)   a_l,k / a_u,k pairs (d-1)
//
// A per-dimension velocity code is the integer (v_dir << m) | magnitude
// index, with m magnitude bits: v_dir = 1 is the positive direction and
// magnitude index 0 is the smallest speed. Flipping v_dir negates the speed.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cqbm/error.hpp"
#include "cqbm/gate.hpp"
#include "cqbm/primitive.hpp"
#include "cqbm/rational.hpp"

namespace cqbm {

inline const char* dim_name(unsigned d) {
    static constexpr const char* names[] = {"x", "y", "z"};
    return d < 3 ? names[d] : "?";
}

struct GridSpec {
    std::vector<unsigned> qubits_per_dim;  // n_g_i; 2^n_g_i points, unit spacing

    unsigned dims() const { return static_cast<unsigned>(qubits_per_dim.size()); }
    unsigned points(unsigned dim) const { return 1u << qubits_per_dim.at(dim); }

    std::size_t total_points() const {
        std::size_t n = 1;
        for (unsigned d = 0; d < dims(); ++d) n *= points(d);
        return n;
    }

    /// Row-major flat index: x fastest.
    std::size_t flat_index(std::span<const unsigned> pos) const {
        std::size_t idx = 0, stride = 1;
        for (unsigned d = 0; d < dims(); ++d) {
            idx += pos[d] * stride;
            stride *= points(d);
        }
        return idx;
    }

    std::vector<unsigned> position_of(std::size_t flat) const {
        std::vector<unsigned> pos(dims());
        for (unsigned d = 0; d < dims(); ++d) {
            pos[d] = static_cast<unsigned>(flat % points(d));
            flat /= points(d);
        }
        return pos;
    }
};

class VelocityTable {
public:
    VelocityTable() = default;

    /// Positive, distinct magnitudes per dimension (any order).
    explicit VelocityTable(std::vector<std::vector<Rational>> magnitudes) : magnitudes_(std::move(magnitudes)) {
        for (auto& m : magnitudes_) {
            if (m.empty()) throw Error("every dimension needs at least one speed magnitude");
            std::sort(m.begin(), m.end());
            if (m.front() <= Rational(0)) throw Error("speed magnitudes must be positive");
            if (std::adjacent_find(m.begin(), m.end()) != m.end())
                throw Error("speed magnitudes must be distinct");
        }
    }

    unsigned dims() const { return static_cast<unsigned>(magnitudes_.size()); }
    std::span<const Rational> magnitudes(unsigned dim) const { return magnitudes_.at(dim); }
    unsigned count(unsigned dim) const { return static_cast<unsigned>(magnitudes_.at(dim).size()); }

    /// ceil(log2 M) with a minimum of one bit.
    unsigned magnitude_qubits(unsigned dim) const {
        const unsigned m = count(dim);
        return std::max(1u, static_cast<unsigned>(std::bit_width(m - 1)));
    }
    unsigned qubits(unsigned dim) const { return 1 + magnitude_qubits(dim); }
    unsigned sign_bit(unsigned dim) const { return 1u << magnitude_qubits(dim); }
    unsigned codes(unsigned dim) const { return 1u << qubits(dim); }

    bool positive(unsigned dim, unsigned code) const { return (code & sign_bit(dim)) != 0; }
    unsigned magnitude_index(unsigned dim, unsigned code) const { return code & (sign_bit(dim) - 1); }

    /// Constant spacing between consecutive magnitudes, if there is one.
    std::optional<Rational> delta_u(unsigned dim) const {
        const auto& m = magnitudes_.at(dim);
        if (m.size() < 2) return std::nullopt;
        const Rational d = m[1] - m[0];
        for (std::size_t i = 2; i < m.size(); ++i)
            if (m[i] - m[i - 1] != d) return std::nullopt;
        return d;
    }

    /// -u_max ... -u_min, u_min ... u_max.
    std::vector<Rational> ordered_speeds(unsigned dim) const {
        const auto& m = magnitudes_.at(dim);
        std::vector<Rational> out;
        for (auto it = m.rbegin(); it != m.rend(); ++it) out.push_back(-*it);
        out.insert(out.end(), m.begin(), m.end());
        return out;
    }

    /// Largest ratio of per-dimension top speeds.
    Rational c_rel() const {
        Rational r = 1;
        for (unsigned i = 0; i < dims(); ++i)
            for (unsigned j = 0; j < dims(); ++j) r = std::max(r, magnitudes_[i].back() / magnitudes_[j].back());
        return r;
    }

    /// Distinct magnitudes over all dimensions, ascending.
    std::vector<Rational> all_magnitudes() const {
        std::vector<Rational> all;
        for (const auto& m : magnitudes_) all.insert(all.end(), m.begin(), m.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        return all;
    }

    std::optional<unsigned> find_magnitude(unsigned dim, const Rational& magnitude) const {
        const auto& m = magnitudes_.at(dim);
        auto it = std::find(m.begin(), m.end(), magnitude);
        if (it == m.end()) return std::nullopt;
        return static_cast<unsigned>(it - m.begin());
    }

    unsigned encode(unsigned dim, const Rational& speed) const {
        auto idx = find_magnitude(dim, speed < Rational(0) ? -speed : speed);
        if (!idx || speed == Rational(0))
            throw Error("speed " + to_string(speed) + " is not in the velocity table of dimension " + dim_name(dim));
        return (speed > Rational(0) ? sign_bit(dim) : 0u) | *idx;
    }

    /// Signed speed of a code; empty for padding codes beyond the table.
    std::optional<Rational> decode(unsigned dim, unsigned code) const {
        const unsigned idx = magnitude_index(dim, code);
        if (idx >= count(dim)) return std::nullopt;
        const Rational& u = magnitudes_[dim][idx];
        return positive(dim, code) ? u : -u;
    }

private:
    std::vector<std::vector<Rational>> magnitudes_;
};

inline unsigned encode_velocity(const VelocityTable& table, unsigned dim, const Rational& speed) {
    return table.encode(dim, speed);
}

struct DimRegisters {
    std::vector<Qubit> magnitude;
    Qubit direction = 0;
    std::vector<Qubit> grid;
    Qubit stepped = 0;  // a_v,i
    Qubit reflect = 0;  // a_o,i
};

struct ComparatorPair {
    Qubit lower = 0;  // a_l: holds value >= l
    Qubit upper = 0;  // a_u: holds value <= u
};

struct DecodedState {
    std::vector<unsigned> position;
    std::vector<unsigned> velocity_code;
    std::vector<std::optional<Rational>> velocity;
    std::uint64_t ancillae = 0;  // ancilla block, lowest ancilla qubit first
};

class RegisterLayout {
public:
    RegisterLayout(GridSpec grid, VelocityTable velocities) : grid_(std::move(grid)), velocities_(std::move(velocities)) {
        const unsigned d = grid_.dims();
        Qubit next = 0;
        dims_.resize(d);
        for (unsigned i = 0; i < d; ++i)
            for (unsigned b = 0; b < velocities_.magnitude_qubits(i); ++b) dims_[i].magnitude.push_back(next++);
        for (unsigned i = 0; i < d; ++i) dims_[i].direction = next++;
        for (unsigned i = 0; i < d; ++i)
            for (unsigned b = 0; b < grid_.qubits_per_dim[i]; ++b) dims_[i].grid.push_back(next++);
        first_ancilla_ = next;
        for (unsigned i = 0; i < d; ++i) dims_[i].stepped = next++;
        for (unsigned i = 0; i < d; ++i) dims_[i].reflect = next++;
        for (unsigned k = 0; k + 1 < d; ++k) {
            ComparatorPair p;
            p.lower = next++;
            p.upper = next++;
            comparators_.push_back(p);
        }
        total_ = next;
    }

    const GridSpec& grid() const { return grid_; }
    const VelocityTable& velocities() const { return velocities_; }
    unsigned dims() const { return grid_.dims(); }
    const DimRegisters& dim(unsigned i) const { return dims_.at(i); }
    const std::vector<ComparatorPair>& comparators() const { return comparators_; }
    unsigned total_qubits() const { return total_; }
    unsigned num_ancillae() const { return total_ - first_ancilla_; }
    Qubit first_ancilla() const { return first_ancilla_; }

    BasisIndex ancilla_mask() const { return ((BasisIndex{1} << total_) - 1) & ~(bit(first_ancilla_) - 1); }

    std::vector<std::string> roles() const {
        std::vector<std::string> r(total_);
        for (unsigned i = 0; i < dims(); ++i) {
            const auto& dr = dims_[i];
            const std::string n = dim_name(i);
            for (std::size_t b = 0; b < dr.magnitude.size(); ++b)
                r[dr.magnitude[b]] = "v.mag." + n + "[" + std::to_string(b) + "]";
            r[dr.direction] = "v.dir." + n;
            for (std::size_t b = 0; b < dr.grid.size(); ++b) r[dr.grid[b]] = "g." + n + "[" + std::to_string(b) + "]";
            r[dr.stepped] = "a_v." + n;
            r[dr.reflect] = "a_o." + n;
        }
        for (std::size_t k = 0; k < comparators_.size(); ++k) {
            r[comparators_[k].lower] = "a_l." + std::to_string(k);
            r[comparators_[k].upper] = "a_u." + std::to_string(k);
        }
        return r;
    }

    void summary(std::ostream& os) const {
        os << "qubits " << total_ << " (ancillae " << num_ancillae() << ")\n";
        const auto r = roles();
        for (Qubit q = 0; q < total_; ++q) os << 'q' << q << ' ' << r[q] << '\n';
    }

    BasisIndex encode(std::span<const unsigned> position, std::span<const unsigned> velocity_code,
                      std::uint64_t ancillae = 0) const {
        BasisIndex idx = 0;
        for (unsigned i = 0; i < dims(); ++i) {
            const auto& dr = dims_[i];
            if (position[i] >= grid_.points(i)) throw Error("position out of grid");
            if (velocity_code[i] >= velocities_.codes(i)) throw Error("velocity code out of range");
            idx = write_register(idx, dr.grid, position[i]);
            idx = write_register(idx, dr.magnitude, velocities_.magnitude_index(i, velocity_code[i]));
            if (velocities_.positive(i, velocity_code[i])) idx |= bit(dr.direction);
        }
        return idx | (BasisIndex{ancillae} << first_ancilla_);
    }

    BasisIndex encode(const DecodedState& s) const { return encode(s.position, s.velocity_code, s.ancillae); }

    unsigned position(BasisIndex index, unsigned dim) const {
        return static_cast<unsigned>(read_register(index, dims_[dim].grid));
    }

    unsigned velocity_code(BasisIndex index, unsigned dim) const {
        const auto& dr = dims_[dim];
        unsigned code = static_cast<unsigned>(read_register(index, dr.magnitude));
        if (index & bit(dr.direction)) code |= velocities_.sign_bit(dim);
        return code;
    }

    DecodedState decode(BasisIndex index) const {
        DecodedState s;
        for (unsigned i = 0; i < dims(); ++i) {
            s.position.push_back(position(index, i));
            s.velocity_code.push_back(velocity_code(index, i));
            s.velocity.push_back(velocities_.decode(i, s.velocity_code.back()));
        }
        s.ancillae = index >> first_ancilla_;
        return s;
    }

private:
    GridSpec grid_;
    VelocityTable velocities_;
    std::vector<DimRegisters> dims_;
    std::vector<ComparatorPair> comparators_;
    Qubit first_ancilla_ = 0;
    unsigned total_ = 0;
};

inline RegisterLayout build_layout(const GridSpec& grid, const VelocityTable& velocities) {
    if (grid.dims() != 2 && grid.dims() != 3) throw Error("only 2 or 3 spatial dimensions are supported");
    if (velocities.dims() != grid.dims()) throw Error("velocity table and grid disagree on dimension");
    for (auto n : grid.qubits_per_dim)
        if (n < 1 || n > 20) throw Error("grid needs between 1 and 20 qubits per dimension");
    if (velocities.c_rel() > Rational(1))
        throw Error("c_rel = " + to_string(velocities.c_rel()) + " > 1 is not supported");
    RegisterLayout layout(grid, velocities);
    if (layout.total_qubits() > 63) throw Error("layout exceeds 63 qubits");
    return layout;
}

}  // namespace cqbm
