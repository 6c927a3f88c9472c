#pragma once

// Classical reference for one timestep: stream each particle one point in
// every dimension whose speed steps, and reflect particles that land inside
// a box. A landing particle is reflected in dimension i exactly when its
// step in i crossed into the box range, i.e. it stepped in i and started
// outside [lo_i, hi_i]. Reflected components reverse and return to their
// starting coordinate; the others keep the landing coordinate.
//
// Nothing here looks at qubits or ancillae.

#include <cmath>
#include <compare>
#include <iomanip>
#include <map>
#include <ostream>
#include <vector>

#include "cqbm/cfl.hpp"
#include "cqbm/error.hpp"
#include "cqbm/layout.hpp"
#include "cqbm/reflection.hpp"

namespace cqbm {

struct ParticleState {
    std::vector<unsigned> position;
    std::vector<unsigned> velocity_code;  // per-dimension velocity encoding

    auto operator<=>(const ParticleState&) const = default;
};

using DistributionState = std::map<ParticleState, double>;

inline ParticleState oracle_move(const ParticleState& s, const std::vector<std::vector<unsigned>>& stepping,
                                 const ObstacleSpec& obstacles, const GridSpec& grid, const VelocityTable& table) {
    const unsigned d = grid.dims();
    if (obstacles.inside(s.position)) throw Error("oracle: mass inside an obstacle at entry");
    std::vector<bool> stepped(d, false);
    ParticleState q = s;
    for (unsigned i = 0; i < d; ++i) {
        const unsigned code = s.velocity_code[i];
        const unsigned idx = table.magnitude_index(i, code);
        stepped[i] = std::find(stepping[i].begin(), stepping[i].end(), idx) != stepping[i].end();
        if (!stepped[i]) continue;
        const unsigned n = grid.points(i);
        q.position[i] = table.positive(i, code) ? (s.position[i] + 1) % n : (s.position[i] + n - 1) % n;
    }
    for (const auto& box : obstacles.boxes) {
        if (!box.contains(q.position)) continue;
        for (unsigned i = 0; i < d; ++i) {
            const bool started_outside = s.position[i] < box.lo[i] || s.position[i] > box.hi[i];
            if (stepped[i] && started_outside) {
                q.position[i] = s.position[i];
                q.velocity_code[i] ^= table.sign_bit(i);
            }
        }
        break;
    }
    return q;
}

inline DistributionState oracle_step(const DistributionState& state, const std::vector<std::vector<unsigned>>& stepping,
                                     const ObstacleSpec& obstacles, const GridSpec& grid, const VelocityTable& table) {
    if (stepping.size() != grid.dims()) throw Error("oracle: stepping sets must be given for every dimension");
    DistributionState next;
    for (const auto& [s, mass] : state) next[oracle_move(s, stepping, obstacles, grid, table)] += mass;
    return next;
}

inline DistributionState oracle_step(const DistributionState& state, const Timestep& step,
                                     const ObstacleSpec& obstacles, const GridSpec& grid, const VelocityTable& table) {
    return oracle_step(state, stepping_indices(table, step), obstacles, grid, table);
}

inline double total_mass(const DistributionState& state) {
    double m = 0;
    for (const auto& [s, mass] : state) m += mass;
    return m;
}

/// Mass per grid point, velocity marginalized; flat index with x fastest.
inline std::vector<double> density_field(const DistributionState& state, const GridSpec& grid) {
    std::vector<double> field(grid.total_points(), 0.0);
    for (const auto& [s, mass] : state) field[grid.flat_index(s.position)] += mass;
    return field;
}

inline void write_density_csv(std::ostream& os, std::span<const double> field, const GridSpec& grid) {
    static constexpr const char* axes[] = {"x", "y", "z"};
    for (unsigned d = 0; d < grid.dims(); ++d) os << axes[d] << ',';
    os << "mass\n";
    os << std::setprecision(17);
    for (std::size_t f = 0; f < field.size(); ++f) {
        for (auto c : grid.position_of(f)) os << c << ',';
        os << field[f] << '\n';
    }
}

}  // namespace cqbm
