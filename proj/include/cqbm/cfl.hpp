#pragma once

// Timestep schedule from per-speed CFL counters, in exact rational
// arithmetic. Grid spacing is 1, so a counter is the fraction of the way to
// the next grid point a particle of that speed has travelled.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <set>
#include <vector>

#include "cqbm/error.hpp"
#include "cqbm/layout.hpp"
#include "cqbm/rational.hpp"

namespace cqbm {

struct CflState {
    std::vector<Rational> magnitudes;  // ascending, distinct
    std::vector<Rational> counters;    // each in [0, 1)
    std::size_t step = 0;

    static CflState start(std::vector<Rational> magnitudes) {
        std::sort(magnitudes.begin(), magnitudes.end());
        magnitudes.erase(std::unique(magnitudes.begin(), magnitudes.end()), magnitudes.end());
        CflState s;
        s.counters.assign(magnitudes.size(), Rational(0));
        s.magnitudes = std::move(magnitudes);
        return s;
    }

    bool at_cycle_boundary() const {
        return std::all_of(counters.begin(), counters.end(), [](const Rational& c) { return c == Rational(0); });
    }
};

struct Timestep {
    Rational dt;
    std::vector<Rational> stepping;  // magnitudes that reach the next grid point
};

struct TimestepResult {
    Timestep step;
    CflState next;
};

inline TimestepResult next_timestep(const CflState& state) {
    if (state.magnitudes.empty()) throw Error("CFL counter needs at least one speed");
    Rational dt = -1;
    for (std::size_t k = 0; k < state.magnitudes.size(); ++k) {
        const Rational candidate = (Rational(1) - state.counters[k]) / state.magnitudes[k];
        if (dt < Rational(0) || candidate < dt) dt = candidate;
    }
    TimestepResult r{{dt, {}}, state};
    for (std::size_t k = 0; k < state.magnitudes.size(); ++k) {
        Rational c = state.counters[k] + state.magnitudes[k] * dt;
        if (c > Rational(1)) throw Error("CFL overshoot");  // unreachable with the min above
        if (c == Rational(1)) {
            c = 0;
            r.step.stepping.push_back(state.magnitudes[k]);
        }
        r.next.counters[k] = c;
    }
    ++r.next.step;
    return r;
}

struct TimestepSchedule {
    std::vector<Timestep> steps;
    Rational total_time = 0;
    std::size_t cycles = 0;
    std::vector<std::size_t> cycle_ends;  // step count at the end of each cycle
};

/// Whole CFL cycles: the schedule ends when every counter is back at zero
/// for the `cycles`-th time, so total_time * |u_k| is an integer for all k.
inline TimestepSchedule build_schedule(const std::vector<Rational>& magnitudes, std::size_t cycles,
                                       std::size_t max_steps = 1'000'000) {
    if (cycles < 1) throw Error("schedule needs at least one cycle");
    CflState state = CflState::start(magnitudes);
    TimestepSchedule s;
    while (s.cycles < cycles) {
        if (s.steps.size() >= max_steps)
            throw Error("CFL cycle does not close within " + std::to_string(max_steps) + " steps");
        auto r = next_timestep(state);
        s.total_time += r.step.dt;
        s.steps.push_back(std::move(r.step));
        state = std::move(r.next);
        if (state.at_cycle_boundary()) {
            ++s.cycles;
            s.cycle_ends.push_back(s.steps.size());
        }
    }
    return s;
}

inline TimestepSchedule build_schedule(const VelocityTable& velocities, std::size_t cycles,
                                       std::size_t max_steps = 1'000'000) {
    return build_schedule(velocities.all_magnitudes(), cycles, max_steps);
}

/// Per dimension, the magnitude indices of `velocities` that step in `t`.
inline std::vector<std::vector<unsigned>> stepping_indices(const VelocityTable& velocities, const Timestep& t) {
    std::vector<std::vector<unsigned>> out(velocities.dims());
    for (unsigned d = 0; d < velocities.dims(); ++d)
        for (const auto& u : t.stepping)
            if (auto idx = velocities.find_magnitude(d, u)) out[d].push_back(*idx);
    for (auto& v : out) std::sort(v.begin(), v.end());
    return out;
}

/// CSV: m, dt (decimal), dt_exact, stepping magnitudes separated by ';'.
inline void write_schedule_csv(std::ostream& os, const TimestepSchedule& s) {
    os << "m,dt,dt_exact,stepping\n";
    for (std::size_t m = 0; m < s.steps.size(); ++m) {
        const auto& t = s.steps[m];
        os << m << ',' << to_double(t.dt) << ',' << to_string(t.dt) << ',';
        for (std::size_t i = 0; i < t.stepping.size(); ++i) os << (i ? ";" : "") << to_string(t.stepping[i]);
        os << '\n';
    }
}

}  // namespace cqbm
