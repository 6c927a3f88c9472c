#pragma once

// End-to-end driver: JSON configuration, initial-state preparation, the
// timestep loop on the dense or permutation backend with ancilla and
// leakage audits after every step, measurement sampling, and the artifacts
// written by `run`.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cqbm/cfl.hpp"
#include "cqbm/error.hpp"
#include "cqbm/layout.hpp"
#include "cqbm/oracle.hpp"
#include "cqbm/permutation.hpp"
#include "cqbm/reflection.hpp"
#include "cqbm/statevector.hpp"

namespace cqbm {

enum class Backend { Auto, Dense, Permutation };
enum class ExcludePolicy { None, ObstacleInterior };

/// Largest layout the dense backend accepts.
constexpr unsigned kDenseQubitLimit = 24;

/// Single-qubit preparation actions. Per-dimension lists are LSB first; a
/// missing entry means "none".
struct PrepSpec {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::vector<std::string>> velocity_magnitude;
    std::vector<std::string> velocity_sign;
    std::map<unsigned, std::string> qubits;  // raw qubit index -> action
};

struct RunSpec {
    std::size_t cycles = 1;
    std::vector<std::size_t> snapshots;  // timestep counts; empty means the final step only
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    Backend backend = Backend::Auto;
    ExcludePolicy exclude = ExcludePolicy::None;
    bool pgm = false;
    bool oracle_diff = false;
};

struct Config {
    GridSpec grid;
    VelocityTable velocities;
    ObstacleSpec obstacles;
    PrepSpec prep;
    RunSpec run;
};

inline Backend parse_backend(const std::string& s) {
    if (s == "auto") return Backend::Auto;
    if (s == "dense") return Backend::Dense;
    if (s == "perm" || s == "permutation") return Backend::Permutation;
    throw Error("unknown backend '" + s + "' (expected dense, perm or auto)");
}

inline ExcludePolicy parse_exclude(const std::string& s) {
    if (s == "none") return ExcludePolicy::None;
    if (s == "obstacle-interior") return ExcludePolicy::ObstacleInterior;
    throw Error("unknown exclude policy '" + s + "' (expected none or obstacle-interior)");
}

namespace detail {

inline Rational magnitude_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw Error("speed magnitudes must be integers or strings such as \"1/2\"");
}

inline std::vector<std::string> actions_from_json(const nlohmann::json& j) {
    std::vector<std::string> out;
    for (const auto& a : j) out.push_back(a.get<std::string>());
    return out;
}

}  // namespace detail

inline Config parse_config(const nlohmann::json& j) {
    Config c;
    try {
        const auto& g = j.at("grid");
        c.grid.qubits_per_dim = g.at("qubits_per_dim").get<std::vector<unsigned>>();
        if (g.contains("d") && g.at("d").get<unsigned>() != c.grid.dims())
            throw Error("grid.d disagrees with the length of grid.qubits_per_dim");

        std::vector<std::vector<Rational>> mags;
        for (const auto& dim : j.at("velocities").at("magnitudes")) {
            mags.emplace_back();
            for (const auto& m : dim) mags.back().push_back(detail::magnitude_from_json(m));
        }
        c.velocities = VelocityTable(std::move(mags));

        if (j.contains("obstacles"))
            for (const auto& o : j.at("obstacles")) {
                Box b;
                if (o.contains("lo")) {
                    b.lo = o.at("lo").get<std::vector<unsigned>>();
                    b.hi = o.at("hi").get<std::vector<unsigned>>();
                } else {
                    b.lo = o.at("corner").get<std::vector<unsigned>>();
                    const auto size = o.at("size").get<std::vector<unsigned>>();
                    if (size.size() != b.lo.size()) throw Error("obstacle corner and size differ in length");
                    for (std::size_t i = 0; i < size.size(); ++i) {
                        if (size[i] == 0) throw Error("obstacle size must be positive");
                        b.hi.push_back(b.lo[i] + size[i] - 1);
                    }
                }
                c.obstacles.boxes.push_back(std::move(b));
            }

        if (j.contains("prep")) {
            const auto& p = j.at("prep");
            if (p.contains("grid"))
                for (const auto& d : p.at("grid")) c.prep.grid.push_back(detail::actions_from_json(d));
            if (p.contains("velocity_magnitude"))
                for (const auto& d : p.at("velocity_magnitude"))
                    c.prep.velocity_magnitude.push_back(detail::actions_from_json(d));
            if (p.contains("velocity_sign")) c.prep.velocity_sign = detail::actions_from_json(p.at("velocity_sign"));
            if (p.contains("qubits"))
                for (const auto& [k, v] : p.at("qubits").items())
                    c.prep.qubits[static_cast<unsigned>(std::stoul(k))] = v.get<std::string>();
        }

        if (j.contains("run")) {
            const auto& r = j.at("run");
            c.run.cycles = r.value("cycles", std::size_t{1});
            if (r.contains("snapshots")) c.run.snapshots = r.at("snapshots").get<std::vector<std::size_t>>();
            c.run.shots = r.value("shots", std::uint64_t{0});
            c.run.seed = r.value("seed", std::uint64_t{0});
            c.run.backend = parse_backend(r.value("backend", std::string("auto")));
            c.run.exclude = parse_exclude(r.value("exclude", std::string("none")));
            c.run.pgm = r.value("pgm", false);
            c.run.oracle_diff = r.value("oracle_diff", false);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid configuration: ") + e.what());
    }
    if (c.velocities.dims() != c.grid.dims()) throw Error("velocities and grid disagree on dimension");
    validate_obstacles(c.obstacles, c.grid);
    return c;
}

inline Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open configuration " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

/// Resolves the prep settings to one action per qubit: 0 none, 1 X, 2 H.
inline std::vector<int> prep_actions(const PrepSpec& prep, const RegisterLayout& layout) {
    std::vector<int> act(layout.total_qubits(), 0);
    std::vector<bool> set(layout.total_qubits(), false);
    auto assign = [&](Qubit q, const std::string& a) {
        int v;
        if (a == "none" || a == "I") v = 0;
        else if (a == "X") v = 1;
        else if (a == "H") v = 2;
        else throw Error("unknown prep action '" + a + "' (expected H, X or none)");
        if (q >= layout.total_qubits()) throw Error("prep names qubit " + std::to_string(q) + " beyond the layout");
        if (q >= layout.first_ancilla() && v != 0)
            throw Error("prep acts on ancilla qubit " + std::to_string(q) + "; ancillae must start in |0>");
        if (set[q] && act[q] != v) throw Error("conflicting prep actions on qubit " + std::to_string(q));
        set[q] = true;
        act[q] = v;
    };
    auto per_dim = [&](const std::vector<std::vector<std::string>>& lists, auto qubits_of, const char* what) {
        if (lists.size() > layout.dims()) throw Error(std::string("prep.") + what + " lists more dimensions than the grid");
        for (unsigned d = 0; d < lists.size(); ++d) {
            const std::vector<Qubit>& qs = qubits_of(d);
            if (lists[d].size() > qs.size())
                throw Error(std::string("prep.") + what + "[" + std::to_string(d) + "] lists more qubits than exist");
            for (std::size_t b = 0; b < lists[d].size(); ++b) assign(qs[b], lists[d][b]);
        }
    };
    per_dim(prep.grid, [&](unsigned d) -> const std::vector<Qubit>& { return layout.dim(d).grid; }, "grid");
    per_dim(prep.velocity_magnitude, [&](unsigned d) -> const std::vector<Qubit>& { return layout.dim(d).magnitude; },
            "velocity_magnitude");
    if (prep.velocity_sign.size() > layout.dims()) throw Error("prep.velocity_sign lists more dimensions than the grid");
    for (unsigned d = 0; d < prep.velocity_sign.size(); ++d) assign(layout.dim(d).direction, prep.velocity_sign[d]);
    for (const auto& [q, a] : prep.qubits) assign(q, a);
    return act;
}

inline std::vector<Gate> prep_gates(const PrepSpec& prep, const RegisterLayout& layout) {
    const auto act = prep_actions(prep, layout);
    std::vector<Gate> g;
    for (Qubit q = 0; q < act.size(); ++q) {
        if (act[q] == 1) g.push_back(Gate::x(q));
        if (act[q] == 2) g.push_back(Gate::h(q));
    }
    return g;
}

/// The prepared product state as a sparse map.
inline SparseState prepare_sparse_state(const PrepSpec& prep, const RegisterLayout& layout) {
    const auto act = prep_actions(prep, layout);
    BasisIndex base = 0;
    std::vector<Qubit> hs;
    for (Qubit q = 0; q < act.size(); ++q) {
        if (act[q] == 1) base |= bit(q);
        if (act[q] == 2) hs.push_back(q);
    }
    if (hs.size() > 30) throw Error("prepared superposition too large for the sparse backend");
    const double amp = std::pow(std::sqrt(0.5), static_cast<double>(hs.size()));
    SparseState s;
    for (BasisIndex k = 0; k < (BasisIndex{1} << hs.size()); ++k) {
        BasisIndex idx = base;
        for (std::size_t j = 0; j < hs.size(); ++j)
            if (k & (BasisIndex{1} << j)) idx |= bit(hs[j]);
        s.emplace(idx, Amplitude(amp, 0.0));
    }
    return s;
}

inline StateVector prepare_dense_state(const PrepSpec& prep, const RegisterLayout& layout) {
    StateVector s(layout.total_qubits());
    for (const auto& g : prep_gates(prep, layout)) s.apply(g);
    return s;
}

using QuantumState = std::variant<StateVector, SparseState>;

inline QuantumState prepare_initial_state(const PrepSpec& prep, const RegisterLayout& layout, Backend backend) {
    if (backend == Backend::Dense) return prepare_dense_state(prep, layout);
    return prepare_sparse_state(prep, layout);
}

inline Backend resolve_backend(Backend requested, const RegisterLayout& layout) {
    if (requested == Backend::Auto)
        return layout.total_qubits() <= kDenseQubitLimit ? Backend::Dense : Backend::Permutation;
    if (requested == Backend::Dense && layout.total_qubits() > kDenseQubitLimit)
        throw Error("dense backend is limited to " + std::to_string(kDenseQubitLimit) + " qubits; layout has " +
                    std::to_string(layout.total_qubits()) + ", use the permutation backend");
    return requested;
}

/// Calls f(index, probability) for every basis state with nonzero weight.
template <class F>
void for_each_probability(const QuantumState& state, F&& f) {
    if (auto* dense = std::get_if<StateVector>(&state)) {
        const auto amps = dense->amplitudes();
        for (BasisIndex i = 0; i < amps.size(); ++i) {
            const double p = std::norm(amps[i]);
            if (p > 0.0) f(i, p);
        }
    } else {
        for (const auto& [i, a] : std::get<SparseState>(state)) f(i, std::norm(a));
    }
}

/// Probability mass below which dense-backend rounding residue is ignored
/// when building a classical distribution.
constexpr double kNegligibleMass = 1e-14;
/// Audit tolerance for ancilla and obstacle-interior mass.
constexpr double kAuditTolerance = 1e-9;

inline DistributionState particle_distribution(const QuantumState& state, const RegisterLayout& layout) {
    DistributionState out;
    const BasisIndex anc = layout.ancilla_mask();
    for_each_probability(state, [&](BasisIndex i, double p) {
        if (p <= kNegligibleMass || (i & anc)) return;
        const auto d = layout.decode(i);
        out[ParticleState{d.position, d.velocity_code}] += p;
    });
    return out;
}

/// Grid marginal of the quantum state (ancillae and velocity traced out).
inline std::vector<double> grid_probabilities(const QuantumState& state, const RegisterLayout& layout) {
    std::vector<double> field(layout.grid().total_points(), 0.0);
    std::vector<unsigned> pos(layout.dims());
    for_each_probability(state, [&](BasisIndex i, double p) {
        for (unsigned d = 0; d < layout.dims(); ++d) pos[d] = layout.position(i, d);
        field[layout.grid().flat_index(pos)] += p;
    });
    return field;
}

/// Flat grid indices inside any obstacle.
inline std::set<BasisIndex> obstacle_interior_points(const ObstacleSpec& obstacles, const GridSpec& grid) {
    std::set<BasisIndex> out;
    for (std::size_t f = 0; f < grid.total_points(); ++f)
        if (obstacles.inside(grid.position_of(f))) out.insert(f);
    return out;
}

inline double max_abs_deviation(const DistributionState& a, const DistributionState& b) {
    double m = 0.0;
    for (const auto& [s, p] : a) {
        auto it = b.find(s);
        m = std::max(m, std::abs(p - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto& [s, p] : b)
        if (!a.contains(s)) m = std::max(m, p);
    return m;
}

struct AuditResult {
    std::size_t step = 0;
    double ancilla_mass = 0.0;
    double obstacle_mass = 0.0;
    std::vector<BasisIndex> offenders;  // up to a handful of offending basis states
    bool ok() const { return ancilla_mass <= kAuditTolerance && obstacle_mass <= kAuditTolerance; }
};

class Simulation {
public:
    Simulation(Config config, QuantumState initial, Backend backend)
        : config_(std::move(config)),
          layout_(build_layout(config_.grid, config_.velocities)),
          geometry_(derive_walls_and_rules(config_.obstacles, config_.grid)),
          schedule_(build_schedule(config_.velocities, config_.run.cycles)),
          backend_(resolve_backend(backend, layout_)),
          state_(std::move(initial)) {
        if (backend_ == Backend::Dense && !std::holds_alternative<StateVector>(state_)) {
            const auto& sparse = std::get<SparseState>(state_);
            std::vector<Amplitude> amps(std::size_t{1} << layout_.total_qubits());
            for (const auto& [i, a] : sparse) amps.at(i) = a;
            state_ = StateVector::from_amplitudes(layout_.total_qubits(), std::move(amps));
        }
        if (backend_ == Backend::Permutation && std::holds_alternative<StateVector>(state_)) {
            SparseState sparse;
            const auto amps = std::get<StateVector>(state_).amplitudes();
            for (BasisIndex i = 0; i < amps.size(); ++i)
                if (amps[i] != Amplitude(0.0, 0.0)) sparse.emplace(i, amps[i]);
            state_ = std::move(sparse);
        }
        if (auto* dense = std::get_if<StateVector>(&state_); dense && dense->num_qubits() != layout_.total_qubits())
            throw Error("initial state width does not match the layout");
    }

    explicit Simulation(Config config)
        : Simulation(config, QuantumState(SparseState{}), config.run.backend) {
        state_ = backend_ == Backend::Dense ? QuantumState(prepare_dense_state(config_.prep, layout_))
                                            : QuantumState(prepare_sparse_state(config_.prep, layout_));
    }

    const Config& config() const { return config_; }
    const RegisterLayout& layout() const { return layout_; }
    const WallsAndRules& geometry() const { return geometry_; }
    const TimestepSchedule& schedule() const { return schedule_; }
    Backend backend() const { return backend_; }
    const QuantumState& state() const { return state_; }
    std::size_t steps_done() const { return done_; }
    std::size_t total_steps() const { return schedule_.steps.size(); }
    const GateLedger& ledger() const { return ledger_; }
    const std::vector<GateLedger>& step_ledgers() const { return step_ledgers_; }
    /// Same breakdown counted gate by gate over the executed gates.
    const std::vector<GateLedger>& executed_ledgers() const { return executed_ledgers_; }

    /// Circuit of timestep m (cached per stepping pattern).
    const Circuit& circuit_for_step(std::size_t m) {
        const auto stepping = stepping_indices(layout_.velocities(), schedule_.steps.at(m));
        auto it = circuits_.find(stepping);
        if (it == circuits_.end()) it = circuits_.emplace(stepping, build_timestep(layout_, geometry_, stepping)).first;
        return it->second;
    }

    /// Advances one timestep, then audits. Throws AncillaError or
    /// LeakageError when the audit fails.
    AuditResult step() {
        if (done_ >= total_steps()) throw Error("schedule exhausted");
        const Circuit& c = circuit_for_step(done_);
        GateLedger l;
        if (auto* dense = std::get_if<StateVector>(&state_)) {
            run_dense(*dense, c, &l);
        } else {
            auto& sparse = std::get<SparseState>(state_);
            sparse = run_permutation_backend(sparse, c, &l);
        }
        ledger_ += l;
        step_ledgers_.push_back(std::move(l));
        GateLedger executed;
        for (const auto& p : c) executed.charge(p.label, gate_level_cnots(p.gates));
        executed_ledgers_.push_back(std::move(executed));
        ++done_;
        AuditResult a = audit();
        if (!a.ok()) {
            std::ostringstream os;
            os << "timestep " << done_ << ": ancilla mass " << a.ancilla_mass << ", obstacle mass " << a.obstacle_mass
               << "; offending basis states:";
            for (auto i : a.offenders) os << ' ' << i;
            if (a.ancilla_mass > kAuditTolerance) throw AncillaError(os.str());
            throw LeakageError(os.str());
        }
        return a;
    }

    AuditResult audit() const {
        AuditResult a;
        a.step = done_;
        const BasisIndex anc = layout_.ancilla_mask();
        std::vector<unsigned> pos(layout_.dims());
        for_each_probability(state_, [&](BasisIndex i, double p) {
            bool bad = false;
            if (i & anc) {
                a.ancilla_mass += p;
                bad = p > kNegligibleMass;
            }
            for (unsigned d = 0; d < layout_.dims(); ++d) pos[d] = layout_.position(i, d);
            if (config_.obstacles.inside(pos)) {
                a.obstacle_mass += p;
                bad = bad || p > kNegligibleMass;
            }
            if (bad && a.offenders.size() < 16) a.offenders.push_back(i);
        });
        return a;
    }

    DistributionState distribution() const { return particle_distribution(state_, layout_); }
    std::vector<double> density() const { return grid_probabilities(state_, layout_); }

private:
    Config config_;
    RegisterLayout layout_;
    WallsAndRules geometry_;
    TimestepSchedule schedule_;
    Backend backend_;
    QuantumState state_;
    std::size_t done_ = 0;
    GateLedger ledger_;
    std::vector<GateLedger> step_ledgers_;
    std::vector<GateLedger> executed_ledgers_;
    std::map<std::vector<std::vector<unsigned>>, Circuit> circuits_;
};

/// Streaming and reflection totals of a ledger (labels are prefixed by
/// their stage).
inline std::pair<std::uint64_t, std::uint64_t> stage_totals(const GateLedger& l) {
    std::uint64_t s = 0, r = 0;
    for (const auto& [label, n] : l.breakdown()) (label.rfind("streaming.", 0) == 0 ? s : r) += n;
    return {s, r};
}

inline void write_pgm(std::ostream& os, std::span<const double> field, const GridSpec& grid) {
    if (grid.dims() != 2) throw Error("PGM output is only defined for 2D grids");
    const unsigned w = grid.points(0), h = grid.points(1);
    const double top = *std::max_element(field.begin(), field.end());
    os << "P5\n" << w << ' ' << h << "\n255\n";
    // First row is the highest y so the image is upright.
    for (unsigned r = 0; r < h; ++r)
        for (unsigned x = 0; x < w; ++x) {
            const double v = field[static_cast<std::size_t>(h - 1 - r) * w + x];
            const auto px = static_cast<unsigned char>(top > 0 ? std::lround(255.0 * v / top) : 0);
            os.put(static_cast<char>(px));
        }
}

inline void write_histogram_csv(std::ostream& os, const Histogram& h, const GridSpec& grid) {
    static constexpr const char* axes[] = {"x", "y", "z"};
    for (unsigned d = 0; d < grid.dims(); ++d) os << axes[d] << ',';
    os << "count\n";
    for (const auto& [flat, n] : h) {
        for (auto c : grid.position_of(flat)) os << c << ',';
        os << n << '\n';
    }
}

struct RunReport {
    Backend backend = Backend::Auto;
    std::size_t total_steps = 0;
    std::size_t excluded_states = 0;
    std::map<std::size_t, std::vector<double>> densities;  // by snapshot step
    std::map<std::size_t, Histogram> histograms;
    std::vector<double> oracle_deviation;  // after each step, when enabled
    std::vector<AuditResult> audits;       // index m = after m steps
    std::vector<GateLedger> step_ledgers;
    std::vector<GateLedger> executed_ledgers;
    GateLedger ledger;

    double max_oracle_deviation() const {
        double m = 0;
        for (double d : oracle_deviation) m = std::max(m, d);
        return m;
    }
};

/// Runs a configuration; writes artifacts into `out_dir` unless it is empty.
inline RunReport run(const Config& config, const std::filesystem::path& out_dir = {}) {
    Simulation sim(config);
    const auto& grid = config.grid;
    RunReport report;
    report.backend = sim.backend();
    report.total_steps = sim.total_steps();

    std::set<std::size_t> snapshots(config.run.snapshots.begin(), config.run.snapshots.end());
    if (snapshots.empty()) snapshots.insert(sim.total_steps());
    for (auto s : snapshots)
        if (s > sim.total_steps())
            throw Error("snapshot " + std::to_string(s) + " is beyond the schedule's " +
                        std::to_string(sim.total_steps()) + " timesteps");

    std::set<BasisIndex> excluded;
    if (config.run.exclude == ExcludePolicy::ObstacleInterior)
        excluded = obstacle_interior_points(config.obstacles, grid);
    report.excluded_states = excluded.size();

    const bool write = !out_dir.empty();
    if (write) std::filesystem::create_directories(out_dir);
    auto open = [&](const std::string& name) {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw Error("cannot write " + (out_dir / name).string());
        return f;
    };

    std::optional<DistributionState> oracle;
    if (config.run.oracle_diff) oracle = sim.distribution();

    report.audits.push_back(sim.audit());
    auto snapshot = [&](std::size_t m) {
        if (!snapshots.contains(m)) return;
        auto field = sim.density();
        if (config.run.shots > 0)
            report.histograms[m] = measure_sample(std::span<const double>(field), config.run.shots,
                                                  config.run.seed + m, excluded);
        if (write) {
            auto f = open("density_step" + std::to_string(m) + ".csv");
            write_density_csv(f, field, grid);
            if (config.run.pgm && grid.dims() == 2) {
                auto p = open("density_step" + std::to_string(m) + ".pgm");
                write_pgm(p, field, grid);
            }
            if (config.run.shots > 0) {
                auto h = open("histogram_step" + std::to_string(m) + ".csv");
                write_histogram_csv(h, report.histograms[m], grid);
            }
        }
        report.densities[m] = std::move(field);
    };
    snapshot(0);
    for (std::size_t m = 0; m < sim.total_steps(); ++m) {
        report.audits.push_back(sim.step());
        if (oracle) {
            *oracle = oracle_step(*oracle, sim.schedule().steps[m], config.obstacles, grid, config.velocities);
            report.oracle_deviation.push_back(max_abs_deviation(sim.distribution(), *oracle));
        }
        snapshot(m + 1);
    }
    report.step_ledgers = sim.step_ledgers();
    report.executed_ledgers = sim.executed_ledgers();
    report.ledger = sim.ledger();

    if (write) {
        {
            auto f = open("schedule.csv");
            write_schedule_csv(f, sim.schedule());
        }
        {
            auto f = open("layout.txt");
            sim.layout().summary(f);
        }
        {
            auto f = open("audit.txt");
            f << std::setprecision(6);
            for (const auto& a : report.audits)
                f << "step " << a.step << " ancilla_mass " << a.ancilla_mass << " obstacle_mass " << a.obstacle_mass
                  << ' ' << (a.ok() ? "ok" : "FAIL") << '\n';
        }
        {
            auto f = open("gates.csv");
            f << "step,stage,label,cnots,executed_gate_cnots\n";
            for (std::size_t m = 0; m < report.step_ledgers.size(); ++m) {
                const auto& l = report.step_ledgers[m];
                const auto& x = report.executed_ledgers[m];
                for (const auto& [label, n] : l.breakdown())
                    f << m + 1 << ',' << (label.rfind("streaming.", 0) == 0 ? "streaming" : "reflection") << ','
                      << label << ',' << n << ',' << x.count(label) << '\n';
                const auto [s, r] = stage_totals(l);
                const auto [xs, xr] = stage_totals(x);
                f << m + 1 << ",streaming,total," << s << ',' << xs << '\n';
                f << m + 1 << ",reflection,total," << r << ',' << xr << '\n';
            }
            std::uint64_t executed = 0;
            for (const auto& x : report.executed_ledgers) executed += x.cnot_count();
            f << "all,all,total," << report.ledger.cnot_count() << ',' << executed << '\n';
        }
        if (oracle) {
            auto f = open("oracle_diff.csv");
            f << "step,max_abs_deviation\n" << std::setprecision(17);
            for (std::size_t m = 0; m < report.oracle_deviation.size(); ++m)
                f << m + 1 << ',' << report.oracle_deviation[m] << '\n';
        }
    }
    return report;
}

}  // namespace cqbm
