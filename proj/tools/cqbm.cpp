// Command-line driver.
//
//   cqbm run <config.json> [--backend dense|perm] [--oracle-diff]
//            [--snapshots a,b,c] [--shots N] [--seed S] [--out DIR] [--gate-report]
//   cqbm layout <config.json>
//   cqbm schedule <config.json>
//   cqbm trace <config.json> [--step M]

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cqbm/cqbm.hpp"

namespace {

std::vector<std::size_t> parse_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(std::stoul(item));
    return out;
}

void print_gate_report(std::ostream& os, const cqbm::RunReport& r) {
    os << "step,streaming_cnots,reflection_cnots,total_cnots,executed_gate_cnots\n";
    for (std::size_t m = 0; m < r.step_ledgers.size(); ++m) {
        const auto [s, f] = cqbm::stage_totals(r.step_ledgers[m]);
        os << m + 1 << ',' << s << ',' << f << ',' << s + f << ',' << r.executed_ledgers[m].cnot_count() << '\n';
    }
    os << "total," << r.ledger.cnot_count() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collisionless quantum Boltzmann circuits: build, simulate, verify"};
    app.require_subcommand(1);

    std::string config_path, backend, snapshots, out_dir;
    bool oracle_diff = false, gate_report = false;
    std::uint64_t shots = 0, seed = 0;

    auto* run = app.add_subcommand("run", "run a configuration and write artifacts");
    run->add_option("config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    run->add_option("--backend", backend, "dense or perm")->check(CLI::IsMember({"dense", "perm", "auto"}));
    run->add_flag("--oracle-diff", oracle_diff, "compare against the classical oracle after every step");
    run->add_option("--snapshots", snapshots, "comma-separated timestep counts");
    auto* shots_opt = run->add_option("--shots", shots, "measurement shots per snapshot");
    auto* seed_opt = run->add_option("--seed", seed, "sampling seed");
    run->add_option("--out", out_dir, "output directory")->default_val("out");
    run->add_flag("--gate-report", gate_report, "print the per-step CNOT report");

    std::string info_config;
    std::size_t trace_step = 0;
    auto* layout = app.add_subcommand("layout", "print the qubit register map");
    layout->add_option("config", info_config, "JSON configuration")->required()->check(CLI::ExistingFile);
    auto* schedule = app.add_subcommand("schedule", "print the CFL timestep schedule as CSV");
    schedule->add_option("config", info_config, "JSON configuration")->required()->check(CLI::ExistingFile);
    auto* trace = app.add_subcommand("trace", "dump the gate trace of one timestep");
    trace->add_option("config", info_config, "JSON configuration")->required()->check(CLI::ExistingFile);
    trace->add_option("--step", trace_step, "timestep index (0-based)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            cqbm::Config cfg = cqbm::load_config(config_path);
            if (!backend.empty()) cfg.run.backend = cqbm::parse_backend(backend);
            if (oracle_diff) cfg.run.oracle_diff = true;
            if (!snapshots.empty()) cfg.run.snapshots = parse_list(snapshots);
            if (*shots_opt) cfg.run.shots = shots;
            if (*seed_opt) cfg.run.seed = seed;
            const auto report = cqbm::run(cfg, out_dir);
            std::cout << "timesteps " << report.total_steps << ", backend "
                      << (report.backend == cqbm::Backend::Dense ? "dense" : "perm") << ", excluded states "
                      << report.excluded_states << ", total CNOTs " << report.ledger.cnot_count() << '\n';
            if (cfg.run.oracle_diff) std::cout << "oracle max deviation " << report.max_oracle_deviation() << '\n';
            if (gate_report) print_gate_report(std::cout, report);
            std::cout << "artifacts in " << out_dir << '\n';
        } else {
            const cqbm::Config cfg = cqbm::load_config(info_config);
            const auto lay = cqbm::build_layout(cfg.grid, cfg.velocities);
            if (*layout) {
                lay.summary(std::cout);
            } else if (*schedule) {
                cqbm::write_schedule_csv(std::cout, cqbm::build_schedule(cfg.velocities, cfg.run.cycles));
            } else if (*trace) {
                const auto sched = cqbm::build_schedule(cfg.velocities, cfg.run.cycles);
                if (trace_step >= sched.steps.size()) throw cqbm::Error("--step beyond the schedule");
                const auto geometry = cqbm::derive_walls_and_rules(cfg.obstacles, cfg.grid);
                const auto c = cqbm::build_timestep(lay, geometry,
                                                    cqbm::stepping_indices(cfg.velocities, sched.steps[trace_step]));
                cqbm::dump_trace(std::cout, std::span<const cqbm::Primitive>(c));
            }
        }
    } catch (const cqbm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
