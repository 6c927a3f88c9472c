#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace cqbm;

namespace {

struct World {
    GridSpec grid;
    VelocityTable table;
    ObstacleSpec obstacles;
    RegisterLayout layout;
    WallsAndRules geometry;

    World(std::vector<unsigned> qubits, std::vector<Rational> mags, std::vector<Box> boxes)
        : grid{std::move(qubits)},
          table(std::vector<std::vector<Rational>>(grid.dims(), mags)),
          obstacles{std::move(boxes)},
          layout(build_layout(grid, table)),
          geometry(derive_walls_and_rules(obstacles, grid)) {}

    unsigned code(unsigned dim, int speed) const { return table.encode(dim, Rational(speed)); }

    Circuit step(const std::vector<std::vector<unsigned>>& stepping,
                 BoundaryReading reading = BoundaryReading::SteppedToward) const {
        return build_timestep(layout, geometry, stepping, reading);
    }

    // Every free position with every velocity code.
    template <class F>
    void for_each_free_state(F&& f) const {
        for (std::size_t flat = 0; flat < grid.total_points(); ++flat) {
            const auto p = grid.position_of(flat);
            if (obstacles.inside(p)) continue;
            std::vector<unsigned> v(grid.dims(), 0);
            while (true) {
                f(ParticleState{p, v});
                unsigned i = 0;
                while (i < grid.dims() && ++v[i] == table.codes(i)) v[i++] = 0;
                if (i == grid.dims()) break;
            }
        }
    }

    // Number of inputs where the circuit disagrees with the oracle or leaves
    // an ancilla set.
    std::size_t mismatches(const std::vector<std::vector<unsigned>>& stepping,
                           BoundaryReading reading = BoundaryReading::SteppedToward) const {
        const Circuit c = step(stepping, reading);
        std::size_t bad = 0;
        for_each_free_state([&](const ParticleState& s) {
            const auto out = layout.decode(permute_basis(layout.encode(s.position, s.velocity_code), c));
            const auto want = oracle_move(s, stepping, obstacles, grid, table);
            bad += out.ancillae != 0 || out.position != want.position || out.velocity_code != want.velocity_code;
        });
        return bad;
    }
};

World toy_2d(std::vector<Rational> mags = {1}) { return World({3, 3}, std::move(mags), {Box{{5, 3}, {6, 4}}}); }

DecodedState run_on(const World& w, const Circuit& c, std::vector<unsigned> p, std::vector<unsigned> v,
                    std::uint64_t anc = 0) {
    return w.layout.decode(permute_basis(w.layout.encode(p, v, anc), c));
}

std::size_t count_labels(const Circuit& c, const std::string& prefix) {
    return std::count_if(c.begin(), c.end(), [&](const Primitive& p) { return p.label.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST_CASE("walls of a 3 x 39 box on 64 x 64", "[reflection]") {
    const GridSpec g{{6, 6}};
    const ObstacleSpec o{{Box{{34, 11}, {36, 49}}}};
    const auto gr = derive_walls_and_rules(o, g);
    REQUIRE(gr.walls.size() == 4);
    std::size_t xw = 0, yw = 0;
    for (const auto& w : gr.walls) {
        if (w.normal == 0) {
            ++xw;
            CHECK((w.fixed == 34 || w.fixed == 36));
            CHECK(w.spans == std::vector<Span>{{11, 49}});
        } else {
            ++yw;
            CHECK((w.fixed == 11 || w.fixed == 49));
            CHECK(w.spans == std::vector<Span>{{34, 36}});
        }
    }
    CHECK(xw == 2);
    CHECK(yw == 2);
    std::map<RuleKind, int> kinds;
    for (const auto& r : gr.rules) ++kinds[r.kind];
    CHECK(kinds[RuleKind::Corner] == 4);
    CHECK(kinds[RuleKind::FaceNearEdge] == 8);
    CHECK(kinds[RuleKind::PlainFace] == 4);
    CHECK(gr.rules.size() == 16);
}

TEST_CASE("rule census of 2 x 2 and 2 x 2 x 2 boxes", "[reflection]") {
    {
        const auto gr = derive_walls_and_rules(ObstacleSpec{{Box{{5, 3}, {6, 4}}}}, GridSpec{{3, 3}});
        std::map<RuleKind, int> k;
        for (const auto& r : gr.rules) ++k[r.kind];
        CHECK(k[RuleKind::Corner] == 4);
        CHECK(k[RuleKind::FaceNearEdge] == 8);
        CHECK(gr.rules.size() == 12);
    }
    {
        const auto gr = derive_walls_and_rules(ObstacleSpec{{Box{{3, 3, 3}, {4, 4, 4}}}}, GridSpec{{3, 3, 3}});
        std::map<RuleKind, int> k;
        for (const auto& r : gr.rules) ++k[r.kind];
        CHECK(gr.walls.size() == 6);
        CHECK(k[RuleKind::Corner] == 8);
        CHECK(k[RuleKind::EdgeNearCorner] == 24);
        CHECK(k[RuleKind::FaceNearCorner] == 24);
        CHECK(gr.rules.size() == 56);
    }
    {
        const auto gr = derive_walls_and_rules(ObstacleSpec{{Box{{2, 2, 2}, {4, 5, 4}}}}, GridSpec{{3, 3, 3}});
        std::map<RuleKind, int> k;
        for (const auto& r : gr.rules) ++k[r.kind];
        CHECK(k[RuleKind::PlainFace] == 6);
        CHECK(k[RuleKind::Edge] == 12);
        CHECK(gr.rules.size() == 5 * 5 * 5 - 3 * 3 * 3);
    }
}

TEST_CASE("obstacle validation", "[reflection]") {
    const GridSpec g{{3, 3}};
    auto bad = [&](std::vector<Box> b) { return ObstacleSpec{std::move(b)}; };
    CHECK_THROWS_AS(validate_obstacles(bad({Box{{3, 3}, {3, 4}}}), g), Error);  // one point wide
    CHECK_THROWS_AS(validate_obstacles(bad({Box{{0, 3}, {1, 4}}}), g), Error);  // touches x = 0
    CHECK_THROWS_AS(validate_obstacles(bad({Box{{5, 3}, {7, 4}}}), g), Error);  // touches x = 7
    CHECK_THROWS_AS(validate_obstacles(bad({Box{{1, 1, 1}, {2, 2, 2}}}), g), Error);
    CHECK_THROWS_AS(validate_obstacles(bad({Box{{1, 1}, {2, 2}}, Box{{4, 1}, {5, 2}}}), g), Error);
    CHECK_NOTHROW(validate_obstacles(bad({Box{{1, 1}, {2, 2}}, Box{{5, 1}, {6, 2}}}), g));
    CHECK_NOTHROW(validate_obstacles(bad({Box{{1, 1}, {2, 2}}, Box{{1, 5}, {2, 6}}}), g));
    CHECK_NOTHROW(validate_obstacles(bad({Box{{1, 1}, {6, 6}}}), g));
}

TEST_CASE("wall marks", "[reflection]") {
    const auto w = toy_2d();
    const Circuit mark = build_wall_mark(w.geometry.walls, w.layout);
    const auto px = w.code(0, 1), mx = w.code(0, -1), py = w.code(1, 1), my = w.code(1, -1);
    const std::uint64_t av_x = 1, ao_x = 4, ao_y = 8, av_y = 2;
    // Just stepped into the low x-wall, moving +x.
    CHECK(run_on(w, mark, {5, 3}, {px, my}, av_x).ancillae == (av_x | ao_x));
    CHECK(run_on(w, mark, {6, 4}, {mx, my}, av_x).ancillae == (av_x | ao_x));
    // Same point, pointing out of the box.
    CHECK(run_on(w, mark, {5, 3}, {mx, my}, av_x).ancillae == av_x);
    // Did not step: no mark.
    CHECK(run_on(w, mark, {5, 3}, {px, my}, 0).ancillae == 0);
    // Outside the tangential span.
    CHECK(run_on(w, mark, {5, 5}, {px, my}, av_x).ancillae == av_x);
    // y-wall at the low y layer, both dimensions stepped in.
    CHECK(run_on(w, mark, {5, 3}, {px, py}, av_x | av_y).ancillae == (av_x | av_y | ao_x | ao_y));
    // Comparator pairs come back clean.
    for (auto s : {run_on(w, mark, {5, 4}, {px, py}, 3), run_on(w, mark, {2, 2}, {px, py}, 3)})
        CHECK((s.ancillae & ~std::uint64_t{15}) == 0);
}

TEST_CASE("flip and eject", "[reflection]") {
    const auto w = toy_2d();
    const Circuit fe = build_flip_and_eject(w.layout);
    const auto px = w.code(0, 1), mx = w.code(0, -1), py = w.code(1, 1), my = w.code(1, -1);
    auto a = run_on(w, fe, {5, 3}, {px, my}, 4);
    CHECK(a.position == std::vector<unsigned>{4, 3});
    CHECK(a.velocity_code == std::vector<unsigned>{mx, my});
    auto corner = run_on(w, fe, {5, 3}, {px, py}, 12);
    CHECK(corner.position == std::vector<unsigned>{4, 2});
    CHECK(corner.velocity_code == std::vector<unsigned>{mx, my});
    auto untouched = run_on(w, fe, {5, 3}, {px, py}, 0);
    CHECK(untouched.position == std::vector<unsigned>{5, 3});
    CHECK(untouched.velocity_code == std::vector<unsigned>{px, py});
    CHECK(count_labels(fe, "reflection.flip.") == 2);
    for (const auto& p : fe)
        if (p.label.rfind("reflection.flip.", 0) == 0) CHECK(p.cnots == 1);
}

TEST_CASE("full timestep worked examples", "[reflection]") {
    const auto w = toy_2d();
    const Circuit c = w.step({{0}, {0}});
    const auto px = w.code(0, 1), mx = w.code(0, -1), py = w.code(1, 1), my = w.code(1, -1);
    struct Case {
        std::vector<unsigned> p, v, want_p, want_v;
    };
    const std::vector<Case> cases = {
        {{4, 3}, {px, py}, {4, 4}, {mx, py}},  // face hit while sliding along y
        {{4, 2}, {px, py}, {4, 2}, {mx, my}},  // exact corner
        {{4, 4}, {px, py}, {5, 5}, {px, py}},  // grazes past the corner
        {{6, 5}, {mx, my}, {5, 5}, {mx, py}},  // top face, crossing only y
        {{7, 3}, {mx, py}, {7, 4}, {px, py}},  // right face
        {{2, 2}, {mx, my}, {1, 1}, {mx, my}},  // free flight
        {{0, 0}, {mx, my}, {7, 7}, {mx, my}},  // periodic wrap
    };
    for (const auto& k : cases) {
        const auto out = run_on(w, c, k.p, k.v);
        CHECK(out.position == k.want_p);
        CHECK(out.velocity_code == k.want_v);
        CHECK(out.ancillae == 0);
    }
}

TEST_CASE("timestep is ancilla-clean and matches the oracle on every 2D input", "[reflection]") {
    CHECK(toy_2d().mismatches({{0}, {0}}) == 0);
    const auto two = toy_2d({1, 2});
    CHECK(two.mismatches({{1}, {1}}) == 0);
    CHECK(two.mismatches({{0, 1}, {0, 1}}) == 0);
    CHECK(two.mismatches({{0}, {1}}) == 0);
    CHECK(two.mismatches({{}, {0, 1}}) == 0);
    const World thick({4, 4}, {1, 2, 3}, {Box{{4, 5}, {8, 7}}, Box{{11, 2}, {13, 12}}});
    CHECK(thick.mismatches({{2}, {2}}) == 0);
    CHECK(thick.mismatches({{0, 2}, {1, 2}}) == 0);
}

TEST_CASE("timestep matches the oracle on every 3D input", "[reflection]") {
    const World w({3, 3, 3}, {1}, {Box{{3, 3, 3}, {4, 4, 4}}});
    CHECK(w.mismatches({{0}, {0}, {0}}) == 0);
    const World two({3, 3, 3}, {1, 2}, {Box{{2, 3, 2}, {4, 4, 5}}});
    CHECK(two.mismatches({{1}, {1}, {1}}) == 0);
    CHECK(two.mismatches({{0, 1}, {0, 1}, {0, 1}}) == 0);
}

TEST_CASE("reading the boundary literal as direction alone leaves residue", "[reflection]") {
    const auto two = toy_2d({1, 2});
    CHECK(two.mismatches({{1}, {1}}, BoundaryReading::DirectionOnly) > 0);
    const World w3({3, 3, 3}, {1, 2}, {Box{{2, 3, 2}, {4, 4, 5}}});
    CHECK(w3.mismatches({{1}, {1}, {1}}, BoundaryReading::DirectionOnly) > 0);
    CHECK(w3.mismatches({{1}, {1}, {1}}, BoundaryReading::SteppedToward) == 0);
}

TEST_CASE("timestep followed by its inverse is the identity on a dense state", "[reflection]") {
    const auto w = toy_2d();
    const Circuit c = w.step({{0}, {0}});
    // Random amplitudes on the ancilla-clear subspace; comparators require a |0> result qubit.
    auto psi = testing_support::random_state(w.layout.total_qubits(), 99);
    double kept = 0;
    for (BasisIndex i = 0; i < psi.size(); ++i) {
        if (i & w.layout.ancilla_mask()) psi[i] = 0;
        kept += std::norm(psi[i]);
    }
    for (auto& a : psi) a /= std::sqrt(kept);
    auto s = StateVector::from_amplitudes(w.layout.total_qubits(), psi);
    run_dense(s, c);
    run_dense(s, inverse(c));
    CHECK(testing_support::max_diff(s.amplitudes(), psi) <= 1e-9);
}

TEST_CASE("dense execution of a timestep matches its permutation", "[reflection]") {
    const auto w = toy_2d();
    const Circuit c = w.step({{0}, {0}});
    const auto px = w.code(0, 1), py = w.code(1, 1), my = w.code(1, -1);
    std::vector<BasisIndex> inputs = {w.layout.encode(std::vector<unsigned>{4, 3}, std::vector<unsigned>{px, py}),
                                      w.layout.encode(std::vector<unsigned>{4, 2}, std::vector<unsigned>{px, py}),
                                      w.layout.encode(std::vector<unsigned>{6, 5}, std::vector<unsigned>{px, my})};
    std::vector<Amplitude> amps(std::size_t{1} << w.layout.total_qubits());
    for (auto i : inputs) amps[i] = 1.0 / std::sqrt(3.0);
    auto s = StateVector::from_amplitudes(w.layout.total_qubits(), amps);
    run_dense(s, c);
    for (auto i : inputs) CHECK(std::norm(s[permute_basis(i, c)]) == Catch::Approx(1.0 / 3).margin(1e-9));
}

TEST_CASE("timestep cost structure", "[reflection]") {
    const auto w = toy_2d();
    const Circuit c = w.step({{0}, {0}});
    CHECK(count_labels(c, "streaming.mark.") == 2);
    CHECK(count_labels(c, "streaming.unmark.") == 2);
    CHECK(count_labels(c, "reflection.flip.") == 2);
    CHECK(count_labels(c, "reflection.wall.mcx") == 4);
    // 4 corners with no boundary dimension, 8 face rules with two terms each.
    CHECK(count_labels(c, "reflection.reset.corner") == 4 * 2);
    CHECK(count_labels(c, "reflection.reset.face_near_edge") == 8 * 2);
    // No obstacles: streaming plus the unmark only.
    const WallsAndRules none;
    const Circuit free = build_timestep(w.layout, none, {{0}, {0}});
    CHECK(free.size() == 6);
    CHECK_THROWS_AS(build_timestep(w.layout, none, {{0}}), Error);
}
