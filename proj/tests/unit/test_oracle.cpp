#include <catch_amalgamated.hpp>

#include <numeric>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace cqbm;

namespace {

const GridSpec kGrid{{3, 3}};
const ObstacleSpec kBox{{Box{{5, 3}, {6, 4}}}};
const VelocityTable kOne(std::vector<std::vector<Rational>>(2, {1}));
const VelocityTable kTwo(std::vector<std::vector<Rational>>(2, {1, 2}));

using Stepping = std::vector<std::vector<unsigned>>;

unsigned c(const VelocityTable& t, int speed) { return t.encode(0, Rational(speed)); }

ParticleState move(const ParticleState& s, const std::vector<std::vector<unsigned>>& stepping,
                   const VelocityTable& t = kOne) {
    return oracle_move(s, stepping, kBox, kGrid, t);
}

std::vector<ParticleState> free_states(const VelocityTable& t) {
    std::vector<ParticleState> out;
    for (std::size_t f = 0; f < kGrid.total_points(); ++f) {
        const auto p = kGrid.position_of(f);
        if (kBox.inside(p)) continue;
        for (unsigned a = 0; a < t.codes(0); ++a)
            for (unsigned b = 0; b < t.codes(1); ++b) out.push_back({p, {a, b}});
    }
    return out;
}

}  // namespace

TEST_CASE("head-on hit on an x-wall", "[oracle]") {
    const auto s = move({{4, 3}, {c(kOne, 1), c(kOne, 1)}}, {{0}, {}});
    CHECK(s.position == std::vector<unsigned>{4, 3});
    CHECK(s.velocity_code == std::vector<unsigned>{c(kOne, -1), c(kOne, 1)});
    const auto r = move({{7, 4}, {c(kOne, -1), c(kOne, -1)}}, {{0}, {}});
    CHECK(r.position == std::vector<unsigned>{7, 4});
    CHECK(r.velocity_code[0] == c(kOne, 1));
}

TEST_CASE("diagonal hit crossing only the y range", "[oracle]") {
    const auto s = move({{6, 5}, {c(kOne, -1), c(kOne, -1)}}, {{0}, {0}});
    CHECK(s.position == std::vector<unsigned>{5, 5});
    CHECK(s.velocity_code == std::vector<unsigned>{c(kOne, -1), c(kOne, 1)});
}

TEST_CASE("exact corner reverses both components", "[oracle]") {
    const auto s = move({{7, 5}, {c(kOne, -1), c(kOne, -1)}}, {{0}, {0}});
    CHECK(s.position == std::vector<unsigned>{7, 5});
    CHECK(s.velocity_code == std::vector<unsigned>{c(kOne, 1), c(kOne, 1)});
}

TEST_CASE("non-stepping dimensions and padding codes stay put", "[oracle]") {
    const auto s = move({{2, 2}, {c(kTwo, 1), c(kTwo, 2)}}, {{1}, {1}}, kTwo);
    CHECK(s.position == std::vector<unsigned>{2, 3});
    const ParticleState pad{{2, 2}, {1, 1}};  // magnitude index 1 is padding in a one-speed table
    CHECK(move(pad, {{0}, {0}}) == pad);
}

TEST_CASE("mass inside an obstacle is rejected", "[oracle]") {
    CHECK_THROWS_AS(move({{5, 3}, {0, 0}}, {{0}, {0}}), Error);
    CHECK_THROWS_AS(oracle_step({}, Stepping{{0}}, kBox, kGrid, kOne), Error);
}

TEST_CASE("one step is a bijection of the free states", "[oracle]") {
    for (const auto& [table, patterns] :
         std::vector<std::pair<VelocityTable, std::vector<std::vector<std::vector<unsigned>>>>>{
             {kOne, {{{0}, {0}}, {{0}, {}}}}, {kTwo, {{{1}, {1}}, {{0, 1}, {0, 1}}, {{0}, {1}}}}}) {
        const auto states = free_states(table);
        for (const auto& stepping : patterns) {
            std::set<ParticleState> images;
            for (const auto& s : states) {
                const auto q = oracle_move(s, stepping, kBox, kGrid, table);
                CHECK(!kBox.inside(q.position));
                images.insert(q);
            }
            CHECK(images.size() == states.size());
        }
    }
}

TEST_CASE("mass is conserved", "[oracle]") {
    DistributionState d;
    const auto states = free_states(kTwo);
    for (std::size_t k = 0; k < states.size(); ++k) d[states[k]] = 1.0 + static_cast<double>(k % 7);
    const double before = total_mass(d);
    for (int m = 0; m < 6; ++m) d = oracle_step(d, Stepping{{0, 1}, {1}}, kBox, kGrid, kTwo);
    CHECK(total_mass(d) == Catch::Approx(before).epsilon(1e-15));
}

TEST_CASE("reversing velocities and stepping again returns the start", "[oracle]") {
    auto flip = [](ParticleState s, const VelocityTable& t) {
        for (unsigned i = 0; i < 2; ++i) s.velocity_code[i] ^= t.sign_bit(i);
        return s;
    };
    for (const auto& s : free_states(kTwo)) {
        const std::vector<std::vector<unsigned>> st = {{1}, {0, 1}};
        const auto back = flip(move(flip(move(s, st, kTwo), kTwo), st, kTwo), kTwo);
        CHECK(back == s);
    }
}

TEST_CASE("density field", "[oracle]") {
    const GridSpec g{{2, 2}};
    DistributionState uniform;
    for (std::size_t f = 0; f < g.total_points(); ++f) uniform[{g.position_of(f), {0, 0}}] = 1.0 / 16;
    for (double v : density_field(uniform, g)) CHECK(v == Catch::Approx(1.0 / 16));

    DistributionState point{{{{1, 2}, {2, 2}}, 0.25}, {{{1, 2}, {0, 2}}, 0.75}};
    const auto f = density_field(point, g);
    CHECK(f[1 + 4 * 2] == Catch::Approx(1.0));
    CHECK(std::accumulate(f.begin(), f.end(), 0.0) == Catch::Approx(1.0));

    // +x shift on an empty 4 x 4 domain.
    const auto shifted = oracle_step(point, Stepping{{0}, {0}}, ObstacleSpec{}, g, kOne);
    const auto s = density_field(shifted, g);
    CHECK(s[2 + 4 * 3] == Catch::Approx(0.25));  // codes (2, 2) are (+1, +1)
    CHECK(s[0 + 4 * 3] == Catch::Approx(0.75));  // codes (0, 2) are (-1, +1)
}

TEST_CASE("density CSV", "[oracle]") {
    const GridSpec g{{1, 1}};
    std::ostringstream os;
    const std::vector<double> field = {0.5, 0.25, 0.125, 0.125};
    write_density_csv(os, field, g);
    CHECK(os.str() == "x,y,mass\n0,0,0.5\n1,0,0.25\n0,1,0.125\n1,1,0.125\n");
    std::ostringstream os3;
    write_density_csv(os3, std::vector<double>(8, 0.125), GridSpec{{1, 1, 1}});
    CHECK(os3.str().rfind("x,y,z,mass\n0,0,0,0.125\n1,0,0,", 0) == 0);
}
