#pragma once

// Fail-safe specular reflection on axis-aligned boxes, for d = 2 and 3.
//
// One timestep after streaming runs
//   wall marks   a_o,i ^= [on an i-wall] & [v_dir,i into the wall] & a_v,i
//   flip         v_dir,i ^= a_o,i
//   eject        grid_i -= / += 1 controlled on a_o,i, direction per v_dir,i
//   reset        a_o,i cleared on the exterior points where ejected particles land
//   unmark       a_v,i cleared by re-running the streaming mark
//
// Reset rules live on the ring of points around each box. At a ring point
// every dimension is exterior (one point outside the box range), boundary
// (on lo or hi) or interior (strictly between). A particle sitting there was
// ejected exactly in its exterior dimensions E, and it was ejected iff
//   every e in E stepped and now points away from the box, and
//   no boundary dimension b stepped while pointing toward the box
// (a boundary dimension that stepped toward the box would have crossed it
// too). The second factor is expanded over subsets of the boundary set into
// an exclusive sum of products, so every term is one MCX per target.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cqbm/error.hpp"
#include "cqbm/layout.hpp"
#include "cqbm/primitive.hpp"
#include "cqbm/qarith.hpp"
#include "cqbm/streaming.hpp"

namespace cqbm {

struct Box {
    std::vector<unsigned> lo;  // inclusive grid-point bounds per dimension
    std::vector<unsigned> hi;

    bool contains(std::span<const unsigned> p) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }
    std::size_t volume() const {
        std::size_t v = 1;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i] + 1;
        return v;
    }
};

struct ObstacleSpec {
    std::vector<Box> boxes;

    bool inside(std::span<const unsigned> p) const {
        return std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return b.contains(p); });
    }
    std::size_t interior_points() const {
        std::size_t n = 0;
        for (const auto& b : boxes) n += b.volume();
        return n;
    }
};

struct Span {
    unsigned lo = 0;
    unsigned hi = 0;
    bool operator==(const Span&) const = default;
};

enum class Side { Low, High };

struct WallSpec {
    std::size_t box = 0;
    unsigned normal = 0;
    Side side = Side::Low;
    unsigned fixed = 0;                 // wall-layer coordinate along the normal
    std::vector<unsigned> tangential;   // dimensions other than the normal
    std::vector<Span> spans;            // one per tangential dimension
};

enum class RuleKind {
    PlainFace,       // one exterior dimension, the rest strictly interior
    FaceNearEdge,    // one exterior, one boundary dimension
    FaceNearCorner,  // one exterior, two boundary dimensions (3D)
    Edge,            // two exterior, one interior dimension (3D)
    EdgeNearCorner,  // two exterior, one boundary dimension (3D)
    Corner,          // exterior in every dimension
};

inline const char* name(RuleKind k) {
    switch (k) {
        case RuleKind::PlainFace: return "face";
        case RuleKind::FaceNearEdge: return "face_near_edge";
        case RuleKind::FaceNearCorner: return "face_near_corner";
        case RuleKind::Edge: return "edge";
        case RuleKind::EdgeNearCorner: return "edge_near_corner";
        case RuleKind::Corner: return "corner";
    }
    return "?";
}

enum class Placement { BelowLow, AboveHigh, AtLow, AtHigh, Interior };

/// One cell of a box's ring. The reset targets a_o,e for every e in
/// `exterior`.
struct ResetRule {
    std::size_t box = 0;
    RuleKind kind = RuleKind::PlainFace;
    std::vector<Placement> placement;  // per dimension
    std::vector<unsigned> coordinate;  // exact grid coordinate, unused for Interior
    std::vector<Span> span;            // interior span, used for Interior only
    std::vector<unsigned> exterior;
    std::vector<unsigned> boundary;
    std::vector<unsigned> interior;

    /// Gate-level direction "away from the box" at an exterior placement.
    static bool away_is_positive(Placement p) { return p == Placement::AboveHigh; }
    /// Direction "toward the box" at a boundary placement.
    static bool toward_is_positive(Placement p) { return p == Placement::AtLow; }
};

struct WallsAndRules {
    std::vector<WallSpec> walls;
    std::vector<ResetRule> rules;
};

inline void validate_obstacles(const ObstacleSpec& obstacles, const GridSpec& grid) {
    const unsigned d = grid.dims();
    for (std::size_t b = 0; b < obstacles.boxes.size(); ++b) {
        const auto& box = obstacles.boxes[b];
        const std::string tag = "obstacle " + std::to_string(b);
        if (box.lo.size() != d || box.hi.size() != d) throw Error(tag + ": dimension mismatch with grid");
        for (unsigned i = 0; i < d; ++i) {
            if (box.hi[i] < box.lo[i] + 1)
                throw Error(tag + ": must be at least 2 grid points wide in " + dim_name(i));
            if (box.lo[i] < 1 || box.hi[i] + 2 > grid.points(i))
                throw Error(tag + ": must keep one free grid point to the domain boundary in " + dim_name(i));
        }
    }
    // Rings (boxes dilated by one point) must not meet, i.e. some dimension
    // leaves at least two free points between the two boxes.
    for (std::size_t a = 0; a < obstacles.boxes.size(); ++a)
        for (std::size_t b = a + 1; b < obstacles.boxes.size(); ++b) {
            const auto& A = obstacles.boxes[a];
            const auto& B = obstacles.boxes[b];
            bool separated = false;
            for (unsigned i = 0; i < d; ++i)
                if (B.lo[i] >= A.hi[i] + 3 || A.lo[i] >= B.hi[i] + 3) separated = true;
            if (!separated)
                throw Error("obstacles " + std::to_string(a) + " and " + std::to_string(b) +
                            " are closer than 2 free grid points");
        }
}

namespace detail {

inline RuleKind classify(std::size_t e, std::size_t b, unsigned d) {
    if (e == d) return RuleKind::Corner;
    if (e == 1 && b == 0) return RuleKind::PlainFace;
    if (e == 1 && b == 1) return RuleKind::FaceNearEdge;
    if (e == 1 && b == 2) return RuleKind::FaceNearCorner;
    if (e == 2 && b == 0) return RuleKind::Edge;
    return RuleKind::EdgeNearCorner;
}

}  // namespace detail

inline WallsAndRules derive_walls_and_rules(const ObstacleSpec& obstacles, const GridSpec& grid) {
    validate_obstacles(obstacles, grid);
    const unsigned d = grid.dims();
    WallsAndRules out;
    for (std::size_t b = 0; b < obstacles.boxes.size(); ++b) {
        const auto& box = obstacles.boxes[b];
        for (unsigned i = 0; i < d; ++i)
            for (Side side : {Side::Low, Side::High}) {
                WallSpec w;
                w.box = b;
                w.normal = i;
                w.side = side;
                w.fixed = side == Side::Low ? box.lo[i] : box.hi[i];
                for (unsigned j = 0; j < d; ++j)
                    if (j != i) {
                        w.tangential.push_back(j);
                        w.spans.push_back({box.lo[j], box.hi[j]});
                    }
                out.walls.push_back(std::move(w));
            }

        // Enumerate the 5^d placement combinations; keep those with an
        // exterior dimension and non-empty interior spans.
        std::size_t combos = 1;
        for (unsigned i = 0; i < d; ++i) combos *= 5;
        for (std::size_t c = 0; c < combos; ++c) {
            ResetRule r;
            r.box = b;
            std::size_t code = c;
            bool ok = true;
            for (unsigned i = 0; i < d; ++i, code /= 5) {
                const auto p = static_cast<Placement>(code % 5);
                r.placement.push_back(p);
                r.coordinate.push_back(0);
                r.span.push_back({});
                switch (p) {
                    case Placement::BelowLow: r.coordinate[i] = box.lo[i] - 1; r.exterior.push_back(i); break;
                    case Placement::AboveHigh: r.coordinate[i] = box.hi[i] + 1; r.exterior.push_back(i); break;
                    case Placement::AtLow: r.coordinate[i] = box.lo[i]; r.boundary.push_back(i); break;
                    case Placement::AtHigh: r.coordinate[i] = box.hi[i]; r.boundary.push_back(i); break;
                    case Placement::Interior:
                        if (box.hi[i] < box.lo[i] + 2) ok = false;
                        r.span[i] = {box.lo[i] + 1, box.hi[i] - 1};
                        r.interior.push_back(i);
                        break;
                }
            }
            if (!ok || r.exterior.empty()) continue;
            r.kind = detail::classify(r.exterior.size(), r.boundary.size(), d);
            out.rules.push_back(std::move(r));
        }
    }
    return out;
}

namespace detail {

inline void exact_position(std::vector<Control>& controls, const DimRegisters& reg, unsigned value) {
    for (std::size_t b = 0; b < reg.grid.size(); ++b)
        controls.push_back((value >> b) & 1 ? on(reg.grid[b]) : off(reg.grid[b]));
}

inline Primitive mcx_primitive(std::string label, Qubit target, std::vector<Control> controls) {
    Primitive p;
    p.label = std::move(label);
    p.gates = {Gate::x(target, controls)};
    p.cnots = cost::mcx(controls.size());
    p.semantics = semantics::XorFlip{target, std::move(controls)};
    p.parts = {"mcx"};
    return p;
}

/// Comparator block: pair k holds lo_k <= grid_{dims[k]} <= hi_k.
inline Circuit span_comparators(const std::string& label, const std::vector<unsigned>& dims,
                                const std::vector<Span>& spans, const RegisterLayout& layout) {
    if (dims.size() > layout.comparators().size()) throw Error("not enough comparator ancilla pairs");
    Circuit c;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const auto& grid = layout.dim(dims[k]).grid;
        const auto& pair = layout.comparators()[k];
        c.push_back(compare_geq(grid, spans[k].lo, pair.lower));
        c.back().label = label;
        c.push_back(compare_leq(grid, spans[k].hi, pair.upper));
        c.back().label = label;
    }
    return c;
}

inline void span_controls(std::vector<Control>& controls, std::size_t count, const RegisterLayout& layout) {
    for (std::size_t k = 0; k < count; ++k) {
        controls.push_back(on(layout.comparators()[k].lower));
        controls.push_back(on(layout.comparators()[k].upper));
    }
}

inline Circuit uncompute(const Circuit& block, const std::string& label) {
    Circuit inv = inverse(block);
    for (auto& p : inv) p.label = label;
    return inv;
}

}  // namespace detail

/// Marks a_o,i for particles that just stepped into a wall layer moving
/// into the box. Both walls of one normal share their comparator block.
inline Circuit build_wall_mark(const std::vector<WallSpec>& walls, const RegisterLayout& layout) {
    Circuit c;
    std::map<std::pair<std::size_t, unsigned>, std::vector<const WallSpec*>> groups;
    for (const auto& w : walls) groups[{w.box, w.normal}].push_back(&w);
    for (const auto& [key, members] : groups) {
        const WallSpec& first = *members.front();
        const Circuit compute = detail::span_comparators("reflection.wall.compare", first.tangential, first.spans, layout);
        append(c, compute);
        for (const WallSpec* w : members) {
            if (w->tangential != first.tangential || w->spans != first.spans)
                throw Error("walls of one box and normal must share their spans");
            const auto& reg = layout.dim(w->normal);
            std::vector<Control> controls;
            detail::exact_position(controls, reg, w->fixed);
            detail::span_controls(controls, w->tangential.size(), layout);
            controls.push_back(w->side == Side::Low ? on(reg.direction) : off(reg.direction));
            controls.push_back(on(reg.stepped));
            c.push_back(detail::mcx_primitive("reflection.wall.mcx", reg.reflect, std::move(controls)));
        }
        append(c, detail::uncompute(compute, "reflection.wall.uncompare"));
    }
    return c;
}

/// Per dimension: v_dir,i ^= a_o,i, then move the particle one point along
/// its new direction wherever a_o,i is set.
inline Circuit build_flip_and_eject(const RegisterLayout& layout) {
    Circuit c;
    for (unsigned i = 0; i < layout.dims(); ++i) {
        const auto& reg = layout.dim(i);
        c.push_back(detail::mcx_primitive(std::string("reflection.flip.") + dim_name(i), reg.direction,
                                          {on(reg.reflect)}));
        c.push_back(controlled_move(reg.grid, {on(reg.reflect), on(reg.direction)},
                                    {on(reg.reflect), off(reg.direction)}));
        c.back().label = std::string("reflection.eject.") + dim_name(i);
    }
    return c;
}

/// How a boundary dimension's "took a step toward the box" literal is read.
/// `SteppedToward` needs a_v,b = 1 and v_dir,b toward the box, so a
/// dimension that did not step never blocks the reset. `DirectionOnly` looks
/// at v_dir,b alone; it is kept for comparison and is wrong whenever a
/// boundary dimension points toward the box without having stepped.
enum class BoundaryReading { SteppedToward, DirectionOnly };

/// Controls of one exclusive-sum term of a rule: the rule's position, the
/// "stepped and now pointing away" literals of every exterior dimension,
/// and "stepped toward the box" for each boundary dimension in `subset`.
inline std::vector<Control> reset_term_controls(const ResetRule& r, unsigned subset, const RegisterLayout& layout,
                                                BoundaryReading reading = BoundaryReading::SteppedToward) {
    std::vector<Control> controls;
    for (unsigned i = 0; i < layout.dims(); ++i)
        if (r.placement[i] != Placement::Interior) detail::exact_position(controls, layout.dim(i), r.coordinate[i]);
    detail::span_controls(controls, r.interior.size(), layout);
    for (auto e : r.exterior) {
        const auto& reg = layout.dim(e);
        controls.push_back(on(reg.stepped));
        controls.push_back(ResetRule::away_is_positive(r.placement[e]) ? on(reg.direction) : off(reg.direction));
    }
    for (std::size_t k = 0; k < r.boundary.size(); ++k)
        if (subset & (1u << k)) {
            const unsigned b = r.boundary[k];
            const auto& reg = layout.dim(b);
            if (reading == BoundaryReading::SteppedToward) controls.push_back(on(reg.stepped));
            controls.push_back(ResetRule::toward_is_positive(r.placement[b]) ? on(reg.direction) : off(reg.direction));
        }
    return controls;
}

/// Clears every a_o,i set by the wall marks, then a_v,i via the streaming
/// mark. `stepping[i]` are the magnitude indices that stepped in dimension i.
inline Circuit build_reset(const std::vector<ResetRule>& rules, const RegisterLayout& layout,
                           const std::vector<std::vector<unsigned>>& stepping,
                           BoundaryReading reading = BoundaryReading::SteppedToward) {
    Circuit c;
    // Rules that use the same comparator spans share one comparator block.
    std::map<std::pair<std::vector<unsigned>, std::vector<std::pair<unsigned, unsigned>>>, std::vector<const ResetRule*>>
        groups;
    for (const auto& r : rules) {
        std::vector<std::pair<unsigned, unsigned>> spans;
        for (auto i : r.interior) spans.emplace_back(r.span[i].lo, r.span[i].hi);
        groups[{r.interior, spans}].push_back(&r);
    }
    for (const auto& [key, members] : groups) {
        std::vector<Span> spans;
        for (const auto& [lo, hi] : key.second) spans.push_back({lo, hi});
        const Circuit compute = detail::span_comparators("reflection.reset.compare", key.first, spans, layout);
        append(c, compute);
        for (const ResetRule* r : members)
            for (unsigned subset = 0; subset < (1u << r->boundary.size()); ++subset) {
                const auto controls = reset_term_controls(*r, subset, layout, reading);
                for (auto e : r->exterior)
                    c.push_back(detail::mcx_primitive(std::string("reflection.reset.") + name(r->kind),
                                                      layout.dim(e).reflect, controls));
            }
        append(c, detail::uncompute(compute, "reflection.reset.uncompare"));
    }
    for (unsigned i = 0; i < layout.dims() && i < stepping.size(); ++i) {
        if (stepping[i].empty()) continue;
        c.push_back(mark_stepping_speeds(i, stepping[i], layout));
        c.back().label = std::string("streaming.unmark.") + dim_name(i);
    }
    return c;
}

/// One full timestep: streaming in every stepping dimension, then reflection.
inline Circuit build_timestep(const RegisterLayout& layout, const WallsAndRules& geometry,
                              const std::vector<std::vector<unsigned>>& stepping,
                              BoundaryReading reading = BoundaryReading::SteppedToward) {
    if (stepping.size() != layout.dims()) throw Error("stepping sets must be given for every dimension");
    Circuit c;
    for (unsigned i = 0; i < layout.dims(); ++i) append(c, build_streaming_step(i, stepping[i], layout));
    if (!geometry.walls.empty()) {
        append(c, build_wall_mark(geometry.walls, layout));
        append(c, build_flip_and_eject(layout));
    }
    append(c, build_reset(geometry.rules, layout, stepping, reading));
    return c;
}

}  // namespace cqbm
