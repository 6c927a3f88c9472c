#pragma once

// Per-dimension streaming: mark the stepping magnitudes into a_v,i, then
// move the position register +1 or -1 according to v_dir,i with a single
// QFT pair. a_v,i stays set until the reflection step has used it.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "cqbm/error.hpp"
#include "cqbm/layout.hpp"
#include "cqbm/primitive.hpp"
#include "cqbm/qarith.hpp"

namespace cqbm {

/// Flips a_v,dim on every basis state whose magnitude bits in `dim` encode
/// one of `magnitude_indices`. Polarity X gates between consecutive MCXs are
/// merged, so only the bits that differ between two magnitudes are toggled.
/// The primitive is its own inverse and doubles as the unmarking step.
inline Primitive mark_stepping_speeds(unsigned dim, std::vector<unsigned> magnitude_indices,
                                      const RegisterLayout& layout) {
    const auto& reg = layout.dim(dim);
    const auto& table = layout.velocities();
    std::sort(magnitude_indices.begin(), magnitude_indices.end());
    magnitude_indices.erase(std::unique(magnitude_indices.begin(), magnitude_indices.end()),
                            magnitude_indices.end());
    for (auto k : magnitude_indices)
        if (k >= table.count(dim))
            throw Error("magnitude index " + std::to_string(k) + " not in velocity table of " + dim_name(dim));

    const std::size_t m = reg.magnitude.size();
    const BasisIndex all = (BasisIndex{1} << m) - 1;
    std::vector<Control> controls;
    for (auto q : reg.magnitude) controls.push_back(on(q));

    Primitive p;
    p.label = std::string("mark.") + dim_name(dim);
    BasisIndex flipped = 0;  // magnitude bits currently under an X
    auto toggle = [&](BasisIndex want) {
        const BasisIndex diff = flipped ^ want;
        for (std::size_t b = 0; b < m; ++b)
            if (diff & (BasisIndex{1} << b)) p.gates.push_back(Gate::x(reg.magnitude[b]));
        flipped = want;
    };
    std::vector<BasisIndex> values;
    for (auto k : magnitude_indices) {
        toggle(~BasisIndex{k} & all);
        p.gates.push_back(Gate::x(reg.stepped, controls));
        p.cnots += cost::mcx(m);
        p.parts.push_back("mcx");
        values.push_back(k);
    }
    toggle(0);
    p.semantics = semantics::RegisterMatch{reg.magnitude, values, reg.stepped};
    return p;
}

inline Primitive mark_stepping_speeds(unsigned dim, std::span<const Rational> magnitudes,
                                      const RegisterLayout& layout) {
    std::vector<unsigned> idx;
    for (const auto& u : magnitudes) {
        auto k = layout.velocities().find_magnitude(dim, u);
        if (!k) throw Error("magnitude " + to_string(u) + " not in velocity table of " + dim_name(dim));
        idx.push_back(*k);
    }
    return mark_stepping_speeds(dim, idx, layout);
}

/// position_dim += 1 where (a_v=1, v_dir=1), -= 1 where (a_v=1, v_dir=0).
inline Primitive stream_move(unsigned dim, const RegisterLayout& layout) {
    const auto& reg = layout.dim(dim);
    Primitive p = controlled_move(reg.grid, {on(reg.stepped), on(reg.direction)},
                                  {on(reg.stepped), off(reg.direction)});
    p.label = std::string("stream.") + dim_name(dim);
    return p;
}

/// mark + move for one dimension; empty when nothing steps in `dim`.
inline Circuit build_streaming_step(unsigned dim, const std::vector<unsigned>& magnitude_indices,
                                    const RegisterLayout& layout) {
    if (magnitude_indices.empty()) return {};
    Circuit c;
    c.push_back(mark_stepping_speeds(dim, magnitude_indices, layout));
    c.back().label = std::string("streaming.mark.") + dim_name(dim);
    c.push_back(stream_move(dim, layout));
    c.back().label = std::string("streaming.move.") + dim_name(dim);
    return c;
}

}  // namespace cqbm
