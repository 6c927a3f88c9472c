#pragma once

// Shared helpers for the test binaries: independent reference computations
// that do not go through the library's circuit builders.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cqbm/cqbm.hpp"

namespace testing_support {

using cqbm::Amplitude;
using cqbm::BasisIndex;

/// Discrete Fourier transform on the qubits `q` of `state`, computed by
/// summation over the register value: |j> -> N^{-1/2} sum_k e^{2 pi i jk/N} |k>.
inline std::vector<Amplitude> reference_qft(const std::vector<Amplitude>& state, const std::vector<cqbm::Qubit>& q) {
    const BasisIndex N = BasisIndex{1} << q.size();
    std::vector<Amplitude> out(state.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (BasisIndex i = 0; i < state.size(); ++i) {
        if (state[i] == Amplitude(0.0)) continue;
        const BasisIndex j = cqbm::read_register(i, q);
        for (BasisIndex k = 0; k < N; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % N) / static_cast<double>(N);
            out[cqbm::write_register(i, q, k)] += state[i] * scale * std::polar(1.0, angle);
        }
    }
    return out;
}

inline std::vector<Amplitude> random_state(unsigned n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Amplitude> a(std::size_t{1} << n);
    double s = 0;
    for (auto& x : a) {
        x = {g(rng), g(rng)};
        s += std::norm(x);
    }
    for (auto& x : a) x /= std::sqrt(s);
    return a;
}

inline double max_diff(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Runs `p` densely on basis state `i` and returns the output, expecting a
/// single basis state with amplitude 1 (no residual phase); -1 otherwise.
inline long long dense_image(const cqbm::Primitive& p, unsigned n, BasisIndex i, double tol = 1e-9) {
    cqbm::StateVector s(n, i);
    for (const auto& g : p.gates) s.apply(g);
    long long hit = -1;
    for (BasisIndex k = 0; k < s.size(); ++k) {
        const Amplitude a = s[k];
        if (std::abs(a - Amplitude(1.0)) <= tol) {
            if (hit >= 0) return -1;
            hit = static_cast<long long>(k);
        } else if (std::abs(a) > tol) {
            return -1;
        }
    }
    return hit;
}

}  // namespace testing_support
