// walk.hpp
// Discrete-time walk on the integer line with a four-state coin.
//
// One step is |phi_{t+1}> = S C |phi_t>, optionally S' = U_SI S C for the
// as-built interferometer. Positions are stored sparsely; the state at step
// t is supported on [t min(e), t max(e)] around the start, minus whatever
// midpoint offset has been removed by recentering.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <vector>

#include "qw4/coin.hpp"
#include "qw4/tensor.hpp"

namespace qw4 {

using Position = std::int64_t;

// Displacement per coin state, indexed by the coin basis.
struct ShiftVector {
    std::array<Position, 4> e{+1, -1, +2, -2};

    Position operator[](std::size_t j) const { return e[j]; }
    Position min() const { return *std::min_element(e.begin(), e.end()); }
    Position max() const { return *std::max_element(e.begin(), e.end()); }
    bool unbiased() const { return e[0] + e[1] + e[2] + e[3] == 0; }

    friend bool operator==(const ShiftVector&, const ShiftVector&) = default;
};

struct WalkState {
    std::map<Position, CoinVec> amplitudes;
    int step_index = 0;
    Position midpoint_offset = 0;

    double total_probability() const {
        double s = 0.0;
        for (const auto& [n, v] : amplitudes) s += v.norm2();
        return s;
    }
};

struct WalkConfig {
    CoinOperator coin = grover4();
    bool apply_sagnac_swap = false;
    ShiftVector shifts{};
    int steps = 12;
    Position initial_position = 0;
    CoinVec initial_coin = CoinVec::basis(0);
    bool recenter = false;
};

inline void validate(const WalkConfig& cfg) {
    if (cfg.steps < 0) throw std::invalid_argument("WalkConfig: steps must be >= 0");
    if (!cfg.initial_coin.finite() || std::abs(cfg.initial_coin.norm2() - 1.0) > kAlgebraicTol)
        throw std::invalid_argument("WalkConfig: initial coin state must be normalized");
}

inline WalkState initial_state(const WalkConfig& cfg) {
    validate(cfg);
    WalkState s;
    s.amplitudes.emplace(cfg.initial_position, cfg.initial_coin);
    return s;
}

// Translates every position by -offset.
inline WalkState recenter(const WalkState& s, Position offset) {
    if (offset == 0) return s;
    WalkState out;
    out.step_index = s.step_index;
    out.midpoint_offset = s.midpoint_offset + offset;
    for (const auto& [n, v] : s.amplitudes) out.amplitudes.emplace_hint(out.amplitudes.end(), n - offset, v);
    return out;
}

// Cumulative midpoint drift after t steps, rounded toward zero.
inline Position midpoint_after(const ShiftVector& e, int t) {
    return (static_cast<Position>(t) * (e.min() + e.max())) / 2;
}

inline Matrix4 effective_coin(const WalkConfig& cfg) {
    return cfg.apply_sagnac_swap ? mat_mul(sagnac_swap().matrix(), cfg.coin.matrix()) : cfg.coin.matrix();
}

inline WalkState step(const WalkState& s, const WalkConfig& cfg) {
    const Matrix4 coin = effective_coin(cfg);
    WalkState out;
    out.step_index = s.step_index + 1;
    out.midpoint_offset = s.midpoint_offset;
    for (const auto& [n, v] : s.amplitudes) {
        const CoinVec w = coin * v;
        for (std::size_t j = 0; j < 4; ++j) {
            if (w[j] == cplx{}) continue;
            out.amplitudes[n + cfg.shifts[j]][j] += w[j];
        }
    }
    std::erase_if(out.amplitudes, [](const auto& kv) { return kv.second.norm2() == 0.0; });
    if (cfg.recenter)
        out = recenter(out, midpoint_after(cfg.shifts, out.step_index) - midpoint_after(cfg.shifts, s.step_index));
    return out;
}

// States for t = 0 .. steps.
inline std::vector<WalkState> evolve(const WalkConfig& cfg) {
    std::vector<WalkState> out;
    out.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    out.push_back(initial_state(cfg));
    for (int t = 0; t < cfg.steps; ++t) out.push_back(step(out.back(), cfg));
    return out;
}

inline std::map<Position, double> position_distribution(const WalkState& s) {
    std::map<Position, double> p;
    for (const auto& [n, v] : s.amplitudes) p.emplace_hint(p.end(), n, v.norm2());
    return p;
}

inline std::array<double, 4> coin_marginal(const WalkState& s) {
    std::array<double, 4> m{};
    for (const auto& [n, v] : s.amplitudes)
        for (std::size_t j = 0; j < 4; ++j) m[j] += std::norm(v[j]);
    return m;
}

// Position of largest probability; ties resolve to the smallest |n|, then
// the smaller n.
inline Position argmax_position(const std::map<Position, double>& dist) {
    if (dist.empty()) throw std::invalid_argument("argmax_position: empty distribution");
    auto best = dist.begin();
    for (auto it = dist.begin(); it != dist.end(); ++it) {
        if (it->second > best->second ||
            (it->second == best->second && std::abs(it->first) < std::abs(best->first)))
            best = it;
    }
    return best->first;
}

}  // namespace qw4
