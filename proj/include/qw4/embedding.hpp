// embedding.hpp
// Two-dimensional walk carried on the one-dimensional time axis.
//
// With shifts +-1 and +-N (N odd) the line is cut into segments of width N.
// The segment index is y and the offset inside it is x, so n = x + N y.
// For at most (N-1)/2 steps no two reachable lattice cells share an n.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qw4/coin.hpp"
#include "qw4/walk.hpp"

namespace qw4 {

enum class Axis : std::size_t { plus_x = 0, minus_x = 1, plus_y = 2, minus_y = 3 };

// role[j] is the direction carried by coin state j.
struct AxisAssignment {
    std::array<Axis, 4> role{Axis::plus_x, Axis::minus_x, Axis::plus_y, Axis::minus_y};

    void validate() const {
        std::array<int, 4> seen{};
        for (Axis a : role) {
            const auto k = static_cast<std::size_t>(a);
            if (k > 3 || seen[k]++) throw std::invalid_argument("AxisAssignment: roles must be a permutation");
        }
    }
    friend bool operator==(const AxisAssignment&, const AxisAssignment&) = default;
};

struct EmbeddingParams {
    Position N = 21;
    int steps = 10;
    AxisAssignment axes{};

    Position step_budget() const { return (N - 1) / 2; }

    void validate() const {
        if (N < 3 || N % 2 == 0) throw std::invalid_argument("EmbeddingParams: N must be an odd integer >= 3");
        if (steps < 0) throw std::invalid_argument("EmbeddingParams: steps must be >= 0");
        if (steps > step_budget())
            throw std::invalid_argument("EmbeddingParams: steps exceed (N-1)/2, segments may overlap");
        axes.validate();
    }
};

struct Cell {
    Position x = 0;
    Position y = 0;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

using Grid2DDistribution = std::map<Cell, double>;

inline ShiftVector embedded_shifts(Position N, const AxisAssignment& axes = {}) {
    if (N < 3 || N % 2 == 0) throw std::invalid_argument("embedded_shifts: N must be an odd integer >= 3");
    axes.validate();
    ShiftVector s;
    for (std::size_t j = 0; j < 4; ++j) {
        switch (axes.role[j]) {
            case Axis::plus_x: s.e[j] = +1; break;
            case Axis::minus_x: s.e[j] = -1; break;
            case Axis::plus_y: s.e[j] = +N; break;
            case Axis::minus_y: s.e[j] = -N; break;
        }
    }
    return s;
}

inline ShiftVector embedded_shifts(const EmbeddingParams& p) {
    p.validate();
    return embedded_shifts(p.N, p.axes);
}

// y = n/N rounded to nearest, halves toward zero; x = n - N y.
inline Cell decode_position(Position n, Position N) {
    if (N < 1 || N % 2 == 0) throw std::invalid_argument("decode_position: N must be odd");
    Position y = n / N;  // truncates toward zero
    const Position r = n - N * y;
    if (2 * r > N) ++y;
    else if (2 * r < -N) --y;
    return {n - N * y, y};
}

struct OverlapReport {
    bool ok = true;
    std::optional<int> step;
    std::optional<Position> position;
};

// For every step t and occupied n, counts lattice cells with |x|+|y| <= t
// that encode to n. More than one means the segments alias.
inline OverlapReport overlap_check(const EmbeddingParams& p, const std::vector<WalkState>& trajectory) {
    if (p.N < 3 || p.N % 2 == 0) throw std::invalid_argument("overlap_check: N must be an odd integer >= 3");
    for (const auto& s : trajectory) {
        const Position t = s.step_index;
        for (const auto& [n, v] : s.amplitudes) {
            const Position phys = n + s.midpoint_offset;
            int preimages = 0;
            for (Position y = -t; y <= t; ++y) {
                const Position x = phys - p.N * y;
                if (std::abs(x) + std::abs(y) <= t) ++preimages;
            }
            if (preimages > 1) return {false, s.step_index, phys};
        }
    }
    return {};
}

struct Embedded2DRun {
    std::vector<WalkState> trajectory;
    Grid2DDistribution distribution;
    OverlapReport overlap;
};

inline Embedded2DRun run_embedded_2d_full(const CoinOperator& coin, const CoinVec& initial, const EmbeddingParams& p) {
    p.validate();
    WalkConfig cfg;
    cfg.coin = coin;
    cfg.shifts = embedded_shifts(p);
    cfg.steps = p.steps;
    cfg.initial_coin = initial;

    Embedded2DRun out;
    out.trajectory = evolve(cfg);
    out.overlap = overlap_check(p, out.trajectory);
    if (!out.overlap.ok) throw std::logic_error("run_embedded_2d: segment overlap within the step budget");

    for (const auto& [n, prob] : position_distribution(out.trajectory.back())) {
        const auto [it, inserted] = out.distribution.emplace(decode_position(n, p.N), prob);
        if (!inserted) throw std::logic_error("run_embedded_2d: decoding is not injective");
    }
    return out;
}

inline Grid2DDistribution run_embedded_2d(const CoinOperator& coin, const CoinVec& initial, const EmbeddingParams& p) {
    return run_embedded_2d_full(coin, initial, p).distribution;
}

// Direct walk on the square lattice: a (2t+1)^2 dense grid of coin vectors.
// Shares no code with the line engine beyond the coin matrix.
inline Grid2DDistribution oracle_2d_walk(const CoinOperator& coin, const CoinVec& initial, int steps,
                                         const AxisAssignment& axes = {}) {
    if (steps < 0) throw std::invalid_argument("oracle_2d_walk: steps must be >= 0");
    axes.validate();
    const std::size_t w = 2 * static_cast<std::size_t>(steps) + 1;
    const std::size_t c0 = static_cast<std::size_t>(steps);
    std::vector<CoinVec> grid(w * w), next(w * w);
    auto at = [w](std::vector<CoinVec>& g, std::size_t ix, std::size_t iy) -> CoinVec& { return g[iy * w + ix]; };

    std::array<std::pair<int, int>, 4> delta{};
    for (std::size_t j = 0; j < 4; ++j) {
        switch (axes.role[j]) {
            case Axis::plus_x: delta[j] = {1, 0}; break;
            case Axis::minus_x: delta[j] = {-1, 0}; break;
            case Axis::plus_y: delta[j] = {0, 1}; break;
            case Axis::minus_y: delta[j] = {0, -1}; break;
        }
    }

    at(grid, c0, c0) = initial;
    const Matrix4& m = coin.matrix();
    for (int t = 0; t < steps; ++t) {
        std::fill(next.begin(), next.end(), CoinVec{});
        for (std::size_t iy = 0; iy < w; ++iy)
            for (std::size_t ix = 0; ix < w; ++ix) {
                const CoinVec& a = at(grid, ix, iy);
                for (std::size_t j = 0; j < 4; ++j) {
                    cplx out = 0.0;
                    for (std::size_t k = 0; k < 4; ++k) out += m(j, k) * a[k];
                    if (out == cplx{}) continue;
                    at(next, ix + delta[j].first, iy + delta[j].second)[j] += out;
                }
            }
        std::swap(grid, next);
    }

    Grid2DDistribution dist;
    for (std::size_t iy = 0; iy < w; ++iy)
        for (std::size_t ix = 0; ix < w; ++ix) {
            const double p = at(grid, ix, iy).norm2();
            if (p > 0.0)
                dist.emplace(Cell{static_cast<Position>(ix) - static_cast<Position>(c0),
                                  static_cast<Position>(iy) - static_cast<Position>(c0)},
                             p);
        }
    return dist;
}

inline std::map<Position, double> x_marginal(const Grid2DDistribution& d) {
    std::map<Position, double> m;
    for (const auto& [cell, p] : d) m[cell.x] += p;
    return m;
}

}  // namespace qw4
