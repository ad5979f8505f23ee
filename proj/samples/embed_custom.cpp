// Library usage: a 2D walk through the line embedding, checked against a
// direct lattice walk.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qw4/qw4.hpp"

int main() {
    using namespace qw4;
    const CoinVec phi2{{0.5, 0.5, 0.5, 0.5}};
    const EmbeddingParams params{21, 10};
    const auto grid = run_embedded_2d(hadamard4(), phi2, params);
    const auto direct = oracle_2d_walk(hadamard4(), phi2, params.steps);

    double gap = 0.0;
    for (const auto& [cell, p] : direct) gap = std::max(gap, std::abs(p - grid.at(cell)));
    std::printf("cells=%zu max gap to lattice walk=%.3g\n", grid.size(), gap);

    WalkConfig cfg;
    cfg.coin = grover4();
    cfg.initial_coin = CoinVec{{0.5, 0.5, -0.5, -0.5}};
    const auto dist = position_distribution(evolve(cfg).back());
    std::printf("grover phi1, 12 steps: argmax n=%lld\n", static_cast<long long>(argmax_position(dist)));
    return 0;
}
