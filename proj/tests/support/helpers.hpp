// Shared test helpers: conversions into the dense oracle's plain arrays and
// seeded random unitaries for property checks.

#pragma once

#include <array>
#include <complex>
#include <random>

#include "qw4/qw4.hpp"
#include "dense_walk.hpp"

namespace qw4::oracle {

inline std::array<std::array<std::complex<double>, 4>, 4> plain(const Matrix4& m) {
    std::array<std::array<std::complex<double>, 4>, 4> out{};
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) out[r][c] = m(r, c);
    return out;
}

inline std::array<std::complex<double>, 4> plain(const CoinVec& v) { return v.v; }

inline std::map<std::int64_t, double> oracle_distribution(const WalkConfig& cfg) {
    Matrix4 coin = cfg.coin.matrix();
    if (cfg.apply_sagnac_swap) {
        // Row permutation H- <-> V-, written out by hand.
        for (std::size_t c = 0; c < 4; ++c) std::swap(coin(1, c), coin(3, c));
    }
    return dense_distribution(dense_walk(plain(coin), plain(cfg.initial_coin), cfg.shifts.e, cfg.steps, cfg.initial_position));
}

inline cplx random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return {g(rng), g(rng)};
}

// Haar-ish random unitary via Gram-Schmidt of a Gaussian matrix.
template <std::size_t N>
Matrix<N> random_unitary(std::mt19937_64& rng) {
    std::array<std::array<cplx, N>, N> cols{};
    for (auto& c : cols)
        for (auto& e : c) e = random_complex(rng);
    for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            cplx proj{};
            for (std::size_t i = 0; i < N; ++i) proj += std::conj(cols[j][i]) * cols[k][i];
            for (std::size_t i = 0; i < N; ++i) cols[k][i] -= proj * cols[j][i];
        }
        double n = 0.0;
        for (const auto& e : cols[k]) n += std::norm(e);
        n = std::sqrt(n);
        for (auto& e : cols[k]) e /= n;
    }
    Matrix<N> m;
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) m(r, c) = cols[c][r];
    return m;
}

inline CoinVec random_state(std::mt19937_64& rng) {
    CoinVec v;
    for (std::size_t i = 0; i < 4; ++i) v[i] = random_complex(rng);
    return cplx{1.0 / std::sqrt(v.norm2())} * v;
}

}  // namespace qw4::oracle
