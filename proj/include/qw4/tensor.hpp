// tensor.hpp
// Small fixed-size complex linear algebra for the four-state coin.
//
// Every coin-space object in this library is indexed through the single
// basis convention below: polarization is the first qubit, OAM the second,
// and the ordering is [H+, H-, V+, V-] == [|00>, |01>, |10>, |11>].

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string_view>

namespace qw4 {

using cplx = std::complex<double>;

inline constexpr double kAlgebraicTol = 1e-12;
inline constexpr double kCircuitTol = 1e-8;

inline constexpr cplx kI{0.0, 1.0};

// Coin basis, polarization major.
enum class CoinBasis : std::size_t { Hp = 0, Hm = 1, Vp = 2, Vm = 3 };

inline constexpr std::array<std::string_view, 4> kCoinLabels{"H+", "H-", "V+", "V-"};

constexpr std::size_t index(CoinBasis b) { return static_cast<std::size_t>(b); }
constexpr std::size_t coin_index(std::size_t pol, std::size_t oam) { return 2 * pol + oam; }

template <std::size_t N>
concept SupportedDim = (N == 2 || N == 4 || N == 6);

// Dense N-vector of amplitudes.
template <std::size_t N>
struct Vector {
    std::array<cplx, N> v{};

    constexpr cplx& operator[](std::size_t i) { return v[i]; }
    constexpr const cplx& operator[](std::size_t i) const { return v[i]; }
    static constexpr std::size_t size() { return N; }

    static Vector basis(std::size_t i) {
        Vector out;
        out.v.at(i) = 1.0;
        return out;
    }

    double norm2() const {
        double s = 0.0;
        for (const auto& a : v) s += std::norm(a);
        return s;
    }

    bool finite() const {
        return std::all_of(v.begin(), v.end(), [](const cplx& a) {
            return std::isfinite(a.real()) && std::isfinite(a.imag());
        });
    }

    friend Vector operator*(cplx s, Vector x) {
        for (auto& a : x.v) a *= s;
        return x;
    }
    friend Vector operator+(Vector a, const Vector& b) {
        for (std::size_t i = 0; i < N; ++i) a.v[i] += b.v[i];
        return a;
    }
    friend Vector operator-(Vector a, const Vector& b) {
        for (std::size_t i = 0; i < N; ++i) a.v[i] -= b.v[i];
        return a;
    }
};

// Per-position coin state.
using CoinVec = Vector<4>;

inline double max_abs_diff(const CoinVec& a, const CoinVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Row-major N x N complex matrix.
template <std::size_t N>
    requires SupportedDim<N>
class Matrix {
public:
    static constexpr std::size_t dim = N;

    constexpr Matrix() = default;

    // Row-major literal; throws on wrong entry count.
    Matrix(std::initializer_list<cplx> entries) {
        if (entries.size() != N * N) throw std::invalid_argument("Matrix: entry count does not match dimension");
        std::copy(entries.begin(), entries.end(), m_.begin());
    }

    static Matrix identity() {
        Matrix out;
        for (std::size_t i = 0; i < N; ++i) out(i, i) = 1.0;
        return out;
    }

    // Permutation matrix sending basis i to basis perm[i].
    static Matrix permutation(const std::array<std::size_t, N>& perm) {
        Matrix out;
        for (std::size_t i = 0; i < N; ++i) out(perm.at(i), i) = 1.0;
        return out;
    }

    cplx& operator()(std::size_t r, std::size_t c) { return m_[r * N + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return m_[r * N + c]; }

    const std::array<cplx, N * N>& entries() const { return m_; }

    Matrix adjoint() const {
        Matrix out;
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    bool finite() const {
        return std::all_of(m_.begin(), m_.end(), [](const cplx& a) {
            return std::isfinite(a.real()) && std::isfinite(a.imag());
        });
    }

    friend Matrix operator*(cplx s, Matrix a) {
        for (auto& e : a.m_) e *= s;
        return a;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < N * N; ++i) a.m_[i] += b.m_[i];
        return a;
    }
    friend Matrix operator-(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < N * N; ++i) a.m_[i] -= b.m_[i];
        return a;
    }
    friend bool operator==(const Matrix&, const Matrix&) = default;

    friend Vector<N> operator*(const Matrix& a, const Vector<N>& x) {
        Vector<N> y;
        for (std::size_t r = 0; r < N; ++r) {
            cplx acc = 0.0;
            for (std::size_t c = 0; c < N; ++c) acc += a(r, c) * x[c];
            y[r] = acc;
        }
        return y;
    }

private:
    std::array<cplx, N * N> m_{};
};

using Matrix2 = Matrix<2>;
using Matrix4 = Matrix<4>;
using Matrix6 = Matrix<6>;

template <std::size_t N>
Matrix<N> mat_mul(const Matrix<N>& a, const Matrix<N>& b) {
    Matrix<N> out;
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t k = 0; k < N; ++k) {
            const cplx ark = a(r, k);
            if (ark == cplx{}) continue;
            for (std::size_t c = 0; c < N; ++c) out(r, c) += ark * b(k, c);
        }
    return out;
}

template <std::size_t N>
Matrix<N> operator*(const Matrix<N>& a, const Matrix<N>& b) {
    return mat_mul(a, b);
}

// Kronecker product, polarization factor first.
inline Matrix4 tensor2x2(const Matrix2& pol, const Matrix2& oam) {
    Matrix4 out;
    for (std::size_t pr = 0; pr < 2; ++pr)
        for (std::size_t pc = 0; pc < 2; ++pc)
            for (std::size_t qr = 0; qr < 2; ++qr)
                for (std::size_t qc = 0; qc < 2; ++qc)
                    out(coin_index(pr, qr), coin_index(pc, qc)) = pol(pr, pc) * oam(qr, qc);
    return out;
}

template <std::size_t N>
double max_abs(const Matrix<N>& a) {
    double m = 0.0;
    for (const auto& e : a.entries()) m = std::max(m, std::abs(e));
    return m;
}

template <std::size_t N>
double max_abs_diff(const Matrix<N>& a, const Matrix<N>& b) {
    return max_abs(a - b);
}

// max-norm of (m^dagger m - I) <= tol
template <std::size_t N>
bool is_unitary(const Matrix<N>& m, double tol = kAlgebraicTol) {
    if (!(tol > 0.0)) throw std::invalid_argument("is_unitary: tolerance must be positive");
    if (!m.finite()) return false;
    return max_abs_diff(mat_mul(m.adjoint(), m), Matrix<N>::identity()) <= tol;
}

// Finds the unit-modulus lambda aligning b to a at b's largest-modulus entry.
template <std::size_t N>
cplx global_phase_between(const Matrix<N>& a, const Matrix<N>& b) {
    std::size_t best = 0;
    double best_mod = -1.0;
    for (std::size_t i = 0; i < N * N; ++i) {
        const double m = std::abs(b.entries()[i]);
        if (m > best_mod) {
            best_mod = m;
            best = i;
        }
    }
    if (best_mod == 0.0) throw std::invalid_argument("equal_up_to_global_phase: reference matrix is zero");
    const cplx ratio = a.entries()[best] / b.entries()[best];
    const double r = std::abs(ratio);
    return r == 0.0 ? cplx{1.0, 0.0} : ratio / r;
}

template <std::size_t N>
bool equal_up_to_global_phase(const Matrix<N>& a, const Matrix<N>& b, double tol = kAlgebraicTol) {
    if (!(tol > 0.0)) throw std::invalid_argument("equal_up_to_global_phase: tolerance must be positive");
    const cplx lambda = global_phase_between(a, b);
    return max_abs_diff(a, lambda * b) <= tol;
}

// Same test for state vectors.
template <std::size_t N>
bool equal_up_to_global_phase(const Vector<N>& a, const Vector<N>& b, double tol = kAlgebraicTol) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < N; ++i)
        if (std::abs(b[i]) > std::abs(b[best])) best = i;
    if (std::abs(b[best]) == 0.0) throw std::invalid_argument("equal_up_to_global_phase: reference vector is zero");
    cplx lambda = a[best] / b[best];
    lambda = std::abs(lambda) == 0.0 ? cplx{1.0, 0.0} : lambda / std::abs(lambda);
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i] - lambda * b[i]));
    return m <= tol;
}

// A 2x2 matrix times 2^{-k/2}. The prefactor stays symbolic so Kronecker
// products of 1/sqrt2-normalized gates come out exact.
struct ScaledMatrix2 {
    Matrix2 unscaled;
    int half_powers = 0;

    static double scale(int k) {
        if (k < 0) throw std::invalid_argument("ScaledMatrix2: negative half power");
        const double s = std::ldexp(1.0, -(k / 2));
        return k % 2 == 0 ? s : s / std::sqrt(2.0);
    }
    Matrix2 value() const { return cplx{scale(half_powers)} * unscaled; }
    operator Matrix2() const { return value(); }
};

inline Matrix4 tensor2x2(const ScaledMatrix2& pol, const ScaledMatrix2& oam) {
    return cplx{ScaledMatrix2::scale(pol.half_powers + oam.half_powers)} * tensor2x2(pol.unscaled, oam.unscaled);
}

namespace gates {

inline Matrix2 identity2() { return Matrix2::identity(); }

inline ScaledMatrix2 hadamard2() { return {{1.0, 1.0, 1.0, -1.0}, 1}; }

inline Matrix2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Matrix2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

// |pol, oam> -> |pol, oam XOR pol>
inline Matrix4 cnot_pol_control() { return Matrix4::permutation({0, 1, 3, 2}); }

}  // namespace gates

}  // namespace qw4
