// optics.hpp
// Unitary models of the bench components: wave plates, pi mode converter,
// Dove prism, q-plate and the Sagnac composite, plus initial-state
// preparation from |H> (x) |l=0>.
//
// Two spaces are in use. The coin space is pol {H,V} (x) OAM {+1,-1} in the
// usual [H+, H-, V+, V-] order. The extended space adds the l = 0 mode:
// pol {H,V} (x) OAM {-1, 0, +1}, index 3*pol + (m+1).

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "qw4/coin.hpp"
#include "qw4/tensor.hpp"

namespace qw4 {

using ExtendedState = Vector<6>;

constexpr std::size_t extended_index(std::size_t pol, int m) { return 3 * pol + static_cast<std::size_t>(m + 1); }

// Coin OAM slot 0 is l=+1, slot 1 is l=-1.
constexpr int coin_oam_value(std::size_t slot) { return slot == 0 ? +1 : -1; }

// ---------------------------------------------------------------------------
// Polarization bases (Jones vectors in the H/V basis).

namespace polarization {

inline Vector<2> H() { return {{1.0, 0.0}}; }
inline Vector<2> V() { return {{0.0, 1.0}}; }
inline Vector<2> D() { const double s = 1.0 / std::sqrt(2.0); return {{s, s}}; }
inline Vector<2> A() { const double s = 1.0 / std::sqrt(2.0); return {{s, -s}}; }
inline Vector<2> R() { const double s = 1.0 / std::sqrt(2.0); return {{s, -kI * s}}; }
inline Vector<2> L() { const double s = 1.0 / std::sqrt(2.0); return {{s, kI * s}}; }

// Columns are |L>, |R>: maps circular coordinates to H/V coordinates.
inline Matrix2 circular_to_linear() {
    const double s = 1.0 / std::sqrt(2.0);
    return {s, s, kI * s, -kI * s};
}

}  // namespace polarization

inline CoinVec product_state(const Vector<2>& pol, const Vector<2>& oam) {
    CoinVec out;
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t o = 0; o < 2; ++o) out[coin_index(p, o)] = pol[p] * oam[o];
    return out;
}

// ---------------------------------------------------------------------------
// Elements.

struct HalfWavePlate { double angle; };
struct QuarterWavePlate { double angle; };
struct PolarizationRotator { double angle; };
struct ModeConverterPi {};
struct DovePrism { double angle; int l_magnitude = 1; };
// Charge stored doubled so it stays exact: q = twice_charge / 2.
struct QPlate { int twice_charge; };

using OpticalElement =
    std::variant<HalfWavePlate, QuarterWavePlate, PolarizationRotator, ModeConverterPi, DovePrism, QPlate>;

inline QPlate q_plate(double q) {
    const double twice = 2.0 * q;
    if (!std::isfinite(q) || twice != std::round(twice) || twice == 0.0)
        throw std::invalid_argument("q_plate: charge must be a nonzero half-integer");
    return QPlate{static_cast<int>(twice)};
}

inline std::string element_name(const OpticalElement& e) {
    struct {
        std::string operator()(const HalfWavePlate&) const { return "half_wave_plate"; }
        std::string operator()(const QuarterWavePlate&) const { return "quarter_wave_plate"; }
        std::string operator()(const PolarizationRotator&) const { return "polarization_rotator"; }
        std::string operator()(const ModeConverterPi&) const { return "mode_converter_pi"; }
        std::string operator()(const DovePrism&) const { return "dove_prism"; }
        std::string operator()(const QPlate&) const { return "q_plate"; }
    } v;
    return std::visit(v, e);
}

inline void validate(const OpticalElement& e) {
    auto finite_angle = [](double a) {
        if (!std::isfinite(a)) throw std::invalid_argument("optical element: angle must be finite");
    };
    std::visit(
        [&](const auto& el) {
            using T = std::decay_t<decltype(el)>;
            if constexpr (std::is_same_v<T, HalfWavePlate> || std::is_same_v<T, QuarterWavePlate> ||
                          std::is_same_v<T, PolarizationRotator>) {
                finite_angle(el.angle);
            } else if constexpr (std::is_same_v<T, DovePrism>) {
                finite_angle(el.angle);
                if (el.l_magnitude < 1) throw std::invalid_argument("dove_prism: |l| must be >= 1");
            } else if constexpr (std::is_same_v<T, QPlate>) {
                if (el.twice_charge == 0) throw std::invalid_argument("q_plate: charge must be nonzero");
            }
        },
        e);
}

// Jones matrices.
namespace jones {

inline Matrix2 rotation(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {c, -s, s, c};
}

inline Matrix2 half_wave_plate(double a) {
    const double c = std::cos(2 * a), s = std::sin(2 * a);
    return {c, s, s, -c};
}

// Fast axis at angle a, retardance pi/2, symmetric phase convention.
inline Matrix2 quarter_wave_plate(double a) {
    const cplx ph = std::exp(cplx{0.0, -std::numbers::pi / 4.0});
    const Matrix2 retarder{ph, 0.0, 0.0, std::conj(ph)};
    return rotation(a) * retarder * rotation(-a);
}

}  // namespace jones

namespace detail {

// Dove prism on the coin space:
//   |H,+-> -> e^{-+2il theta} |H,-+>,   |V,+-> -> -e^{+-2il theta} |V,-+>
inline Matrix4 dove_coin(double theta, int l) {
    const cplx e = std::exp(cplx{0.0, 2.0 * l * theta});
    Matrix4 d;
    d(coin_index(0, 1), coin_index(0, 0)) = std::conj(e);
    d(coin_index(0, 0), coin_index(0, 1)) = e;
    d(coin_index(1, 1), coin_index(1, 0)) = -e;
    d(coin_index(1, 0), coin_index(1, 1)) = -std::conj(e);
    return d;
}

// Lifts a polarization-only Jones matrix to the extended space.
inline Matrix6 lift_polarization(const Matrix2& j) {
    Matrix6 out;
    for (std::size_t pr = 0; pr < 2; ++pr)
        for (std::size_t pc = 0; pc < 2; ++pc)
            for (int m = -1; m <= 1; ++m) out(extended_index(pr, m), extended_index(pc, m)) = j(pr, pc);
    return out;
}

// Embeds a coin-space operator into the extended space, identity on l=0.
inline Matrix6 lift_coin(const Matrix4& u) {
    Matrix6 out;
    for (std::size_t p = 0; p < 2; ++p) out(extended_index(p, 0), extended_index(p, 0)) = 1.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            out(extended_index(r / 2, coin_oam_value(r % 2)), extended_index(c / 2, coin_oam_value(c % 2))) = u(r, c);
    return out;
}

// Pairs |L,m> <-> |R,m+2q> inside the truncated ladder. Returns the partner
// of (circ_pol, m), circ_pol 0 = L, 1 = R, if it lies within m in {-1,0,1}.
inline std::optional<std::pair<std::size_t, int>> qplate_partner(std::size_t circ_pol, int m, int twice_q) {
    const int target = circ_pol == 0 ? m + twice_q : m - twice_q;
    if (target < -1 || target > 1) return std::nullopt;
    return std::pair<std::size_t, int>{1 - circ_pol, target};
}

inline Matrix6 qplate_circular(int twice_q) {
    Matrix6 u;
    for (std::size_t c = 0; c < 2; ++c)
        for (int m = -1; m <= 1; ++m) {
            const auto partner = qplate_partner(c, m, twice_q);
            const auto [pc, pm] = partner.value_or(std::pair<std::size_t, int>{c, m});
            u(extended_index(pc, pm), extended_index(c, m)) = 1.0;
        }
    return u;
}

inline Matrix6 qplate_extended(int twice_q) {
    const Matrix6 b = lift_polarization(polarization::circular_to_linear());
    return b * qplate_circular(twice_q) * b.adjoint();
}

}  // namespace detail

// Coin-space unitary for an element. The q-plate changes |m| and is rejected.
inline Matrix4 coin_unitary(const OpticalElement& e) {
    validate(e);
    const Matrix2 id = gates::identity2();
    struct {
        Matrix2 id;
        Matrix4 operator()(const HalfWavePlate& el) const { return tensor2x2(jones::half_wave_plate(el.angle), id); }
        Matrix4 operator()(const QuarterWavePlate& el) const { return tensor2x2(jones::quarter_wave_plate(el.angle), id); }
        Matrix4 operator()(const PolarizationRotator& el) const { return tensor2x2(jones::rotation(el.angle), id); }
        Matrix4 operator()(const ModeConverterPi&) const { return tensor2x2(id, gates::hadamard2()); }
        Matrix4 operator()(const DovePrism& el) const { return detail::dove_coin(el.angle, el.l_magnitude); }
        Matrix4 operator()(const QPlate&) const {
            throw std::invalid_argument("q_plate: needs the extended OAM space (it changes |m|)");
        }
    } v{id};
    return std::visit(v, e);
}

// Extended-space unitary. OAM elements act on the l = +-1 pair only, so the
// Dove prism here must have |l| = 1; on l = 0 it leaves H and flips V's sign.
inline Matrix6 extended_unitary(const OpticalElement& e) {
    validate(e);
    if (const auto* q = std::get_if<QPlate>(&e)) return detail::qplate_extended(q->twice_charge);
    if (const auto* d = std::get_if<DovePrism>(&e)) {
        if (d->l_magnitude != 1) throw std::invalid_argument("dove_prism: extended space only holds |l| <= 1");
        Matrix6 out = detail::lift_coin(detail::dove_coin(d->angle, 1));
        out(extended_index(1, 0), extended_index(1, 0)) = -1.0;
        return out;
    }
    if (std::holds_alternative<ModeConverterPi>(e)) return detail::lift_coin(coin_unitary(e));
    // Remaining elements are polarization-only.
    Matrix2 j;
    if (const auto* h = std::get_if<HalfWavePlate>(&e)) j = jones::half_wave_plate(h->angle);
    else if (const auto* qw = std::get_if<QuarterWavePlate>(&e)) j = jones::quarter_wave_plate(qw->angle);
    else j = jones::rotation(std::get<PolarizationRotator>(e).angle);
    return detail::lift_polarization(j);
}

template <std::size_t N>
    requires(N == 4 || N == 6)
Matrix<N> element_unitary(const OpticalElement& e) {
    if constexpr (N == 4)
        return coin_unitary(e);
    else
        return extended_unitary(e);
}

// Applies a q-plate to an extended state. Amplitude on a state whose partner
// would leave m in {-1,0,1} is rejected rather than dropped.
inline ExtendedState apply_q_plate(const ExtendedState& s, QPlate q, double tol = kAlgebraicTol) {
    validate(q);
    const ExtendedState circ = detail::lift_polarization(polarization::circular_to_linear()).adjoint() * s;
    for (std::size_t c = 0; c < 2; ++c)
        for (int m = -1; m <= 1; ++m)
            if (!detail::qplate_partner(c, m, q.twice_charge) && std::abs(circ[extended_index(c, m)]) > tol)
                throw std::invalid_argument("q_plate: input has amplitude outside the truncated OAM ladder");
    return detail::qplate_extended(q.twice_charge) * s;
}

inline ExtendedState embed_coin_state(const CoinVec& v) {
    ExtendedState out;
    for (std::size_t i = 0; i < 4; ++i) out[extended_index(i / 2, coin_oam_value(i % 2))] = v[i];
    return out;
}

// Drops the l = 0 components.
inline CoinVec restrict_to_coin(const ExtendedState& s) {
    CoinVec out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = s[extended_index(i / 2, coin_oam_value(i % 2))];
    return out;
}

inline Matrix4 restrict_to_coin(const Matrix6& u) {
    Matrix4 out;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            out(r, c) = u(extended_index(r / 2, coin_oam_value(r % 2)), extended_index(c / 2, coin_oam_value(c % 2)));
    return out;
}

// ---------------------------------------------------------------------------
// Sagnac interferometer with an internal Dove prism.
//
// Input wave plate: HWP at pi/8 (H -> D, V -> A). The PBS sends H and V
// around the loop in opposite senses; the Dove-prism rule above already
// carries the direction dependence through its H/V sign asymmetry, so the
// loop is the rule applied once. At theta = pi/8 this gives
//   |D>(a|+> + b|->) -> e^{-i pi/4} sqrt2 (a|->|R> + i b|+>|L>).
//
// Post-rotation: solving (P (x) Q) * loop * input = U_SI for theta = pi/8
// yields a product with
//   P = H2 diag(1, i)       (QWP at 0 then HWP at pi/8, up to phase)
//   Q = X  diag(1, i)       (OAM phase then l -> -l flip)
// which is hard-coded below.

inline constexpr double kSagnacDoveAngle = std::numbers::pi / 8.0;

inline Matrix4 sagnac_input_rotation() { return tensor2x2(jones::half_wave_plate(std::numbers::pi / 8.0), gates::identity2()); }

// Input rotation plus the loop, before any post-rotation.
inline Matrix4 sagnac_interior(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("sagnac: angle must be finite");
    return detail::dove_coin(theta, 1) * sagnac_input_rotation();
}

inline Matrix2 sagnac_pol_post_rotation() {
    return jones::half_wave_plate(std::numbers::pi / 8.0) * jones::quarter_wave_plate(0.0);
}

inline Matrix2 sagnac_oam_post_rotation() { return {0.0, kI, 1.0, 0.0}; }

inline CoinOperator sagnac_composite(double theta) {
    return {"sagnac_composite",
            tensor2x2(sagnac_pol_post_rotation(), sagnac_oam_post_rotation()) * sagnac_interior(theta)};
}

// ---------------------------------------------------------------------------
// Initial state preparation.

struct InitialStatePlan {
    std::vector<OpticalElement> elements;  // act in order on |H, l=0>
    CoinVec reached;                       // coin state after the elements, global phase removed
    cplx stripped_phase;                   // phase removed from `reached`
    Matrix4 residual;                      // U(4) still needed after the elements
    bool residual_entangling = false;
    CoinVec achieved;                      // residual * reached
};

namespace detail {

// Unitary with first column v: the reflection taking e^{i arg v0} e0 to v,
// times that phase on e0. Gives I for v = e0 and H2 for (1,1)/sqrt2.
inline Matrix2 completion2(const Vector<2>& v) {
    const cplx ph = std::abs(v[0]) > 0.0 ? v[0] / std::abs(v[0]) : cplx{1.0};
    const Vector<2> u{{ph - v[0], -v[1]}};
    const double n2 = u.norm2();
    if (n2 < 1e-24) return {ph, 0.0, 0.0, 1.0};
    Matrix2 r = Matrix2::identity();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) r(i, j) -= 2.0 * u[i] * std::conj(u[j]) / n2;
    return r * Matrix2{ph, 0.0, 0.0, 1.0};
}

inline Matrix4 completion4(const CoinVec& t) {
    std::array<CoinVec, 4> cols{t};
    std::size_t n = 1;
    for (std::size_t k = 0; k < 4 && n < 4; ++k) {
        CoinVec w = CoinVec::basis(k);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < n; ++j) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < 4; ++i) proj += std::conj(cols[j][i]) * w[i];
                w = w - proj * cols[j];
            }
        const double nrm = std::sqrt(w.norm2());
        if (nrm < 1e-6) continue;
        cols[n++] = cplx{1.0 / nrm} * w;
    }
    Matrix4 out;
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t r = 0; r < 4; ++r) out(r, c) = cols[c][r];
    return out;
}

// Residual U(4) with residual * |H+> = target; a local product when possible.
inline std::pair<Matrix4, bool> residual_for(const CoinVec& t) {
    const cplx det = t[0] * t[3] - t[1] * t[2];
    if (std::abs(det) > kAlgebraicTol) return {completion4(t), true};
    const std::size_t row = std::norm(t[0]) + std::norm(t[1]) >= std::norm(t[2]) + std::norm(t[3]) ? 0 : 1;
    Vector<2> oam{{t[coin_index(row, 0)], t[coin_index(row, 1)]}};
    oam = cplx{1.0 / std::sqrt(oam.norm2())} * oam;
    Vector<2> pol;
    for (std::size_t p = 0; p < 2; ++p)
        pol[p] = std::conj(oam[0]) * t[coin_index(p, 0)] + std::conj(oam[1]) * t[coin_index(p, 1)];
    return {tensor2x2(completion2(pol), completion2(oam)), false};
}

}  // namespace detail

// Builds the pipeline |H,0> -> QWP(-pi/4) -> q-plate(1/2) -> QWP(-pi/4),
// landing on |H,+> up to phase, and reports the residual U(4) to the target.
inline InitialStatePlan prepare_initial_state(const CoinVec& target) {
    if (!target.finite() || std::abs(target.norm2() - 1.0) > 1e-10)
        throw std::invalid_argument("prepare_initial_state: target must be normalized");

    InitialStatePlan plan;
    plan.elements = {QuarterWavePlate{-std::numbers::pi / 4.0}, q_plate(0.5), QuarterWavePlate{-std::numbers::pi / 4.0}};

    ExtendedState s = ExtendedState::basis(extended_index(0, 0));
    for (const auto& e : plan.elements) {
        if (const auto* q = std::get_if<QPlate>(&e))
            s = apply_q_plate(s, *q);
        else
            s = extended_unitary(e) * s;
    }
    for (std::size_t p = 0; p < 2; ++p)
        if (std::abs(s[extended_index(p, 0)]) > kAlgebraicTol)
            throw std::logic_error("prepare_initial_state: pipeline left amplitude in l=0");

    CoinVec reached = restrict_to_coin(s);
    const cplx lead = reached[index(CoinBasis::Hp)];
    if (std::abs(std::abs(lead) - 1.0) > kAlgebraicTol)
        throw std::logic_error("prepare_initial_state: pipeline did not reach |H,+>");
    plan.stripped_phase = lead / std::abs(lead);
    plan.reached = std::conj(plan.stripped_phase) * reached;

    std::tie(plan.residual, plan.residual_entangling) = detail::residual_for(target);
    plan.achieved = plan.residual * plan.reached;
    if (max_abs_diff(plan.achieved, target) > 1e-10)
        throw std::logic_error("prepare_initial_state: achieved state does not match target");
    return plan;
}

// ---------------------------------------------------------------------------
// q-plate round trip: q-plate, an inner polarization operation on the l=0
// subspace, then a second identical q-plate, restricted to the coin space.

struct QPlateRoundtrip {
    Matrix4 actual;
    Matrix4 expected;
    double leakage = 0.0;  // amplitude left in l=0 for a coin-space input
    bool ok = false;
};

namespace detail {

// Expected action by following each circular coin basis state along its
// q-plate pairing, independent of the matrix construction above.
inline Matrix4 qplate_roundtrip_expected(int twice_q, const Matrix2& inner) {
    const Matrix2 b = polarization::circular_to_linear();
    const Matrix2 inner_circ = b.adjoint() * inner * b;
    Matrix4 circ;  // coin space in circular basis, index 2*c + slot
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t slot = 0; slot < 2; ++slot) {
            const std::size_t col = coin_index(c, slot);
            const int m = coin_oam_value(slot);
            const auto partner = qplate_partner(c, m, twice_q);
            if (!partner || partner->second != 0) {
                circ(col, col) = 1.0;
                continue;
            }
            for (std::size_t c2 = 0; c2 < 2; ++c2) {
                const auto back = qplate_partner(c2, 0, twice_q);
                if (!back) throw std::logic_error("q-plate round trip leaves the ladder");
                const std::size_t row = coin_index(back->first, back->second == +1 ? 0 : 1);
                circ(row, col) += inner_circ(c2, partner->first);
            }
        }
    const Matrix4 b4 = tensor2x2(b, gates::identity2());
    return b4 * circ * b4.adjoint();
}

}  // namespace detail

inline QPlateRoundtrip qplate_roundtrip(double q, const Matrix2& inner) {
    if (!is_unitary(inner, kAlgebraicTol)) throw std::invalid_argument("qplate_roundtrip: inner operation is not unitary");
    const QPlate plate = q_plate(q);

    Matrix6 inner6;
    for (int m : {-1, 1})
        for (std::size_t p = 0; p < 2; ++p) inner6(extended_index(p, m), extended_index(p, m)) = 1.0;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) inner6(extended_index(r, 0), extended_index(c, 0)) = inner(r, c);

    const Matrix6 qp = detail::qplate_extended(plate.twice_charge);
    const Matrix6 full = qp * inner6 * qp;

    QPlateRoundtrip out;
    out.actual = restrict_to_coin(full);
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t p = 0; p < 2; ++p)
            out.leakage = std::max(out.leakage,
                                   std::abs(full(extended_index(p, 0), extended_index(c / 2, coin_oam_value(c % 2)))));
    out.expected = detail::qplate_roundtrip_expected(plate.twice_charge, inner);
    out.ok = out.leakage <= kAlgebraicTol && is_unitary(out.actual, kAlgebraicTol) &&
             max_abs_diff(out.actual, out.expected) <= kAlgebraicTol;
    return out;
}

inline bool qplate_roundtrip_check(double q, const Matrix2& inner) { return qplate_roundtrip(q, inner).ok; }

}  // namespace qw4
