#include <gtest/gtest.h>

#include <random>

#include "qw4/coin.hpp"
#include "support/helpers.hpp"

using namespace qw4;

TEST(Coin, HadamardFirstColumnIsUniform) {
    const CoinVec out = hadamard4().apply(CoinVec::basis(index(CoinBasis::Hp)));
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(out[j], cplx(0.5));
}

TEST(Coin, HadamardIsSelfInverseOnStates) {
    std::mt19937_64 rng(5);
    const auto h = hadamard4();
    for (int i = 0; i < 20; ++i) {
        const CoinVec v = oracle::random_state(rng);
        EXPECT_LE(max_abs_diff(h.apply(h.apply(v)), v), 1e-15);
    }
}

TEST(Coin, HadamardFactorizes) {
    EXPECT_EQ(hadamard4().matrix(), tensor2x2(gates::hadamard2(), gates::hadamard2()));
}

TEST(Coin, GroverPatternIsExact) {
    const Matrix4 g = grover4().matrix();
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(g(r, c), cplx(r == c ? -0.5 : 0.5));
    EXPECT_EQ(mat_mul(g, g), Matrix4::identity());
}

TEST(Coin, GroverFixesUniformState) {
    const CoinVec u{{0.5, 0.5, 0.5, 0.5}};
    EXPECT_EQ(max_abs_diff(grover4().apply(u), u), 0.0);
}

TEST(Coin, GroverFirstColumn) {
    const CoinVec out = grover4().apply(CoinVec::basis(0));
    EXPECT_EQ(out[0], cplx(-0.5));
    for (std::size_t j = 1; j < 4; ++j) EXPECT_EQ(out[j], cplx(0.5));
}

TEST(Coin, SagnacSwapExchangesHMinusAndVMinus) {
    const auto s = sagnac_swap();
    EXPECT_EQ(max_abs_diff(s.apply(CoinVec::basis(index(CoinBasis::Hm))), CoinVec::basis(index(CoinBasis::Vm))), 0.0);
    EXPECT_EQ(max_abs_diff(s.apply(CoinVec::basis(index(CoinBasis::Hp))), CoinVec::basis(index(CoinBasis::Hp))), 0.0);
    EXPECT_EQ(max_abs_diff(s.apply(CoinVec::basis(index(CoinBasis::Vp))), CoinVec::basis(index(CoinBasis::Vp))), 0.0);
    EXPECT_EQ(mat_mul(s.matrix(), s.matrix()), Matrix4::identity());
}

TEST(Coin, ModifiedCoinSwapsRowsOneAndThree) {
    const Matrix4 h = hadamard4().matrix();
    const auto hm = modified_coin(hadamard4());
    EXPECT_EQ(hm.name(), "hadamard4'");
    for (std::size_t c = 0; c < 4; ++c) {
        EXPECT_EQ(hm.matrix()(0, c), h(0, c));
        EXPECT_EQ(hm.matrix()(1, c), h(3, c));
        EXPECT_EQ(hm.matrix()(2, c), h(2, c));
        EXPECT_EQ(hm.matrix()(3, c), h(1, c));
    }
}

TEST(Coin, ModifiedIdentityIsSwap) {
    EXPECT_EQ(modified_coin(CoinOperator{"id", Matrix4::identity()}).matrix(), sagnac_swap().matrix());
}

TEST(Coin, ModifiedCoinIsInvolution) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 20; ++i) {
        const CoinOperator c{"rand", oracle::random_unitary<4>(rng)};
        const auto twice = modified_coin(modified_coin(c));
        EXPECT_EQ(twice.matrix(), c.matrix());
        EXPECT_EQ(twice.name(), "rand");
        EXPECT_TRUE(is_unitary(modified_coin(c).matrix()));
    }
}

TEST(Coin, NonUnitaryOperatorRejected) {
    EXPECT_THROW((CoinOperator{"bad", cplx{2.0} * Matrix4::identity()}), std::invalid_argument);
}

TEST(Circuit, UncorrectedHadamardCircuitIsH4) {
    EXPECT_LE(max_abs_diff(compile_circuit(hadamard_circuit(false)).matrix(), hadamard4().matrix()), 1e-15);
}

TEST(Circuit, CorrectedHadamardCircuitIsModifiedH4) {
    const Matrix4 expected = mat_mul(sagnac_swap().matrix(), hadamard4().matrix());
    EXPECT_LE(max_abs_diff(compile_circuit(hadamard_circuit(true)).matrix(), expected), 1e-15);
}

TEST(Circuit, CnotAfterHadamardsIsNotTheModifiedCoin) {
    // Drawn left to right the CNOT follows the Hadamards; applied in that
    // order it flips rows 2/3 instead of 1/3.
    const auto g = GateCircuit{}.pol(gates::hadamard2()).oam(gates::hadamard2()).cnot();
    const Matrix4 compiled = compile_circuit(g).matrix();
    EXPECT_LE(max_abs_diff(compiled, mat_mul(gates::cnot_pol_control(), hadamard4().matrix())), 1e-15);
    EXPECT_FALSE(equal_up_to_global_phase(compiled, modified_coin(hadamard4()).matrix(), 1e-8));
}

TEST(Circuit, SingleIdentityLayer) {
    EXPECT_EQ(compile_circuit(GateCircuit{}.pol(Matrix2::identity())).matrix(), Matrix4::identity());
}

TEST(Circuit, EmptyCircuitRejected) {
    EXPECT_THROW(compile_circuit(GateCircuit{}), std::invalid_argument);
}

TEST(Circuit, NonUnitaryGateRejected) {
    EXPECT_THROW(GateCircuit{}.pol(cplx{2.0} * Matrix2::identity()), std::invalid_argument);
    EXPECT_THROW(GateCircuit{}.oam(grover_gates::printed_u2()), std::invalid_argument);
}

TEST(Circuit, CorrectedCircuitsDifferByRightFactor) {
    // compile(CNOT, G) = G * CNOT, so the H4 and identity variants differ by H4 on the right.
    const Matrix4 with_h = compile_circuit(hadamard_circuit(true)).matrix();
    const Matrix4 with_id = compile_circuit(GateCircuit{}.cnot()).matrix();
    EXPECT_LE(max_abs_diff(with_h, mat_mul(hadamard4().matrix(), with_id)), 1e-15);
}

TEST(Circuit, CnotOrientation) {
    // |10> -> |11>, |00> unchanged
    const Matrix4 c = layer_unitary(Cnot{});
    EXPECT_EQ(max_abs_diff(c * CoinVec::basis(2), CoinVec::basis(3)), 0.0);
    EXPECT_EQ(max_abs_diff(c * CoinVec::basis(0), CoinVec::basis(0)), 0.0);
    EXPECT_EQ(max_abs_diff(c * CoinVec::basis(1), CoinVec::basis(1)), 0.0);
}

TEST(Circuit, GroverGatesAreUnitary) {
    using namespace grover_gates;
    EXPECT_TRUE(is_unitary(u1(), 1e-12));
    EXPECT_TRUE(is_unitary(u2(), 1e-12));
    EXPECT_TRUE(is_unitary(v1(), 1e-12));
    EXPECT_TRUE(is_unitary(v2(), 1e-12));
}

TEST(Circuit, PrintedU2IsNotUnitary) {
    const Matrix2 p = grover_gates::printed_u2();
    EXPECT_FALSE(is_unitary(p, 1e-12));
    // Columns have norm 1/sqrt(2): U^dagger U = I/2.
    EXPECT_LE(max_abs_diff(mat_mul(p.adjoint(), p), cplx{0.5} * Matrix2::identity()), 1e-15);
    EXPECT_LE(max_abs_diff(cplx{std::sqrt(2.0)} * p, grover_gates::u2()), 1e-15);
}

TEST(Circuit, GroverCircuitMatchesModifiedGrover) {
    const auto compiled = compile_circuit(grover_circuit());
    EXPECT_TRUE(is_unitary(compiled.matrix(), 1e-12));
    // Golden operator computed by direct product, independent of the gates.
    Matrix4 golden = grover4().matrix();
    for (std::size_t c = 0; c < 4; ++c) std::swap(golden(1, c), golden(3, c));
    EXPECT_TRUE(equal_up_to_global_phase(compiled.matrix(), golden, kCircuitTol));
    EXPECT_TRUE(equal_up_to_global_phase(compiled.matrix(), modified_coin(grover4()).matrix(), kCircuitTol));
}

TEST(Circuit, GroverCircuitInDrawnOrderFails) {
    using namespace grover_gates;
    const auto drawn = GateCircuit{}.pol(u1()).oam(v1()).cnot().pol(u2()).oam(v2());
    EXPECT_FALSE(equal_up_to_global_phase(compile_circuit(drawn).matrix(), modified_coin(grover4()).matrix(), kCircuitTol));
}

TEST(Circuit, CompileDistributesOverConcatenation) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        GateCircuit a, b;
        for (int k = 0; k < 3; ++k) {
            a.pol(oracle::random_unitary<2>(rng)).oam(oracle::random_unitary<2>(rng));
            if (trial % 2) a.cnot();
            b.oam(oracle::random_unitary<2>(rng)).cnot().pol(oracle::random_unitary<2>(rng));
        }
        const Matrix4 lhs = compile_circuit(a + b).matrix();
        const Matrix4 rhs = mat_mul(compile_circuit(b).matrix(), compile_circuit(a).matrix());
        EXPECT_LE(max_abs_diff(lhs, rhs), 1e-13);
    }
}
