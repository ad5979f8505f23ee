// coin.hpp
// Named coin operators, the Sagnac swap correction and gate circuits.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qw4/tensor.hpp"

namespace qw4 {

// A named 4x4 unitary on the coin space.
class CoinOperator {
public:
    CoinOperator(std::string name, Matrix4 matrix) : name_(std::move(name)), matrix_(matrix) {
        if (!is_unitary(matrix_, kAlgebraicTol))
            throw std::invalid_argument("CoinOperator '" + name_ + "': matrix is not unitary");
    }

    const std::string& name() const { return name_; }
    const Matrix4& matrix() const { return matrix_; }

    CoinVec apply(const CoinVec& v) const { return matrix_ * v; }

private:
    std::string name_;
    Matrix4 matrix_;
};

// H4 = H2 (x) H2, written out entry by entry.
inline CoinOperator hadamard4() {
    return {"hadamard4",
            0.5 * Matrix4{1, 1, 1, 1,
                          1, -1, 1, -1,
                          1, 1, -1, -1,
                          1, -1, -1, 1}};
}

// Diagonal -1/2, off-diagonal +1/2.
inline CoinOperator grover4() {
    return {"grover4",
            0.5 * Matrix4{-1, 1, 1, 1,
                          1, -1, 1, 1,
                          1, 1, -1, 1,
                          1, 1, 1, -1}};
}

// Exchanges |H-> and |V->. Its own inverse.
inline CoinOperator sagnac_swap() {
    return {"sagnac_swap", Matrix4::permutation({0, 3, 2, 1})};
}

// U_SI^-1 * c. Since U_SI is an involution, applying this twice returns c
// (up to the name, which gains and then loses the prime).
inline CoinOperator modified_coin(const CoinOperator& c) {
    std::string name = c.name();
    if (!name.empty() && name.back() == '\'')
        name.pop_back();
    else
        name += '\'';
    return {std::move(name), mat_mul(sagnac_swap().matrix(), c.matrix())};
}

// ---------------------------------------------------------------------------
// Gate circuits on the two coin qubits.

enum class Qubit { polarization, oam };

struct SingleQubitGate {
    Qubit target;
    Matrix2 matrix;
};

// Polarization controls, OAM is the target. No other orientation exists here.
struct Cnot {};

using GateLayer = std::variant<SingleQubitGate, Cnot>;

// Layers are stored in application order: layers.front() acts first.
class GateCircuit {
public:
    GateCircuit() = default;
    explicit GateCircuit(std::vector<GateLayer> layers) {
        for (auto& l : layers) push(std::move(l));
    }

    GateCircuit& pol(const Matrix2& g) { return push(SingleQubitGate{Qubit::polarization, g}); }
    GateCircuit& oam(const Matrix2& g) { return push(SingleQubitGate{Qubit::oam, g}); }
    GateCircuit& cnot() { return push(Cnot{}); }

    GateCircuit& push(GateLayer layer) {
        if (const auto* g = std::get_if<SingleQubitGate>(&layer); g && !is_unitary(g->matrix, kAlgebraicTol))
            throw std::invalid_argument("GateCircuit: single-qubit gate is not unitary");
        layers_.push_back(std::move(layer));
        return *this;
    }

    const std::vector<GateLayer>& layers() const { return layers_; }
    bool empty() const { return layers_.empty(); }

    friend GateCircuit operator+(GateCircuit a, const GateCircuit& b) {
        for (const auto& l : b.layers_) a.layers_.push_back(l);
        return a;
    }

private:
    std::vector<GateLayer> layers_;
};

inline Matrix4 layer_unitary(const GateLayer& layer) {
    if (std::holds_alternative<Cnot>(layer)) return gates::cnot_pol_control();
    const auto& g = std::get<SingleQubitGate>(layer);
    return g.target == Qubit::polarization ? tensor2x2(g.matrix, gates::identity2())
                                           : tensor2x2(gates::identity2(), g.matrix);
}

// Product of layer unitaries with the first layer acting first.
inline CoinOperator compile_circuit(const GateCircuit& g, std::string name = "circuit") {
    if (g.empty()) throw std::invalid_argument("compile_circuit: circuit is empty");
    Matrix4 acc = Matrix4::identity();
    for (const auto& layer : g.layers()) acc = mat_mul(layer_unitary(layer), acc);
    return {std::move(name), acc};
}

// Single-qubit gates of the modified Grover decomposition. Each carries the
// prefactor e^{-i pi/4}/sqrt(2).
namespace grover_gates {

inline cplx prefactor() { return std::exp(cplx{0.0, -std::numbers::pi / 4.0}) / std::sqrt(2.0); }

inline Matrix2 u1() { return prefactor() * Matrix2{1, 1, -1, 1}; }
inline Matrix2 u2() { return prefactor() * Matrix2{1, -1, -kI, -kI}; }
inline Matrix2 v1() { return prefactor() * Matrix2{kI, 1, -kI, 1}; }
inline Matrix2 v2() { return prefactor() * Matrix2{-kI, -kI, 1, -1}; }

// U2 with the e^{-i pi/4}/2 prefactor as it appears in print. Not unitary;
// kept only so the discrepancy stays under test.
inline Matrix2 printed_u2() { return (std::exp(cplx{0.0, -std::numbers::pi / 4.0}) / 2.0) * Matrix2{1, -1, -kI, -kI}; }

}  // namespace grover_gates

// Realizes U_SI^-1 U_G. The drawn diagram reads as a matrix product
// (U1 (x) V1) CNOT (U2 (x) V2), so U2/V2 are the layers that act first.
inline GateCircuit grover_circuit() {
    using namespace grover_gates;
    return GateCircuit{}.pol(u2()).oam(v2()).cnot().pol(u1()).oam(v1());
}

// Half-wave plate and pi mode converter. The corrected variant realizes
// U_SI^-1 H4 = H4 CNOT, so the CNOT acts before the Hadamards.
inline GateCircuit hadamard_circuit(bool corrected) {
    GateCircuit g;
    if (corrected) g.cnot();
    g.pol(gates::hadamard2()).oam(gates::hadamard2());
    return g;
}

}  // namespace qw4
