#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "noqe/circuit.h"
#include "noqe/errors.h"
#include "noqe/pauli.h"
#include "oracles.h"

using namespace noqe;

namespace {

const double kInvSqrt2 = 1 / std::numbers::sqrt2;

std::vector<Gate> one_of_each_gate() {
    Eigen::Matrix2cd u1 = gate_matrix(Gate::ry(0, 0.3)) * gate_matrix(Gate::rz(0, 1.1));
    Eigen::Matrix4cd u2 = gate_matrix(Gate::givens(0, 1, 0.4)) * gate_matrix(Gate::crz(0, 1, 0.9));
    return {Gate::h(0),          Gate::x(1),           Gate::z(2),           Gate::s(0),
            Gate::sdg(1),        Gate::phase(2, 0.7),  Gate::rz(0, -0.4),    Gate::ry(1, 1.3),
            Gate::cnot(0, 2),    Gate::cz(1, 2),       Gate::crz(2, 0, 0.8), Gate::givens(1, 0, -0.6),
            Gate::cswap(2, 0, 1), Gate::u1q(1, u1),    Gate::u2q(2, 1, u2)};
}

}  // namespace

TEST(Statevector, BitstringIndexConvention) {
    EXPECT_EQ(bitstring_to_index("1100"), 12u);
    EXPECT_EQ(index_to_bitstring(12, 4), "1100");
    EXPECT_EQ(qubit_bit(4, 0), 3);
}

TEST(Simulator, HadamardOnZero) {
    Circuit c(1);
    c.append(Gate::h(0));
    auto out = run_circuit(c, Statevector(1));
    EXPECT_NEAR(std::abs(out[0] - kInvSqrt2), 0, 1e-15);
    EXPECT_NEAR(std::abs(out[1] - kInvSqrt2), 0, 1e-15);
}

TEST(Simulator, BellState) {
    Circuit c(2);
    c.append(Gate::h(0)).append(Gate::cnot(0, 1));
    auto out = run_circuit(c, Statevector(2));
    Eigen::VectorXcd want = Eigen::VectorXcd::Zero(4);
    want[0] = want[3] = kInvSqrt2;
    EXPECT_LT((out.amplitudes() - want).norm(), 1e-15);
}

TEST(Simulator, XOnFirstQubitFlipsMostSignificantBit) {
    Circuit c(3);
    c.append(Gate::x(0));
    EXPECT_NEAR(std::abs(run_circuit(c, Statevector(3))[4]), 1, 1e-15);
}

TEST(Simulator, GateMatricesFollowDocumentedConventions) {
    double t = 0.37;
    Eigen::MatrixXcd g = gate_matrix(Gate::givens(0, 1, t));
    Eigen::MatrixXcd gw = Eigen::MatrixXcd::Zero(4, 4);
    gw(0, 0) = gw(3, 3) = 1;
    gw(1, 1) = gw(2, 2) = std::cos(t);
    gw(1, 2) = -std::sin(t);
    gw(2, 1) = std::sin(t);
    EXPECT_LT((g - gw).norm(), 1e-15);

    Eigen::MatrixXcd crz = gate_matrix(Gate::crz(0, 1, t));
    Eigen::MatrixXcd cw = Eigen::MatrixXcd::Identity(4, 4);
    cw(2, 2) = std::exp(cplx(0, -t / 2));
    cw(3, 3) = std::exp(cplx(0, t / 2));
    EXPECT_LT((crz - cw).norm(), 1e-15);

    Eigen::MatrixXcd cnot = gate_matrix(Gate::cnot(0, 1));
    EXPECT_EQ(cnot(3, 2), cplx(1));
    EXPECT_EQ(cnot(2, 3), cplx(1));
}

TEST(Simulator, EveryGateKindIsUnitary) {
    for (const Gate &g : one_of_each_gate()) {
        Eigen::MatrixXcd u = gate_matrix(g);
        EXPECT_LT((u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm(), 1e-12)
            << gate_name(g.kind);
        Eigen::MatrixXcd ui = gate_matrix(inverse(g));
        EXPECT_LT((ui * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm(), 1e-12) << gate_name(g.kind);
    }
}

TEST(Simulator, EveryGateKindMatchesEmbeddingOracle) {
    for (const Gate &g : one_of_each_gate()) {
        Circuit c(3);
        c.append(g);
        EXPECT_LT((circuit_unitary(c) - oracle::embed_gate(g, 3)).norm(), 1e-12) << gate_name(g.kind);
    }
}

TEST(Simulator, GivensConservesHammingWeightExhaustively) {
    for (double t : {0.1, 0.7, 2.3, -1.9}) {
        Eigen::MatrixXcd u = gate_matrix(Gate::givens(0, 1, t));
        for (int a = 0; a < 4; a++) {
            for (int b = 0; b < 4; b++) {
                if (std::popcount(static_cast<unsigned>(a)) != std::popcount(static_cast<unsigned>(b))) {
                    EXPECT_LT(std::abs(u(a, b)), 1e-15);
                }
            }
        }
    }
}

TEST(Simulator, RejectsBadQubits) {
    Circuit c(2);
    c.append(Gate::cnot(0, 0));
    EXPECT_THROW(validate(c), ContractError);
    Circuit d(2);
    d.append(Gate::h(2));
    EXPECT_THROW(run_circuit(d, Statevector(2)), ContractError);
}

TEST(Simulator, RefusesAboveGuardrail) {
    EXPECT_THROW(Statevector(kMaxDenseQubits + 1), ResourceError);
}

TEST(SimulatorProperty, RandomCircuitsMatchDenseOracle) {
    SplitMix64 rng(21);
    for (int t = 0; t < 100; t++) {
        int n = 1 + t % 5;
        Circuit c = oracle::random_circuit(n, 10, rng);
        Eigen::MatrixXcd u = oracle::circuit_matrix(c);
        Statevector psi(n, oracle::random_state(n, rng));
        auto out = run_circuit(c, psi);
        EXPECT_LT((out.amplitudes() - u * psi.amplitudes()).norm(), 1e-10);
        EXPECT_NEAR(out.norm(), 1, 1e-12);
    }
}

TEST(SimulatorProperty, Linearity) {
    SplitMix64 rng(22);
    for (int t = 0; t < 50; t++) {
        int n = 3;
        Circuit c = oracle::random_circuit(n, 12, rng);
        Eigen::VectorXcd a = oracle::random_state(n, rng), b = oracle::random_state(n, rng);
        cplx alpha(0.3, -0.8), beta(1.1, 0.2);
        Eigen::VectorXcd lhs = alpha * a + beta * b;
        run_circuit_inplace(c, lhs);
        run_circuit_inplace(c, a);
        run_circuit_inplace(c, b);
        EXPECT_LT((lhs - alpha * a - beta * b).norm(), 1e-10);
    }
}

TEST(Sampling, BasisStateIsDeterministic) {
    auto counts = sample_bitstrings(Statevector::from_bitstring("101"), 100, 5);
    ASSERT_EQ(counts.size(), 1u);
    EXPECT_EQ(counts.at("101"), 100u);
}

TEST(Sampling, PlusStateWithinFiveSigma) {
    Circuit c(1);
    c.append(Gate::h(0));
    auto psi = run_circuit(c, Statevector(1));
    const uint64_t shots = 100000;
    auto counts = sample_bitstrings(psi, shots, 7);
    double ones = static_cast<double>(counts["1"]);
    EXPECT_LT(std::abs(ones - shots / 2.0), 5 * std::sqrt(shots * 0.25));
}

TEST(Sampling, SeedDeterminism) {
    SplitMix64 rng(9);
    Statevector psi(3, oracle::random_state(3, rng));
    EXPECT_EQ(sample_bitstrings(psi, 1000, 42), sample_bitstrings(psi, 1000, 42));
    EXPECT_NE(sample_bitstrings(psi, 1000, 42), sample_bitstrings(psi, 1000, 43));
}

TEST(Sampling, ZeroShotsIsContractError) {
    EXPECT_THROW(sample_bitstrings(Statevector(2), 0, 1), ContractError);
}

TEST(InnerProduct, ConjugatesTheBra) {
    Eigen::VectorXcd a(2), b(2);
    a << cplx(0, 1), 0;
    b << 1, 0;
    EXPECT_EQ(inner_product(Statevector(1, a), Statevector(1, b)), cplx(0, -1));
    EXPECT_THROW(inner_product(Statevector(1), Statevector(2)), ContractError);
}

TEST(CircuitJson, RoundTripPreservesUnitaryAndHash) {
    SplitMix64 rng(23);
    for (int t = 0; t < 20; t++) {
        Circuit c = oracle::random_circuit(3, 15, rng);
        c.append(Gate::u1q(0, gate_matrix(Gate::ry(0, 0.2))));
        Circuit back = parse_circuit(circuit_to_json(c));
        EXPECT_LT((circuit_unitary(back) - circuit_unitary(c)).norm(), 1e-12);
        EXPECT_EQ(circuit_hash(back), circuit_hash(c));
    }
}

TEST(CircuitJson, ParseErrors) {
    EXPECT_THROW(parse_circuit(R"({"num_qubits":2,"gates":[{"name":"FOO","qubits":[0]}]})"), ParseError);
    EXPECT_THROW(parse_circuit(R"({"num_qubits":2,"gates":[{"name":"CNOT","qubits":[0]}]})"), ParseError);
    EXPECT_THROW(parse_circuit(R"({"num_qubits":2,"gates":[{"name":"RZ","qubits":[0]}]})"), ParseError);
    EXPECT_THROW(parse_circuit(R"({"gates":[]})"), ParseError);
}

TEST(CircuitJson, ParsesNamedGates) {
    Circuit c = parse_circuit(
        R"({"num_qubits":2,"gates":[{"name":"H","qubits":[0]},{"name":"CNOT","qubits":[0,1]},{"name":"GIVENS","qubits":[0,1],"params":[0.5]}]})");
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c.gates[2].kind, GateKind::GIVENS);
    EXPECT_DOUBLE_EQ(c.gates[2].theta, 0.5);
}

TEST(CircuitInverse, UndoesRandomCircuits) {
    SplitMix64 rng(24);
    for (int t = 0; t < 20; t++) {
        Circuit c = oracle::random_circuit(3, 15, rng);
        Circuit both = c;
        both.append(inverse(c));
        EXPECT_LT((circuit_unitary(both) - Eigen::MatrixXcd::Identity(8, 8)).norm(), 1e-10);
    }
}
