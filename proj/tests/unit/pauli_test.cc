#include <gtest/gtest.h>

#include "noqe/errors.h"
#include "noqe/pauli.h"
#include "oracles.h"

using namespace noqe;

namespace {

Eigen::MatrixXcd pauli_1q(char c) {
    Eigen::MatrixXcd m(2, 2);
    switch (c) {
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: m = Eigen::MatrixXcd::Identity(2, 2);
    }
    return m;
}

}  // namespace

TEST(PauliWord, SingleZIsDiagonal) {
    Eigen::MatrixXcd z = materialize(PauliWord::parse("Z"));
    Eigen::MatrixXcd want(2, 2);
    want << 1, 0, 0, -1;
    EXPECT_LT((z - want).norm(), 1e-15);
}

TEST(PauliWord, IdentityWord) {
    EXPECT_LT((materialize(PauliWord::parse("II")) - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-15);
    EXPECT_TRUE(PauliWord::parse("III").is_identity());
}

TEST(PauliWord, XYIsKroneckerAndInvolutory) {
    Eigen::MatrixXcd m = materialize(PauliWord::parse("XY"));
    EXPECT_LT((m - oracle::kron({pauli_1q('X'), pauli_1q('Y')})).norm(), 1e-15);
    EXPECT_LT((m * m - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-12);
    EXPECT_LT((m - m.adjoint()).norm(), 1e-12);
}

TEST(PauliWord, RejectsBadLetters) {
    EXPECT_THROW(PauliWord::parse("XA"), ParseError);
}

TEST(PauliWordProperty, EveryThreeQubitWordMatchesKronecker) {
    const char letters[] = "IXYZ";
    for (int code = 0; code < 64; code++) {
        std::string w;
        std::vector<Eigen::MatrixXcd> factors;
        for (int q = 0; q < 3; q++) {
            char c = letters[(code >> (2 * q)) & 3];
            w += c;
            factors.push_back(pauli_1q(c));
        }
        Eigen::MatrixXcd m = materialize(PauliWord::parse(w));
        EXPECT_LT((m - oracle::kron(factors)).norm(), 1e-12) << w;
        EXPECT_LT((m * m.adjoint() - Eigen::MatrixXcd::Identity(8, 8)).norm(), 1e-12) << w;
    }
}

TEST(Expectation, EigenstateExamples) {
    auto h = PauliSum::single(PauliWord::parse("ZZII"));
    EXPECT_NEAR(expectation(h, Statevector::from_bitstring("1100")).real(), 1.0, 1e-12);
    Eigen::VectorXcd plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    EXPECT_NEAR(expectation(PauliSum::single(PauliWord::parse("X")), Statevector(1, plus)).real(), 1.0, 1e-12);
}

TEST(Expectation, QubitMismatchIsContractError) {
    auto h = PauliSum::single(PauliWord::parse("ZZ"));
    EXPECT_THROW(expectation(h, Statevector(3)), ContractError);
}

TEST(Expectation, H2GroundStateGivesLowestEigenvalue) {
    auto h = load_hamiltonian(std::string(NOQE_DATA_DIR) + "/h2/hamiltonian.json");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(materialize(h));
    Statevector ground(4, es.eigenvectors().col(0));
    EXPECT_NEAR(expectation(h, ground).real(), es.eigenvalues()[0], 1e-10);
    EXPECT_LT(std::abs(expectation(h, ground).imag()), 1e-10);
}

TEST(ParseHamiltonian, SingleTerm) {
    auto h = parse_hamiltonian(R"({"num_qubits":1,"terms":[{"pauli":"Z","re":0.5,"im":0}]})");
    ASSERT_EQ(h.term_count(), 1u);
    EXPECT_EQ(h.terms()[0].coefficient, cplx(0.5, 0));
    EXPECT_TRUE(h.hermitian());
}

TEST(ParseHamiltonian, LengthMismatchNamesTerm) {
    try {
        parse_hamiltonian(R"({"num_qubits":4,"terms":[{"pauli":"ZZZZ","re":1,"im":0},{"pauli":"ZZZ","re":1,"im":0}]})");
        FAIL() << "expected ParseError";
    } catch (const ParseError &e) {
        EXPECT_NE(std::string(e.what()).find("term 1"), std::string::npos) << e.what();
    }
}

TEST(ParseHamiltonian, MergesDuplicates) {
    auto h = parse_hamiltonian(
        R"({"num_qubits":2,"terms":[{"pauli":"ZZ","re":0.2,"im":0},{"pauli":"XI","re":1,"im":0},{"pauli":"ZZ","re":0.3,"im":0}]})");
    ASSERT_EQ(h.term_count(), 2u);
    EXPECT_EQ(h.terms()[0].word.str(), "ZZ");
    EXPECT_NEAR(h.terms()[0].coefficient.real(), 0.5, 1e-15);
}

TEST(ParseHamiltonian, RejectsNonFiniteAndBadLetters) {
    EXPECT_THROW(parse_hamiltonian(R"({"num_qubits":1,"terms":[{"pauli":"Q","re":1,"im":0}]})"), ParseError);
    EXPECT_THROW(parse_hamiltonian(R"({"num_qubits":1,"terms":[{"pauli":"Z","re":1e999,"im":0}]})"), ParseError);
    EXPECT_THROW(parse_hamiltonian("not json"), ParseError);
}

TEST(ParseHamiltonian, ComplexCoefficientClearsHermitianFlag) {
    auto h = parse_hamiltonian(R"({"num_qubits":1,"terms":[{"pauli":"Z","re":1,"im":0.5}]})");
    EXPECT_FALSE(h.hermitian());
}

TEST(ParseHamiltonian, JsonRoundTrip) {
    auto h = load_hamiltonian(std::string(NOQE_DATA_DIR) + "/h2/hamiltonian.json");
    auto back = parse_hamiltonian(hamiltonian_to_json(h));
    ASSERT_EQ(back.term_count(), h.term_count());
    for (size_t k = 0; k < h.term_count(); k++) {
        EXPECT_EQ(back.terms()[k].word, h.terms()[k].word);
        EXPECT_EQ(back.terms()[k].coefficient, h.terms()[k].coefficient);
    }
}

TEST(PauliSumProperty, MaterializedHermitianSumsAreHermitian) {
    SplitMix64 rng(11);
    for (int t = 0; t < 50; t++) {
        auto h = oracle::random_pauli_sum(1 + t % 4, 1 + t % 30, rng);
        Eigen::MatrixXcd m = materialize(h);
        EXPECT_LE((m - m.adjoint()).norm(), 1e-10);
    }
}

TEST(PauliSumProperty, FrobeniusBoundMatchesTraceOfSquare) {
    SplitMix64 rng(12);
    for (int t = 0; t < 100; t++) {
        int n = 1 + t % 4;
        auto h = oracle::random_pauli_sum(n, 1 + static_cast<int>(uniform_below(rng, 30)), rng);
        Eigen::MatrixXcd m = materialize(h);
        double tr = (m * m).trace().real();
        auto fb = h.frobenius_bound();
        EXPECT_EQ(fb.D, uint64_t{1} << n);
        EXPECT_LE(std::abs(tr - fb.B), 1e-8 * static_cast<double>(fb.D));
    }
}

TEST(PauliSumProperty, ExpectationMatchesDense) {
    SplitMix64 rng(13);
    for (int t = 0; t < 100; t++) {
        auto h = oracle::random_pauli_sum(3, 10, rng);
        Statevector psi(3, oracle::random_state(3, rng));
        cplx dense = psi.amplitudes().dot(materialize(h) * psi.amplitudes());
        EXPECT_LT(std::abs(expectation(h, psi) - dense), 1e-10);
    }
}

TEST(PauliSumProperty, TraceWithMatchesDense) {
    SplitMix64 rng(14);
    for (int t = 0; t < 50; t++) {
        auto h = oracle::random_pauli_sum(3, 8, rng);
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(8, 8);
        EXPECT_LT(std::abs(trace_with(h, m) - (materialize(h) * m).trace()), 1e-10);
    }
}

TEST(PauliSumProperty, MatrixElementMatchesDense) {
    SplitMix64 rng(15);
    for (int t = 0; t < 50; t++) {
        auto h = oracle::random_pauli_sum(3, 8, rng);
        Statevector a(3, oracle::random_state(3, rng)), b(3, oracle::random_state(3, rng));
        cplx dense = a.amplitudes().dot(materialize(h) * b.amplitudes());
        EXPECT_LT(std::abs(matrix_element(h, a, b) - dense), 1e-10);
    }
}

TEST(Materialize, GuardrailAboveTwelveQubits) {
    EXPECT_THROW(materialize(PauliWord::identity(13)), ResourceError);
}
