#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "noqe/errors.h"
#include "noqe/noise.h"
#include "noqe/pauli_transfer.h"
#include "oracles.h"

using namespace noqe;

namespace {

Eigen::MatrixXcd random_density(int n, SplitMix64 &rng) {
    // Mixture of three random pure states with random weights.
    uint64_t d = uint64_t{1} << n;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    double total = 0;
    for (int k = 0; k < 3; k++) {
        double w = uniform01(rng) + 0.05;
        Eigen::VectorXcd v = oracle::random_state(n, rng);
        rho += w * v * v.adjoint();
        total += w;
    }
    return rho / total;
}

double min_eigenvalue(const Eigen::MatrixXcd &m) {
    Eigen::MatrixXcd h = (m + m.adjoint()) / 2.0;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues()[0];
}

const ChannelKind kAllChannels[] = {ChannelKind::Depolarizing, ChannelKind::AmplitudeDamping,
                                    ChannelKind::PhaseDamping};

}  // namespace

TEST(Channels, ZeroRateIsIdentity) {
    SplitMix64 rng(41);
    DensityMatrix rho(2, random_density(2, rng));
    for (ChannelKind k : kAllChannels) {
        EXPECT_LT((apply_channel(rho, k, {1}, 0.0).matrix() - rho.matrix()).norm(), 1e-15);
    }
    EXPECT_LT((apply_channel(rho, ChannelKind::Depolarizing, {0, 1}, 0.0).matrix() - rho.matrix()).norm(), 1e-15);
}

TEST(Channels, FullAmplitudeDampingResetsToZero) {
    DensityMatrix rho = DensityMatrix::from_statevector(Statevector::from_bitstring("1"));
    auto out = apply_channel(rho, ChannelKind::AmplitudeDamping, {0}, 1.0);
    EXPECT_NEAR(out.matrix()(0, 0).real(), 1, 1e-15);
    EXPECT_NEAR(std::abs(out.matrix()(1, 1)), 0, 1e-15);
}

TEST(Channels, DepolarizingShrinksBlochVector) {
    // rho = (I + r.sigma)/2 maps to (I + (1 - p) r.sigma)/2.
    Eigen::MatrixXcd rho(2, 2);
    rho << 0.8, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.2;
    auto out = apply_channel(DensityMatrix(1, rho), ChannelKind::Depolarizing, {0}, 0.3);
    EXPECT_NEAR(out.matrix()(0, 0).real() - out.matrix()(1, 1).real(), 0.7 * 0.6, 1e-14);
    EXPECT_LT(std::abs(out.matrix()(0, 1) - 0.7 * rho(0, 1)), 1e-14);
}

TEST(Channels, PhaseDampingKeepsPopulations) {
    Eigen::MatrixXcd rho(2, 2);
    rho << 0.5, 0.5, 0.5, 0.5;
    auto out = apply_channel(DensityMatrix(1, rho), ChannelKind::PhaseDamping, {0}, 0.36);
    EXPECT_NEAR(out.matrix()(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(out.matrix()(0, 1).real(), 0.5 * 0.8, 1e-14);
}

TEST(ChannelsProperty, MatchKrausOracleAndStayPhysical) {
    SplitMix64 rng(42);
    for (int k = 0; k < 1000; k++) {
        int n = 2;
        Eigen::MatrixXcd rho = random_density(n, rng);
        double rate = uniform01(rng);
        ChannelKind kind = kAllChannels[k % 3];
        int q = k % 2;
        auto got = apply_channel(DensityMatrix(n, rho), kind, {q}, rate).matrix();
        auto want = oracle::apply_kraus(rho, oracle::kraus_1q(kind, rate), {q}, n);
        ASSERT_LT((got - want).norm(), 1e-12) << channel_name(kind);
        EXPECT_NEAR(got.trace().real(), 1, 1e-12);
        EXPECT_GE(min_eigenvalue(got), -1e-12);

        auto got2 = apply_channel(DensityMatrix(n, rho), ChannelKind::Depolarizing, {0, 1}, rate).matrix();
        auto want2 = oracle::apply_kraus(rho, oracle::kraus_depolarizing_2q(rate), {0, 1}, n);
        ASSERT_LT((got2 - want2).norm(), 1e-12);
        EXPECT_NEAR(got2.trace().real(), 1, 1e-12);
        EXPECT_GE(min_eigenvalue(got2), -1e-12);
    }
}

TEST(ChannelsProperty, KrausSetsAreTracePreserving) {
    for (double p : {0.0, 0.1, 0.5, 1.0}) {
        for (ChannelKind kind : kAllChannels) {
            Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2, 2);
            for (auto &k : oracle::kraus_1q(kind, p)) {
                s += k.adjoint() * k;
            }
            EXPECT_LT((s - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-14);
        }
    }
}

TEST(NoiseModel, ValidatesRates) {
    NoiseModel m;
    m.lambda = 1e4;
    EXPECT_THROW(m.validate(), ContractError);
    m.lambda = -1;
    EXPECT_THROW(m.validate(), ContractError);
}

TEST(NoiseModel, NativeCounts) {
    EXPECT_EQ(native_two_qubit_count(GateKind::H), 0);
    EXPECT_EQ(native_two_qubit_count(GateKind::CNOT), 1);
    EXPECT_EQ(native_two_qubit_count(GateKind::CRZ), 1);
    EXPECT_EQ(native_two_qubit_count(GateKind::GIVENS), 2);
    EXPECT_EQ(native_two_qubit_count(GateKind::U2Q), 3);
    EXPECT_EQ(native_two_qubit_count(GateKind::CSWAP), 7);
}

TEST(NoiseModel, JsonRoundTrip) {
    NoiseModel m;
    m.lambda = 1.25;
    m.phase_damping = false;
    NoiseModel back = noise_model_from_json(noise_model_to_json(m));
    EXPECT_DOUBLE_EQ(back.lambda, 1.25);
    EXPECT_FALSE(back.phase_damping);
    EXPECT_TRUE(back.amplitude_damping);
}

TEST(NoisyRun, ZeroNoiseEqualsPureEvolution) {
    SplitMix64 rng(43);
    NoiseModel m;
    m.lambda = 0;
    Circuit c = oracle::random_circuit(3, 20, rng);
    auto rho = noisy_run(c, m, DensityMatrix(3));
    auto psi = run_circuit(c, Statevector(3));
    EXPECT_LT((rho.matrix() - psi.amplitudes() * psi.amplitudes().adjoint()).norm(), 1e-12);
}

TEST(NoisyRun, SingleHadamardFidelity) {
    Circuit c(1);
    c.append(Gate::h(0));
    auto rho = noisy_run(c, NoiseModel{}, DensityMatrix(1));
    auto psi = run_circuit(c, Statevector(1));
    EXPECT_GE(rho.fidelity(psi), 1 - 5 * 3e-5);
    EXPECT_LT(rho.fidelity(psi), 1);
}

TEST(NoisyRunProperty, MatchesKrausOracle) {
    SplitMix64 rng(44);
    for (int k = 0; k < 30; k++) {
        int n = 2 + k % 2;
        Circuit c = oracle::random_circuit(n, 12, rng);
        NoiseModel m;
        m.lambda = 20 * uniform01(rng);
        Eigen::MatrixXcd rho0 = random_density(n, rng);
        auto got = noisy_run(c, m, DensityMatrix(n, rho0)).matrix();
        auto want = oracle::noisy_run(c, m, rho0);
        EXPECT_LT((got - want).norm(), 1e-11);
    }
}

TEST(NoisyRunProperty, TraceAndPositivityOverLongCircuits) {
    SplitMix64 rng(45);
    NoiseModel m;
    m.lambda = 1.5;
    for (int k = 0; k < 20; k++) {
        Circuit c = oracle::random_circuit(3, 20, rng);
        auto rho = noisy_run(c, m, DensityMatrix(3));
        EXPECT_NEAR(rho.trace().real(), 1, 1e-12);
        EXPECT_GE(min_eigenvalue(rho.matrix()), -1e-12);
    }
}

TEST(NoisyRunProperty, FidelityDecreasesWithLambda) {
    SplitMix64 rng(46);
    Circuit c = oracle::random_circuit(4, 40, rng);
    auto psi = run_circuit(c, Statevector(4));
    double prev = 1.0 + 1e-15;
    for (double lambda : {0.0, 0.5, 1.0, 1.5, 3.0}) {
        NoiseModel m;
        m.lambda = lambda;
        double f = noisy_run(c, m, DensityMatrix(4)).fidelity(psi);
        EXPECT_LE(f, prev);
        prev = f;
    }
}

TEST(NoisyRun, LambdaIsEquivalentToScaledRates) {
    SplitMix64 rng(47);
    Circuit c = oracle::random_circuit(3, 15, rng);
    NoiseModel a;
    a.lambda = 1.5;
    NoiseModel b = a.flattened();
    EXPECT_DOUBLE_EQ(b.lambda, 1.0);
    EXPECT_LT((noisy_run(c, a, DensityMatrix(3)).matrix() - noisy_run(c, b, DensityMatrix(3)).matrix()).norm(),
              1e-14);
}

TEST(Sampling, FromDensityFollowsDiagonal) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
    rho(0, 0) = 0.25;
    rho(1, 1) = 0.75;
    const uint64_t shots = 100000;
    auto counts = sample_from_density(DensityMatrix(1, rho), shots, 3);
    EXPECT_LT(std::abs(static_cast<double>(counts["1"]) - 0.75 * shots), 5 * std::sqrt(shots * 0.1875));
}

TEST(PauliTransfer, MatchesDenseNoisyCliffordEvolution) {
    SplitMix64 rng(48);
    for (int k = 0; k < 40; k++) {
        int n = 1 + k % 4;
        Eigen::MatrixXcd rho0 = random_density(n, rng);
        Circuit c = oracle::random_circuit(n, 25, rng, true);
        NoiseModel m;
        m.lambda = 30 * uniform01(rng);
        PauliTransferState st{DensityMatrix(n, rho0)};
        for (const Gate &g : c.gates) {
            st.apply_noisy(g, m);
        }
        auto dense = noisy_run(c, m, DensityMatrix(n, rho0));
        EXPECT_LT((st.to_density().matrix() - dense.matrix()).norm(), 1e-11);
        EXPECT_LT((st.probabilities() - dense.probabilities()).norm(), 1e-11);
    }
}
