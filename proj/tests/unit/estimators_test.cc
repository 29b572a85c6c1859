#include <gtest/gtest.h>

#include "noqe/errors.h"
#include "noqe/estimators.h"
#include "noqe/pipeline.h"
#include "noqe/references.h"
#include "oracles.h"

using namespace noqe;

namespace {

ShadowEstimate exact_estimate(const Circuit &c) {
    auto psi = run_circuit(c, Statevector(c.num_qubits));
    ShadowEstimate e;
    e.matrix = psi.amplitudes() * psi.amplitudes().adjoint();
    e.order = 1;
    e.n = 1;
    e.trace = 1;
    return e;
}

ReferenceSpec random_reference(int n, SplitMix64 &rng, const std::string &occ, const std::string &label) {
    ReferenceSpec spec;
    spec.label = label;
    spec.num_qubits = n;
    spec.ansatz = oracle::random_conserving_ansatz(n, 12, rng);
    spec.hf_occupation = occ;
    return spec;
}

ShadowDataset random_dataset(int n, uint64_t size, uint64_t seed) {
    SplitMix64 rng(seed);
    AcquireOptions opt;
    opt.seed = seed;
    opt.label = "d" + std::to_string(seed);
    return acquire(oracle::random_circuit(n, 8, rng), size, opt);
}

}  // namespace

TEST(UEstimate, ClosedFormsMatchBruteForce) {
    for (uint64_t t = 0; t < 50; t++) {
        int n = 1 + static_cast<int>(t % 3);
        uint64_t size = 3 + t % 6;
        auto ds = random_dataset(n, size, 500 + t);
        std::vector<Eigen::MatrixXcd> snaps;
        for (const auto &s : ds.snapshots) {
            snaps.push_back(snapshot_matrix(s));
        }
        for (int m = 1; m <= 3; m++) {
            Eigen::MatrixXcd got = u_estimate(ds, m).matrix;
            Eigen::MatrixXcd want = oracle::brute_force_u_statistic(snaps, m);
            EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-10) << "m=" << m << " t=" << t;
        }
    }
}

TEST(UEstimate, FirstOrderHasUnitTrace) {
    auto ds = random_dataset(3, 50, 1);
    auto e = u_estimate(ds, 1);
    EXPECT_NEAR(std::abs(e.trace - cplx(1)), 0, 1e-12);
    EXPECT_NEAR(std::abs(e.matrix.trace() - cplx(1)), 0, 1e-12);
}

TEST(UEstimate, IsHermitian) {
    auto ds = random_dataset(2, 40, 2);
    for (int m = 1; m <= 3; m++) {
        Eigen::MatrixXcd e = u_estimate(ds, m).matrix;
        EXPECT_LT((e - e.adjoint()).norm(), 1e-12);
    }
}

TEST(UEstimate, RejectsTooFewSnapshotsAndBadOrder) {
    auto ds = random_dataset(2, 2, 3);
    EXPECT_THROW(u_estimate(ds, 3), ContractError);
    EXPECT_THROW(u_estimate(ds, 4), ContractError);
    EXPECT_NO_THROW(u_estimate(ds, 2));
}

TEST(UEstimate, WeightedMomentsWithUnitWeightsMatchUnweighted) {
    auto ds = random_dataset(3, 30, 4);
    Eigen::MatrixXcd states = pullback_states(ds);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(30);
    auto a = estimate_from_moments(shadow_moments(states, &w, 3), 3);
    auto b = u_estimate(ds, 3);
    EXPECT_LT((a.matrix - b.matrix).norm(), 1e-10);
}

TEST(UEstimate, MultiplicityWeightsMatchDuplicatedSnapshots) {
    auto ds = random_dataset(2, 6, 5);
    Eigen::VectorXd w(6);
    w << 2, 0, 1, 3, 1, 1;
    ShadowDataset dup = ds;
    dup.snapshots.clear();
    for (int a = 0; a < 6; a++) {
        for (int k = 0; k < static_cast<int>(w[a]); k++) {
            dup.snapshots.push_back(ds.snapshots[static_cast<size_t>(a)]);
        }
    }
    Eigen::MatrixXcd states = pullback_states(ds);
    for (int m = 1; m <= 3; m++) {
        auto a = estimate_from_moments(shadow_moments(states, &w, m), m);
        auto b = u_estimate(dup, m);
        EXPECT_LT((a.matrix - b.matrix).norm(), 1e-10) << m;
    }
}

TEST(EstimateLinear, IdentityAndZ) {
    Circuit c(1);
    AcquireOptions opt;
    opt.seed = 9;
    auto ds = acquire(c, 5000, opt);
    EXPECT_NEAR(estimate_linear(ds, PauliSum::single(PauliWord::parse("I")), 1).real(), 1, 1e-12);
    // Var of a single snapshot Z estimate is at most (D + 1)^2 = 9.
    EXPECT_NEAR(estimate_linear(ds, PauliSum::single(PauliWord::parse("Z")), 1).real(), 1, 5 * 3 / std::sqrt(5000.0));
}

TEST(EstimateLinear, UnbiasedAtOrderThree) {
    SplitMix64 rng(61);
    Circuit prep = oracle::random_circuit(3, 10, rng);
    auto psi = run_circuit(prep, Statevector(3));
    auto obs = oracle::random_pauli_sum(3, 6, rng);
    double truth = expectation(obs, psi).real();
    const int reps = 200;
    std::vector<double> vals;
    for (int r = 0; r < reps; r++) {
        AcquireOptions opt;
        opt.seed = 1000 + static_cast<uint64_t>(r);
        vals.push_back(estimate_linear(acquire(prep, 2000, opt), obs, 3).real());
    }
    double mean = 0, var = 0;
    for (double v : vals) {
        mean += v / reps;
    }
    for (double v : vals) {
        var += (v - mean) * (v - mean) / (reps - 1);
    }
    EXPECT_LT(std::abs(mean - truth), 4 * std::sqrt(var / reps));
}

TEST(EstimateBilinear, RejectsReusedData) {
    auto ds = random_dataset(2, 20, 6);
    EXPECT_THROW(estimate_bilinear(ds, ds, PauliSum::single(PauliWord::parse("II")), 1), ContractError);
}

TEST(EstimateBilinear, OrthogonalAndIdenticalStates) {
    AcquireOptions opt;
    opt.seed = 1;
    Circuit zero(2), flip(2);
    flip.append(Gate::x(0)).append(Gate::x(1));
    auto a = acquire(zero, 20000, opt);
    opt.seed = 2;
    auto b = acquire(zero, 20000, opt);
    opt.seed = 3;
    auto c = acquire(flip, 20000, opt);
    auto id = PauliSum::single(PauliWord::parse("II"));
    EXPECT_NEAR(estimate_bilinear(a, b, id, 1).real(), 1, 0.1);
    EXPECT_NEAR(estimate_bilinear(a, c, id, 1).real(), 0, 0.1);
}

TEST(TraceProduct, MatchesDense) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(4, 4), b = Eigen::MatrixXcd::Random(4, 4),
                     o = Eigen::MatrixXcd::Random(4, 4);
    EXPECT_LT(std::abs(trace_product(a, b) - (a * b).trace()), 1e-12);
    EXPECT_LT(std::abs(trace_product(o, a, b) - (o * a * b).trace()), 1e-12);
}

TEST(Reconstruction, ExactDensityMatricesReproduceOracle) {
    // With exact states, the auxiliary-state formulas must reproduce
    // <psi_i|psi_j> and <psi_i|H|psi_j> exactly, including the phase.
    SplitMix64 rng(62);
    for (int t = 0; t < 30; t++) {
        int n = 4;
        ReferenceSpec si = random_reference(n, rng, "1100", "a");
        ReferenceSpec sj = random_reference(n, rng, t % 2 ? "1010" : "1100", "b");
        auto h = oracle::random_pauli_sum(n, 12, rng);
        auto psi_i = run_circuit(build_reference_circuit(si), Statevector(n));
        auto psi_j = run_circuit(build_reference_circuit(sj), Statevector(n));
        cplx s_true = inner_product(psi_i, psi_j);
        cplx h_true = matrix_element(h, psi_i, psi_j);

        auto ei = exact_estimate(build_reference_circuit(si));
        auto ej = exact_estimate(build_reference_circuit(sj));
        auto eir = exact_estimate(build_auxiliary_circuit(si, AuxKind::R));
        auto eii = exact_estimate(build_auxiliary_circuit(si, AuxKind::I));
        auto ejr = exact_estimate(build_auxiliary_circuit(sj, AuxKind::R));
        auto ov = reconstruct_overlap(ei, eir, eii, ej, ejr);
        EXPECT_LT(std::abs(ov.value - s_true), 1e-10) << t;
        EXPECT_NEAR(ov.abs_sq, std::norm(s_true), 1e-10);
        EXPECT_LT(ov.consistency_residual, 1e-10);
        if (std::abs(s_true) > 0.05) {
            cplx got = reconstruct_hamiltonian_element(ei, ej, materialize(h), ov.value);
            EXPECT_LT(std::abs(got - h_true), 1e-9) << t;
        }
    }
}

TEST(Reconstruction, IdenticalReferencesGiveUnitOverlap) {
    SplitMix64 rng(63);
    ReferenceSpec s = random_reference(4, rng, "1100", "a");
    auto e = exact_estimate(build_reference_circuit(s));
    auto r = exact_estimate(build_auxiliary_circuit(s, AuxKind::R));
    auto i = exact_estimate(build_auxiliary_circuit(s, AuxKind::I));
    auto ov = reconstruct_overlap(e, r, i, e, r);
    EXPECT_LT(std::abs(ov.value - cplx(1)), 1e-12);
    auto h = PauliSum::single(PauliWord::identity(4), 0.7);
    EXPECT_LT(std::abs(reconstruct_hamiltonian_element(e, e, materialize(h), ov.value) - cplx(0.7)), 1e-12);
}

TEST(Reconstruction, SmallOverlapRaisesUnreliableDivision) {
    ShadowEstimate e;
    e.matrix = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
    try {
        reconstruct_hamiltonian_element(e, e, Eigen::MatrixXcd::Identity(2, 2), cplx(0.01, 0));
        FAIL() << "expected UnreliableDivision";
    } catch (const UnreliableDivision &u) {
        EXPECT_LT(std::abs(u.overlap - cplx(0.01, 0)), 1e-15);
        EXPECT_LT(std::abs(u.numerator - cplx(0.5, 0)), 1e-15);
    }
}

TEST(Distill, NormalizesAndIsScaleInvariant) {
    ShadowEstimate e;
    e.matrix = Eigen::MatrixXcd::Zero(2, 2);
    e.matrix(0, 0) = 0.6;
    e.matrix(1, 1) = 0.2;
    e.trace = 0.8;
    e.order = 3;
    auto d = distill(e);
    EXPECT_TRUE(d.distilled);
    EXPECT_NEAR(d.matrix(0, 0).real(), 0.75, 1e-15);
    ShadowEstimate scaled = e;
    scaled.matrix *= 3.0;
    scaled.trace *= 3.0;
    EXPECT_LT((distill(scaled).matrix - d.matrix).norm(), 1e-15);
    EXPECT_LT((distill(d).matrix - d.matrix).norm(), 1e-15);
}

TEST(Distill, VanishingTraceIsDegenerate) {
    ShadowEstimate e;
    e.matrix = Eigen::MatrixXcd::Zero(2, 2);
    e.trace = 1e-9;
    EXPECT_THROW(distill(e), DegenerateError);
}

TEST(Distill, ExactCubicSuppressesMixedComponent) {
    // rho = (1 - eps) |psi><psi| + eps |phi><phi| with orthogonal states:
    // rho^3 / Tr rho^3 leaves weight eps^3 / ((1 - eps)^3 + eps^3) on phi.
    double eps = 0.1;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
    rho(0, 0) = 1 - eps;
    rho(1, 1) = eps;
    ShadowEstimate e;
    e.matrix = rho * rho * rho;
    e.trace = e.matrix.trace();
    e.order = 3;
    auto d = distill(e);
    double want = std::pow(eps, 3) / (std::pow(1 - eps, 3) + std::pow(eps, 3));
    EXPECT_NEAR(d.matrix(1, 1).real(), want, 1e-15);
    EXPECT_NEAR(want, 1.3699e-3, 1e-6);
}
