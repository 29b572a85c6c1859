#ifndef NOQE_ESTIMATORS_H
#define NOQE_ESTIMATORS_H

#include <Eigen/Dense>

#include "noqe/pauli.h"
#include "noqe/shadows.h"

namespace noqe {

/// Order-m U-statistic estimate of rho (or of rho^m / Tr(rho^m) once distilled).
struct ShadowEstimate {
    Eigen::MatrixXcd matrix;
    int order = 1;
    double n = 0;
    cplx trace = 1;
    bool distilled = false;
};

/// Sufficient statistics for every order m <= 3. With P_a = |s_a><s_a| the
/// pulled-back projectors and w_a snapshot weights:
///   q  = sum_a w_a P_a
///   wq = sum_a w_a <s_a|q|s_a> P_a   (only needed for m = 3)
struct ShadowMoments {
    int num_qubits = 0;
    double n = 0;
    Eigen::MatrixXcd q;
    Eigen::MatrixXcd wq;
    bool has_wq = false;
};

/// Pulled-back states U^dagger|b> as columns of a D x n matrix.
Eigen::MatrixXcd pullback_states(const ShadowDataset &ds);

ShadowMoments shadow_moments(const ShadowDataset &ds, int max_order);
/// Weighted variant over precomputed pullbacks (bootstrap replicates pass
/// resampling multiplicities as weights). `weights` may be null.
ShadowMoments shadow_moments(const Eigen::MatrixXcd &states, const Eigen::VectorXd *weights, int max_order);

/// Average of A_a1 ... A_am over ordered tuples of distinct snapshots, with
/// A_a = (D+1) P_a - I, in closed form; returned Hermitized.
ShadowEstimate estimate_from_moments(const ShadowMoments &mom, int m);
ShadowEstimate u_estimate(const ShadowDataset &ds, int m);

/// Divides by the trace. Throws DegenerateError when |trace| < 1e-6.
ShadowEstimate distill(const ShadowEstimate &est);

/// Tr(obs * estimate).
cplx estimate_linear(const ShadowDataset &ds, const PauliSum &obs, int m);

/// Tr(O rho_a rho_b), plus Tr(O rho_b rho_a) when symmetrized. The two
/// datasets must be distinct acquisitions.
cplx estimate_bilinear(const ShadowDataset &a, const ShadowDataset &b, const PauliSum &obs, int m,
                       bool symmetrized = false);

/// Tr(A B) and Tr(O A B) on dense matrices.
cplx trace_product(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b);
cplx trace_product(const Eigen::MatrixXcd &o, const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b);

struct OverlapEstimate {
    cplx value;           // S_ij = <psi_i|psi_j>
    double abs_sq = 0;    // independent estimate of |S_ij|^2
    double consistency_residual = 0;  // |Re^2 + Im^2 - |S|^2|
};

/// |S|^2 from (i, j); Re S from the R auxiliaries of both; Im S from the I
/// auxiliary of i with the R auxiliary of j.
OverlapEstimate reconstruct_overlap(const ShadowEstimate &i, const ShadowEstimate &i_r, const ShadowEstimate &i_i,
                                    const ShadowEstimate &j, const ShadowEstimate &j_r);
OverlapEstimate reconstruct_overlap(const ShadowDataset &ds_i, const ShadowDataset &ds_r_i,
                                    const ShadowDataset &ds_i_i, const ShadowDataset &ds_j,
                                    const ShadowDataset &ds_r_j, int m, bool distill_estimates);

inline constexpr double kOverlapFloor = 0.05;

/// <psi_i|H|psi_j> = Tr(H rho_j rho_i) / conj(S_ij). Throws UnreliableDivision
/// when |S_ij| < delta.
cplx reconstruct_hamiltonian_element(const ShadowEstimate &i, const ShadowEstimate &j,
                                     const Eigen::MatrixXcd &hamiltonian, cplx s_ij,
                                     double delta = kOverlapFloor);
cplx reconstruct_hamiltonian_element(const ShadowDataset &ds_i, const ShadowDataset &ds_j, const PauliSum &h,
                                     cplx s_ij, int m, bool distill_estimates, double delta = kOverlapFloor);

}  // namespace noqe

#endif
