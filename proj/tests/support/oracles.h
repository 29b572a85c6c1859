#ifndef NOQE_TEST_ORACLES_H
#define NOQE_TEST_ORACLES_H

// Slow, independent reference implementations used only by tests. Nothing
// here shares code with the kernels under test beyond the basic types.

#include <Eigen/Dense>
#include <vector>

#include "noqe/circuit.h"
#include "noqe/noise.h"
#include "noqe/pauli.h"
#include "noqe/rng.h"
#include "noqe/shadows.h"

namespace noqe::oracle {

/// Kronecker product of a list of matrices.
Eigen::MatrixXcd kron(const std::vector<Eigen::MatrixXcd> &ms);

/// Full-register unitary of a gate built by permuting basis states, without
/// the strided kernels.
Eigen::MatrixXcd embed_gate(const Gate &g, int num_qubits);
Eigen::MatrixXcd circuit_matrix(const Circuit &c);

/// Kraus operators of each channel under the documented conventions.
std::vector<Eigen::MatrixXcd> kraus_1q(ChannelKind kind, double rate);
std::vector<Eigen::MatrixXcd> kraus_depolarizing_2q(double rate);
/// sum_k K rho K^dagger with K embedded on `qubits`.
Eigen::MatrixXcd apply_kraus(const Eigen::MatrixXcd &rho, const std::vector<Eigen::MatrixXcd> &ks,
                             const std::vector<int> &qubits, int num_qubits);
/// Gate-by-gate noisy evolution with explicit Kraus sums.
Eigen::MatrixXcd noisy_run(const Circuit &c, const NoiseModel &model, const Eigen::MatrixXcd &rho);

/// Explicit sum over ordered distinct m-tuples of snapshot matrices divided
/// by the tuple count, then Hermitized.
Eigen::MatrixXcd brute_force_u_statistic(const std::vector<Eigen::MatrixXcd> &snapshots, int m);

/// Haar-random state and a random Hermitian Pauli sum.
Eigen::VectorXcd random_state(int num_qubits, SplitMix64 &rng);
PauliSum random_pauli_sum(int num_qubits, int terms, SplitMix64 &rng);
Circuit random_circuit(int num_qubits, int gates, SplitMix64 &rng, bool clifford_only = false);
/// Random particle-conserving ansatz that fixes the vacuum.
Circuit random_conserving_ansatz(int num_qubits, int gates, SplitMix64 &rng);

double normal(SplitMix64 &rng);

}  // namespace noqe::oracle

#endif
