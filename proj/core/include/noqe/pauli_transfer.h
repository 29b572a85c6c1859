#ifndef NOQE_PAULI_TRANSFER_H
#define NOQE_PAULI_TRANSFER_H

#include <Eigen/Dense>
#include <vector>

#include "noqe/circuit.h"
#include "noqe/noise.h"

namespace noqe {

/// A density matrix in the Pauli basis, rho = (1/D) sum_P c_P P with real
/// c_P = Tr(P rho). Clifford gates permute coefficients up to sign and every
/// channel of the noise model acts locally on them, so noisy Clifford circuits
/// run in O(gates * 4^N) without dense D x D algebra.
///
/// Coefficient index: x bits in [0, N) and z bits in [N, 2N), bit q meaning
/// qubit q (same packing as tableau rows). X and Z both set means Y.
class PauliTransferState {
   public:
    explicit PauliTransferState(const DensityMatrix &rho);

    int num_qubits() const {
        return n_;
    }
    const std::vector<double> &coefficients() const {
        return c_;
    }

    /// Clifford gates only: H, S, Sdg, X, Z, CNOT, CZ.
    void apply_gate(const Gate &g);
    void apply_channel(const NoiseOp &op);
    /// Gate followed by its noise, matching noisy_run.
    void apply_noisy(const Gate &g, const NoiseModel &model);

    /// Computational-basis outcome distribution, indexed like Statevector.
    Eigen::VectorXd probabilities() const;

    DensityMatrix to_density() const;

   private:
    int n_;
    std::vector<double> c_;
    std::vector<double> scratch_;
};

/// Distribution of a Z-basis measurement of `c`(rho) under gate-level noise.
Eigen::VectorXd noisy_clifford_probabilities(const PauliTransferState &prep, const Circuit &c,
                                             const NoiseModel &model);

}  // namespace noqe

#endif
