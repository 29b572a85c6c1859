#ifndef NOQE_REFERENCES_H
#define NOQE_REFERENCES_H

#include <string>
#include <vector>

#include "noqe/circuit.h"

namespace noqe {

/// One NOQE reference |psi> = ansatz |hf_occupation>.
///
/// The ansatz must conserve particle number and leave the vacuum untouched
/// (including its phase): auxiliary and Hadamard-test circuits rely on the
/// ansatz acting trivially on the |0...0> branch.
struct ReferenceSpec {
    std::string label;
    int num_qubits = 0;
    Circuit ansatz;
    std::string hf_occupation;  // empty means N/2 ones then N/2 zeros

    std::string occupation() const;
};

/// Throws ContractError for odd N, width mismatches, a malformed occupation
/// string, or an ansatz that is not particle conserving.
void validate_reference(const ReferenceSpec &spec);

/// X gates on the occupied qubits followed by the ansatz.
Circuit build_reference_circuit(const ReferenceSpec &spec);

/// Ansatz made of `subroutines` blocks; each block applies Givens rotations on
/// adjacent pairs (N - 1 of them) then controlled-RZ on every pair c < t. An
/// optional leading layer of adjacent Givens rotations carries an absorbed
/// orbital rotation. Angles are consumed in gate order.
Circuit build_subroutine_ansatz(int num_qubits, const std::vector<double> &angles, int subroutines = 4,
                                bool orbital_rotation = true);
size_t subroutine_ansatz_angle_count(int num_qubits, int subroutines = 4, bool orbital_rotation = true);

enum class AuxKind { R, I };

/// (|0...0> + |psi>)/sqrt(2) for R, (|0...0> + i|psi>)/sqrt(2) for I: a GHZ
/// ladder over the occupied qubits, an S gate on the first of them for I,
/// then the ansatz.
Circuit build_auxiliary_circuit(const ReferenceSpec &spec, AuxKind kind);

/// Register layout of the Hadamard-test circuit on 2N + 1 qubits.
struct HadamardLayout {
    int num_qubits = 0;  // N
    int register_a(int q) const {
        return q;
    }
    int register_b(int q) const {
        return num_qubits + q;
    }
    int ancilla() const {
        return 2 * num_qubits;
    }
    int total() const {
        return 2 * num_qubits + 1;
    }
};

/// Hadamard test for <psi_i|P|psi_j>. Before the final H on the ancilla the
/// state is (|psi_i>|0> + e^{i theta}|psi_j>|1>)/sqrt(2) on (A, ancilla) with
/// register B back in the vacuum, so <P_A Z_anc> = Re(e^{i theta}<psi_i|P|psi_j>).
///
/// The simplified first stage uses X, H, PHASE and CNOT fan-out from the
/// ancilla; the general stage routes the occupation through a CSWAP network.
/// Both prepare the same state.
Circuit build_hadamard_circuit(const ReferenceSpec &spec_i, const ReferenceSpec &spec_j, double theta,
                               bool simplified_first_stage = true);

}  // namespace noqe

#endif
