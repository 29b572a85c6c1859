#ifndef NOQE_CLIFFORD_H
#define NOQE_CLIFFORD_H

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "noqe/circuit.h"
#include "noqe/pauli.h"
#include "noqe/rng.h"
#include "noqe/statevector.h"

namespace noqe {

inline constexpr int kMaxTableauQubits = 12;

/// Stabilizer tableau of a Clifford unitary U, up to global phase.
///
/// Row q (q < N) holds U X_q U^dagger and row N + q holds U Z_q U^dagger, each as
/// a signed Pauli. Inside a row, bit q is the X component on qubit q and bit
/// N + q the Z component; X and Z both set means Y.
class CliffordTableau {
   public:
    /// Identity tableau.
    explicit CliffordTableau(int num_qubits = 1);

    int num_qubits() const {
        return n_;
    }
    uint32_t row(int r) const {
        return rows_[static_cast<size_t>(r)];
    }
    bool sign(int r) const {
        return (signs_ >> r) & 1;
    }
    uint32_t sign_bits() const {
        return signs_;
    }
    void set_row(int r, uint32_t bits, bool sign);

    bool x(int r, int q) const {
        return (row(r) >> q) & 1;
    }
    bool z(int r, int q) const {
        return (row(r) >> (n_ + q)) & 1;
    }

    /// Row as a Pauli word (sign reported separately).
    PauliWord row_pauli(int r) const;

    /// Rows pairwise satisfy the symplectic relations of X_q, Z_q.
    bool is_symplectic() const;

    // In-place update to the tableau of G * U.
    void apply_h(int q);
    void apply_s(int q);
    void apply_sdg(int q);
    void apply_x(int q);
    void apply_z(int q);
    void apply_cnot(int control, int target);
    void apply_cz(int a, int b);
    /// Throws ContractError for non-Clifford gate kinds.
    void apply(const Gate &g);

    bool operator==(const CliffordTableau &other) const = default;

   private:
    int n_;
    std::array<uint32_t, 2 * kMaxTableauQubits> rows_{};
    uint32_t signs_ = 0;
};

/// Symplectic form between two packed rows of an N-qubit tableau.
int symplectic_product(uint32_t a, uint32_t b, int num_qubits);

/// Uniformly random Clifford (modulo phase): a uniformly random symplectic
/// basis built pair by pair, plus uniformly random sign bits.
CliffordTableau sample_uniform_clifford(int num_qubits, SplitMix64 &rng);

/// Gates g_1..g_k over {H, Sdg, CNOT, X, Z} reducing the tableau to identity:
/// applying them in order to U yields the identity, so they implement U^dagger.
std::vector<Gate> elimination_sequence(const CliffordTableau &t);

/// Circuit over {H, S, CNOT, X, Z} implementing U. Deterministic per tableau.
Circuit to_circuit(const CliffordTableau &t);

/// Tableau of a circuit made of Clifford gates. Throws on other kinds.
CliffordTableau tableau_from_circuit(const Circuit &c);

/// U^dagger |b> as a dense vector (global phase unspecified).
Eigen::VectorXcd pullback_vector(const CliffordTableau &t, uint64_t b);
void pullback_into(const std::vector<Gate> &elimination, int num_qubits, uint64_t b, cplx *out);
Statevector pullback_basis_state(const CliffordTableau &t, std::string_view bits);

// Serialization: the 2N x 2N bit matrix row-major (columns: x bits of qubits
// 0..N-1, then z bits), packed MSB-first into hex digits; signs likewise.
std::string tableau_to_hex(const CliffordTableau &t);
std::string signs_to_hex(const CliffordTableau &t);
/// Throws ContractError on malformed or non-symplectic input.
CliffordTableau tableau_from_hex(int num_qubits, std::string_view bits_hex, std::string_view signs_hex);

}  // namespace noqe

#endif
