#ifndef NOQE_PAULI_H
#define NOQE_PAULI_H

#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "noqe/statevector.h"

namespace noqe {

enum class PauliLetter : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-qubit Paulis; letter 0 acts on qubit 0.
class PauliWord {
   public:
    PauliWord() = default;
    explicit PauliWord(std::vector<PauliLetter> letters);

    /// Parses letters from {I, X, Y, Z}. Throws ParseError otherwise.
    static PauliWord parse(std::string_view text);
    static PauliWord identity(int num_qubits);

    int num_qubits() const {
        return static_cast<int>(letters_.size());
    }
    PauliLetter operator[](int q) const {
        return letters_[static_cast<size_t>(q)];
    }
    const std::vector<PauliLetter> &letters() const {
        return letters_;
    }
    std::string str() const;

    // Basis-index masks. Y contributes to both.
    // P|b> = i^{num_y} (-1)^{popcount(b & z_mask)} |b ^ x_mask>.
    uint64_t x_mask() const {
        return x_mask_;
    }
    uint64_t z_mask() const {
        return z_mask_;
    }
    int num_y() const {
        return num_y_;
    }
    bool is_identity() const;
    bool is_diagonal() const {
        return x_mask() == 0;
    }

    /// Support as qubit indices carrying a non-identity letter.
    std::vector<int> support() const;

    auto operator<=>(const PauliWord &) const = default;
    bool operator==(const PauliWord &) const = default;

   private:
    std::vector<PauliLetter> letters_;
    uint64_t x_mask_ = 0;
    uint64_t z_mask_ = 0;
    int num_y_ = 0;
};

/// Phase i^{num_y} (-1)^{popcount(b & z)} picked up by P acting on |b>.
cplx pauli_phase(const PauliWord &word, uint64_t b);

struct PauliTerm {
    PauliWord word;
    cplx coefficient;
};

struct FrobeniusBound {
    double B = 0;    // Tr(H^2) = D * sum |w_k|^2
    uint64_t D = 1;  // Hilbert dimension
};

/// Weighted Pauli sum. Terms keep first-appearance order; duplicates merged.
class PauliSum {
   public:
    PauliSum() = default;
    PauliSum(int num_qubits, std::vector<PauliTerm> terms, std::string unit_label = "");

    int num_qubits() const {
        return num_qubits_;
    }
    const std::vector<PauliTerm> &terms() const {
        return terms_;
    }
    size_t term_count() const {
        return terms_.size();
    }
    const std::string &unit_label() const {
        return unit_label_;
    }
    /// Set when every coefficient is real within 1e-12.
    bool hermitian() const {
        return hermitian_;
    }
    FrobeniusBound frobenius_bound() const;

    static PauliSum single(const PauliWord &word, cplx coefficient = 1.0);

   private:
    int num_qubits_ = 0;
    std::vector<PauliTerm> terms_;
    std::string unit_label_;
    bool hermitian_ = true;
};

Eigen::MatrixXcd materialize(const PauliWord &word);
Eigen::MatrixXcd materialize(const PauliSum &sum);

/// P|psi> without materializing P.
Eigen::VectorXcd apply_pauli(const PauliWord &word, const Eigen::VectorXcd &psi);

/// <psi|P|psi> and sum_k w_k <psi|P_k|psi>.
cplx expectation(const PauliWord &word, const Statevector &state);
cplx expectation(const PauliSum &obs, const Statevector &state);

/// <a|O|b>.
cplx matrix_element(const PauliSum &obs, const Statevector &a, const Statevector &b);

/// Tr(O M) for a dense D x D matrix M, in O(terms * D).
cplx trace_with(const PauliSum &obs, const Eigen::MatrixXcd &m);
cplx trace_with(const PauliWord &word, const Eigen::MatrixXcd &m);

/// Hamiltonian JSON: {"num_qubits", "unit", "terms": [{"pauli", "re", "im"}]}.
PauliSum parse_hamiltonian(std::string_view json_text);
PauliSum load_hamiltonian(const std::string &path);
std::string hamiltonian_to_json(const PauliSum &sum);

}  // namespace noqe

#endif
