#ifndef NOQE_STATEVECTOR_H
#define NOQE_STATEVECTOR_H

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace noqe {

using cplx = std::complex<double>;

/// Dense simulation guardrail. Statevectors and materialized operators are
/// refused above this width.
inline constexpr int kMaxDenseQubits = 12;

/// Basis index of a bitstring. Qubit 0 is the leftmost character and the most
/// significant bit, so "1100" has index 12.
uint64_t bitstring_to_index(std::string_view bits);
std::string index_to_bitstring(uint64_t index, int num_qubits);

/// Bit position of qubit q inside a basis index.
inline int qubit_bit(int num_qubits, int q) {
    return num_qubits - 1 - q;
}

/// Pure state of N qubits stored as a dense amplitude vector of length 2^N.
class Statevector {
   public:
    /// |0...0> on `num_qubits` qubits.
    explicit Statevector(int num_qubits);
    Statevector(int num_qubits, Eigen::VectorXcd amplitudes);

    static Statevector basis(int num_qubits, uint64_t index);
    static Statevector from_bitstring(std::string_view bits);

    int num_qubits() const {
        return num_qubits_;
    }
    uint64_t dim() const {
        return uint64_t{1} << num_qubits_;
    }
    const Eigen::VectorXcd &amplitudes() const {
        return amps_;
    }
    Eigen::VectorXcd &amplitudes() {
        return amps_;
    }
    cplx operator[](uint64_t index) const {
        return amps_[static_cast<Eigen::Index>(index)];
    }
    double norm() const {
        return amps_.norm();
    }

   private:
    int num_qubits_;
    Eigen::VectorXcd amps_;
};

/// <a|b>. Throws ContractError on qubit-count mismatch.
cplx inner_product(const Statevector &a, const Statevector &b);

}  // namespace noqe

#endif
