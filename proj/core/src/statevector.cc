#include "noqe/statevector.h"

#include "noqe/errors.h"

namespace noqe {

uint64_t bitstring_to_index(std::string_view bits) {
    if (bits.empty() || bits.size() > 63) {
        throw ContractError("bitstring length must be in [1, 63]");
    }
    uint64_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw ContractError("bitstring contains a character other than 0/1: " + std::string(bits));
        }
        index = (index << 1) | static_cast<uint64_t>(c == '1');
    }
    return index;
}

std::string index_to_bitstring(uint64_t index, int num_qubits) {
    std::string out(static_cast<size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; q++) {
        if ((index >> qubit_bit(num_qubits, q)) & 1) {
            out[static_cast<size_t>(q)] = '1';
        }
    }
    return out;
}

static void check_width(int num_qubits) {
    if (num_qubits < 1) {
        throw ContractError("qubit count must be at least 1");
    }
    if (num_qubits > kMaxDenseQubits) {
        throw ResourceError("dense statevector limited to " + std::to_string(kMaxDenseQubits) + " qubits");
    }
}

Statevector::Statevector(int num_qubits) : num_qubits_(num_qubits) {
    check_width(num_qubits);
    amps_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim()));
    amps_[0] = 1.0;
}

Statevector::Statevector(int num_qubits, Eigen::VectorXcd amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    check_width(num_qubits);
    if (static_cast<uint64_t>(amps_.size()) != dim()) {
        throw ContractError("amplitude vector length does not match 2^num_qubits");
    }
}

Statevector Statevector::basis(int num_qubits, uint64_t index) {
    Statevector s(num_qubits);
    if (index >= s.dim()) {
        throw ContractError("basis index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

Statevector Statevector::from_bitstring(std::string_view bits) {
    return basis(static_cast<int>(bits.size()), bitstring_to_index(bits));
}

cplx inner_product(const Statevector &a, const Statevector &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw ContractError("inner_product: qubit count mismatch");
    }
    return a.amplitudes().dot(b.amplitudes());
}

}  // namespace noqe
