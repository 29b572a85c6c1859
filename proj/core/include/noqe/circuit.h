#ifndef NOQE_CIRCUIT_H
#define NOQE_CIRCUIT_H

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "noqe/statevector.h"

namespace noqe {

enum class GateKind : uint8_t {
    H,
    X,
    Z,
    S,
    Sdg,
    PHASE,
    RZ,
    RY,
    CNOT,
    CZ,
    CRZ,
    GIVENS,
    CSWAP,
    U1Q,
    U2Q,
};

std::string_view gate_name(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);  // throws ParseError
int gate_arity(GateKind kind);
bool gate_has_angle(GateKind kind);

/// One gate. Qubit order matters for matrices: the first listed qubit is the
/// most significant bit of the gate's local basis (control first for CNOT,
/// CRZ and CSWAP).
struct Gate {
    GateKind kind = GateKind::H;
    std::array<int, 3> qubits{0, 0, 0};
    double theta = 0;                                // radians, for angle gates
    std::shared_ptr<const Eigen::MatrixXcd> matrix;  // for U1Q / U2Q only

    int arity() const {
        return gate_arity(kind);
    }

    static Gate h(int q);
    static Gate x(int q);
    static Gate z(int q);
    static Gate s(int q);
    static Gate sdg(int q);
    static Gate phase(int q, double theta);
    static Gate rz(int q, double theta);
    static Gate ry(int q, double theta);
    static Gate cnot(int control, int target);
    static Gate cz(int a, int b);
    static Gate crz(int control, int target, double theta);
    static Gate givens(int a, int b, double theta);
    static Gate cswap(int control, int a, int b);
    static Gate u1q(int q, const Eigen::Matrix2cd &u);
    static Gate u2q(int a, int b, const Eigen::Matrix4cd &u);
};

/// Local unitary of a gate (2x2, 4x4 or 8x8).
Eigen::MatrixXcd gate_matrix(const Gate &g);
Gate inverse(const Gate &g);
bool is_clifford_kind(GateKind kind);

struct Circuit {
    int num_qubits = 0;
    std::vector<Gate> gates;
    std::string label;

    Circuit() = default;
    explicit Circuit(int n, std::string label_ = "") : num_qubits(n), label(std::move(label_)) {
    }
    Circuit &append(const Gate &g) {
        gates.push_back(g);
        return *this;
    }
    Circuit &append(const Circuit &other);
    size_t size() const {
        return gates.size();
    }
};

/// Throws ContractError if any qubit index is out of range or repeated.
void validate(const Circuit &c);
Circuit inverse(const Circuit &c);
/// Copy of `c` acting on a wider register with every qubit shifted by `offset`.
Circuit embed(const Circuit &c, int num_qubits, int offset);

// Low-level kernels. Element i of the vector lives at v[i * stride]; this lets
// the same code act on density-matrix rows and columns. `conjugate` applies
// the complex conjugate of the gate matrix.
void apply_gate_strided(cplx *v, int num_qubits, uint64_t stride, const Gate &g, bool conjugate);
void apply_gate(Eigen::VectorXcd &amps, int num_qubits, const Gate &g);

Statevector run_circuit(const Circuit &c, const Statevector &initial);
void run_circuit_inplace(const Circuit &c, Eigen::VectorXcd &amps);

/// Dense unitary by applying the circuit to every basis vector.
Eigen::MatrixXcd circuit_unitary(const Circuit &c);

using OutcomeCounts = std::map<std::string, uint64_t>;

/// Draws `shots` computational-basis outcomes from |amplitude|^2.
OutcomeCounts sample_bitstrings(const Statevector &state, uint64_t shots, uint64_t seed);
/// Same, from an explicit probability vector over basis indices.
OutcomeCounts sample_from_probabilities(const Eigen::VectorXd &probs, int num_qubits, uint64_t shots,
                                        uint64_t seed);

/// Circuit JSON: {"num_qubits", "gates": [{"name", "qubits", "params"}], "label"?}.
Circuit parse_circuit(std::string_view json_text);
Circuit load_circuit(const std::string &path);
std::string circuit_to_json(const Circuit &c);
/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string circuit_hash(const Circuit &c);

}  // namespace noqe

#endif
