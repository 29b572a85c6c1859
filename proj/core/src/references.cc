#include "noqe/references.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "noqe/errors.h"

namespace noqe {

std::string ReferenceSpec::occupation() const {
    if (!hf_occupation.empty()) {
        return hf_occupation;
    }
    return std::string(static_cast<size_t>(num_qubits / 2), '1') + std::string(static_cast<size_t>(num_qubits / 2), '0');
}

static std::vector<int> occupied(const ReferenceSpec &spec) {
    std::vector<int> out;
    auto occ = spec.occupation();
    for (int q = 0; q < spec.num_qubits; q++) {
        if (occ[static_cast<size_t>(q)] == '1') {
            out.push_back(q);
        }
    }
    return out;
}

void validate_reference(const ReferenceSpec &spec) {
    const std::string who = "reference '" + spec.label + "': ";
    if (spec.num_qubits < 2 || spec.num_qubits % 2 != 0) {
        throw ContractError(who + "qubit count must be even and positive, got " + std::to_string(spec.num_qubits));
    }
    if (spec.ansatz.num_qubits != spec.num_qubits) {
        throw ContractError(who + "ansatz acts on " + std::to_string(spec.ansatz.num_qubits) + " qubits, expected " +
                            std::to_string(spec.num_qubits));
    }
    auto occ = spec.occupation();
    if (occ.size() != static_cast<size_t>(spec.num_qubits) ||
        occ.find_first_not_of("01") != std::string::npos) {
        throw ContractError(who + "occupation '" + occ + "' is not a bitstring of length " +
                            std::to_string(spec.num_qubits));
    }
    if (occ.find('1') == std::string::npos) {
        throw ContractError(who + "occupation string has no occupied orbital");
    }
    validate(spec.ansatz);

    Statevector vac(spec.num_qubits);
    cplx v = run_circuit(spec.ansatz, vac).amplitudes()[0];
    if (std::abs(v - cplx(1, 0)) > 1e-10) {
        throw ContractError(who + "ansatz does not leave |0...0> invariant (amplitude " + std::to_string(v.real()) +
                            (v.imag() < 0 ? "" : "+") + std::to_string(v.imag()) + "i)");
    }
    auto out = run_circuit(spec.ansatz, Statevector::from_bitstring(occ));
    int weight = static_cast<int>(std::count(occ.begin(), occ.end(), '1'));
    double leaked = 0;
    for (uint64_t b = 0; b < out.dim(); b++) {
        if (std::popcount(b) != weight) {
            leaked += std::norm(out.amplitudes()[static_cast<Eigen::Index>(b)]);
        }
    }
    if (leaked > 1e-20) {
        throw ContractError(who + "ansatz changes the particle number (weight outside sector " +
                            std::to_string(std::sqrt(leaked)) + ")");
    }
}

Circuit build_reference_circuit(const ReferenceSpec &spec) {
    validate_reference(spec);
    Circuit c(spec.num_qubits, spec.label);
    for (int q : occupied(spec)) {
        c.append(Gate::x(q));
    }
    c.append(spec.ansatz);
    return c;
}

size_t subroutine_ansatz_angle_count(int n, int subroutines, bool orbital_rotation) {
    size_t adjacent = static_cast<size_t>(n - 1);
    size_t pairs = static_cast<size_t>(n * (n - 1) / 2);
    return (orbital_rotation ? adjacent : 0) + static_cast<size_t>(subroutines) * (adjacent + pairs);
}

Circuit build_subroutine_ansatz(int n, const std::vector<double> &angles, int subroutines, bool orbital_rotation) {
    if (n < 2) {
        throw ContractError("subroutine ansatz needs at least two qubits");
    }
    size_t want = subroutine_ansatz_angle_count(n, subroutines, orbital_rotation);
    if (angles.size() != want) {
        throw ContractError("subroutine ansatz needs " + std::to_string(want) + " angles, got " +
                            std::to_string(angles.size()));
    }
    Circuit c(n, "ansatz");
    size_t k = 0;
    if (orbital_rotation) {
        for (int q = 0; q + 1 < n; q++) {
            c.append(Gate::givens(q, q + 1, angles[k++]));
        }
    }
    for (int s = 0; s < subroutines; s++) {
        for (int q = 0; q + 1 < n; q++) {
            c.append(Gate::givens(q, q + 1, angles[k++]));
        }
        for (int a = 0; a < n; a++) {
            for (int b = a + 1; b < n; b++) {
                c.append(Gate::crz(a, b, angles[k++]));
            }
        }
    }
    return c;
}

Circuit build_auxiliary_circuit(const ReferenceSpec &spec, AuxKind kind) {
    validate_reference(spec);
    auto occ = occupied(spec);
    Circuit c(spec.num_qubits, spec.label + (kind == AuxKind::R ? "_R" : "_I"));
    c.append(Gate::h(occ[0]));
    for (size_t k = 1; k < occ.size(); k++) {
        c.append(Gate::cnot(occ[k - 1], occ[k]));
    }
    if (kind == AuxKind::I) {
        c.append(Gate::s(occ[0]));
    }
    c.append(spec.ansatz);
    return c;
}

Circuit build_hadamard_circuit(const ReferenceSpec &spec_i, const ReferenceSpec &spec_j, double theta,
                               bool simplified_first_stage) {
    validate_reference(spec_i);
    validate_reference(spec_j);
    if (spec_i.num_qubits != spec_j.num_qubits) {
        throw ContractError("Hadamard test: references '" + spec_i.label + "' and '" + spec_j.label +
                            "' have different widths");
    }
    HadamardLayout lay{spec_i.num_qubits};
    int n = lay.num_qubits;
    int anc = lay.ancilla();
    auto occ_i = spec_i.occupation();
    auto occ_j = spec_j.occupation();
    Circuit c(lay.total(), "hadamard_" + spec_i.label + "_" + spec_j.label);

    for (int q = 0; q < n; q++) {
        if (occ_i[static_cast<size_t>(q)] == '1') {
            c.append(Gate::x(lay.register_a(q)));
        }
    }
    c.append(Gate::h(anc));
    c.append(Gate::phase(anc, theta));
    if (simplified_first_stage) {
        // Ancilla 1 empties A and fills B directly.
        for (int q = 0; q < n; q++) {
            if (occ_i[static_cast<size_t>(q)] == '1') {
                c.append(Gate::cnot(anc, lay.register_a(q)));
            }
        }
        for (int q = 0; q < n; q++) {
            if (occ_j[static_cast<size_t>(q)] == '1') {
                c.append(Gate::cnot(anc, lay.register_b(q)));
            }
        }
    } else {
        // Swap the occupation into B, then fix up the bits where the strings differ.
        for (int q = 0; q < n; q++) {
            c.append(Gate::cswap(anc, lay.register_a(q), lay.register_b(q)));
        }
        for (int q = 0; q < n; q++) {
            if (occ_i[static_cast<size_t>(q)] != occ_j[static_cast<size_t>(q)]) {
                c.append(Gate::cnot(anc, lay.register_b(q)));
            }
        }
    }
    c.append(embed(spec_i.ansatz, lay.total(), 0));
    c.append(embed(spec_j.ansatz, lay.total(), n));
    for (int q = 0; q < n; q++) {
        c.append(Gate::cswap(anc, lay.register_a(q), lay.register_b(q)));
    }
    c.append(Gate::h(anc));
    return c;
}

}  // namespace noqe
