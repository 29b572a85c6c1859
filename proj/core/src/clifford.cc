#include "noqe/clifford.h"

#include <bit>

#include "noqe/errors.h"

namespace noqe {

CliffordTableau::CliffordTableau(int num_qubits) : n_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxTableauQubits) {
        throw ContractError("tableau width must be in [1, " + std::to_string(kMaxTableauQubits) + "]");
    }
    for (int q = 0; q < n_; q++) {
        rows_[static_cast<size_t>(q)] = uint32_t{1} << q;
        rows_[static_cast<size_t>(n_ + q)] = uint32_t{1} << (n_ + q);
    }
}

void CliffordTableau::set_row(int r, uint32_t bits, bool s) {
    rows_[static_cast<size_t>(r)] = bits;
    signs_ = (signs_ & ~(uint32_t{1} << r)) | (uint32_t{s} << r);
}

PauliWord CliffordTableau::row_pauli(int r) const {
    std::vector<PauliLetter> letters;
    for (int q = 0; q < n_; q++) {
        int code = x(r, q) | (z(r, q) << 1);
        static constexpr PauliLetter kMap[4] = {PauliLetter::I, PauliLetter::X, PauliLetter::Z, PauliLetter::Y};
        letters.push_back(kMap[code]);
    }
    return PauliWord(std::move(letters));
}

int symplectic_product(uint32_t a, uint32_t b, int n) {
    uint32_t low = (uint32_t{1} << n) - 1;
    uint32_t ax = a & low, az = a >> n, bx = b & low, bz = b >> n;
    return std::popcount((ax & bz) ^ (az & bx)) & 1;
}

bool CliffordTableau::is_symplectic() const {
    for (int i = 0; i < 2 * n_; i++) {
        for (int j = i + 1; j < 2 * n_; j++) {
            int expected = (j == i + n_) ? 1 : 0;
            if (symplectic_product(row(i), row(j), n_) != expected) {
                return false;
            }
        }
    }
    return true;
}

void CliffordTableau::apply_h(int q) {
    uint32_t xm = uint32_t{1} << q, zm = uint32_t{1} << (n_ + q);
    for (int r = 0; r < 2 * n_; r++) {
        uint32_t &row = rows_[static_cast<size_t>(r)];
        bool xb = row & xm, zb = row & zm;
        signs_ ^= uint32_t{xb && zb} << r;
        row &= ~(xm | zm);
        row |= (zb ? xm : 0) | (xb ? zm : 0);
    }
}

void CliffordTableau::apply_s(int q) {
    uint32_t xm = uint32_t{1} << q, zm = uint32_t{1} << (n_ + q);
    for (int r = 0; r < 2 * n_; r++) {
        uint32_t &row = rows_[static_cast<size_t>(r)];
        bool xb = row & xm, zb = row & zm;
        signs_ ^= uint32_t{xb && zb} << r;
        if (xb) {
            row ^= zm;
        }
    }
}

void CliffordTableau::apply_sdg(int q) {
    // X -> -Y, Y -> X.
    uint32_t xm = uint32_t{1} << q, zm = uint32_t{1} << (n_ + q);
    for (int r = 0; r < 2 * n_; r++) {
        uint32_t &row = rows_[static_cast<size_t>(r)];
        bool xb = row & xm, zb = row & zm;
        signs_ ^= uint32_t{xb && !zb} << r;
        if (xb) {
            row ^= zm;
        }
    }
}

void CliffordTableau::apply_x(int q) {
    uint32_t zm = uint32_t{1} << (n_ + q);
    for (int r = 0; r < 2 * n_; r++) {
        signs_ ^= uint32_t{(rows_[static_cast<size_t>(r)] & zm) != 0} << r;
    }
}

void CliffordTableau::apply_z(int q) {
    uint32_t xm = uint32_t{1} << q;
    for (int r = 0; r < 2 * n_; r++) {
        signs_ ^= uint32_t{(rows_[static_cast<size_t>(r)] & xm) != 0} << r;
    }
}

void CliffordTableau::apply_cnot(int a, int b) {
    uint32_t xa = uint32_t{1} << a, xb = uint32_t{1} << b;
    uint32_t za = uint32_t{1} << (n_ + a), zb = uint32_t{1} << (n_ + b);
    for (int r = 0; r < 2 * n_; r++) {
        uint32_t &row = rows_[static_cast<size_t>(r)];
        bool bxa = row & xa, bxb = row & xb, bza = row & za, bzb = row & zb;
        signs_ ^= uint32_t{bxa && bzb && (bxb == bza)} << r;
        if (bxa) {
            row ^= xb;
        }
        if (bzb) {
            row ^= za;
        }
    }
}

void CliffordTableau::apply_cz(int a, int b) {
    apply_h(b);
    apply_cnot(a, b);
    apply_h(b);
}

void CliffordTableau::apply(const Gate &g) {
    int q0 = g.qubits[0], q1 = g.qubits[1];
    int arity = g.arity();
    for (int j = 0; j < arity; j++) {
        if (g.qubits[static_cast<size_t>(j)] < 0 || g.qubits[static_cast<size_t>(j)] >= n_) {
            throw ContractError("tableau gate qubit out of range");
        }
    }
    switch (g.kind) {
        case GateKind::H:
            apply_h(q0);
            break;
        case GateKind::S:
            apply_s(q0);
            break;
        case GateKind::Sdg:
            apply_sdg(q0);
            break;
        case GateKind::X:
            apply_x(q0);
            break;
        case GateKind::Z:
            apply_z(q0);
            break;
        case GateKind::CNOT:
            apply_cnot(q0, q1);
            break;
        case GateKind::CZ:
            apply_cz(q0, q1);
            break;
        default:
            throw ContractError("gate " + std::string(gate_name(g.kind)) + " is not a Clifford gate");
    }
}

namespace {

uint32_t project_out(uint32_t v, const uint32_t *xs, const uint32_t *zs, int pairs, int n) {
    uint32_t out = v;
    for (int k = 0; k < pairs; k++) {
        if (symplectic_product(v, zs[k], n)) {
            out ^= xs[k];
        }
        if (symplectic_product(v, xs[k], n)) {
            out ^= zs[k];
        }
    }
    return out;
}

}  // namespace

CliffordTableau sample_uniform_clifford(int n, SplitMix64 &rng) {
    CliffordTableau t(n);
    uint32_t full = (n == 16) ? 0xFFFFFFFFu : ((uint32_t{1} << (2 * n)) - 1);
    uint32_t xs[kMaxTableauQubits], zs[kMaxTableauQubits];
    for (int j = 0; j < n; j++) {
        uint32_t xv;
        do {
            xv = project_out(static_cast<uint32_t>(rng()) & full, xs, zs, j, n);
        } while (xv == 0);
        uint32_t zv;
        do {
            zv = project_out(static_cast<uint32_t>(rng()) & full, xs, zs, j, n);
        } while (symplectic_product(xv, zv, n) != 1);
        xs[j] = xv;
        zs[j] = zv;
    }
    uint64_t sign_bits = rng();
    for (int j = 0; j < n; j++) {
        t.set_row(j, xs[j], (sign_bits >> j) & 1);
        t.set_row(n + j, zs[j], (sign_bits >> (n + j)) & 1);
    }
    return t;
}

std::vector<Gate> elimination_sequence(const CliffordTableau &input) {
    if (!input.is_symplectic()) {
        throw ContractError("to_circuit: tableau is not symplectic");
    }
    CliffordTableau t = input;
    int n = t.num_qubits();
    std::vector<Gate> seq;
    seq.reserve(static_cast<size_t>(4 * n * n));
    auto emit = [&](const Gate &g) {
        t.apply(g);
        seq.push_back(g);
    };
    for (int i = 0; i < n; i++) {
        int d = i, s = n + i;
        // Destabilizer row i becomes X-type on qubits >= i.
        for (int k = i; k < n; k++) {
            if (t.z(d, k)) {
                emit(t.x(d, k) ? Gate::sdg(k) : Gate::h(k));
            }
        }
        if (!t.x(d, i)) {
            for (int k = i + 1; k < n; k++) {
                if (t.x(d, k)) {
                    emit(Gate::cnot(k, i));
                    break;
                }
            }
        }
        for (int k = i + 1; k < n; k++) {
            if (t.x(d, k)) {
                emit(Gate::cnot(i, k));
            }
        }
        // Stabilizer row i becomes Z-type on qubits > i, then collapses onto i.
        for (int k = i + 1; k < n; k++) {
            if (t.x(s, k)) {
                if (t.z(s, k)) {
                    emit(Gate::sdg(k));
                }
                emit(Gate::h(k));
            }
        }
        for (int k = i + 1; k < n; k++) {
            if (t.z(s, k)) {
                emit(Gate::cnot(k, i));
            }
        }
        if (t.x(s, i)) {
            // Y_i -> Z_i while fixing X_i.
            emit(Gate::h(i));
            emit(Gate::sdg(i));
            emit(Gate::h(i));
        }
        if (t.sign(d)) {
            emit(Gate::z(i));
        }
        if (t.sign(s)) {
            emit(Gate::x(i));
        }
    }
    if (!(t == CliffordTableau(n))) {
        throw ContractError("to_circuit: elimination did not reach identity");
    }
    return seq;
}

Circuit to_circuit(const CliffordTableau &t) {
    auto seq = elimination_sequence(t);
    Circuit c(t.num_qubits());
    c.gates.reserve(seq.size());
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
        c.gates.push_back(inverse(*it));
    }
    return c;
}

CliffordTableau tableau_from_circuit(const Circuit &c) {
    validate(c);
    CliffordTableau t(c.num_qubits);
    for (const auto &g : c.gates) {
        t.apply(g);
    }
    return t;
}

void pullback_into(const std::vector<Gate> &elimination, int n, uint64_t b, cplx *out) {
    uint64_t d = uint64_t{1} << n;
    for (uint64_t k = 0; k < d; k++) {
        out[k] = 0;
    }
    out[b] = 1;
    for (const auto &g : elimination) {
        apply_gate_strided(out, n, 1, g, false);
    }
}

Eigen::VectorXcd pullback_vector(const CliffordTableau &t, uint64_t b) {
    int n = t.num_qubits();
    if (b >= (uint64_t{1} << n)) {
        throw ContractError("pullback: outcome index out of range");
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(uint64_t{1} << n));
    pullback_into(elimination_sequence(t), n, b, v.data());
    return v;
}

Statevector pullback_basis_state(const CliffordTableau &t, std::string_view bits) {
    if (static_cast<int>(bits.size()) != t.num_qubits()) {
        throw ContractError("pullback: bitstring length does not match tableau width");
    }
    return Statevector(t.num_qubits(), pullback_vector(t, bitstring_to_index(bits)));
}

namespace {

std::string pack_hex(const std::vector<bool> &bits) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (size_t k = 0; k < bits.size(); k += 4) {
        int nib = 0;
        for (size_t j = 0; j < 4; j++) {
            nib = (nib << 1) | ((k + j < bits.size() && bits[k + j]) ? 1 : 0);
        }
        out.push_back(kHex[nib]);
    }
    return out;
}

std::vector<bool> unpack_hex(std::string_view hex, size_t nbits, const char *what) {
    if (hex.size() != (nbits + 3) / 4) {
        throw ContractError(std::string(what) + ": expected " + std::to_string((nbits + 3) / 4) +
                            " hex digits, found " + std::to_string(hex.size()));
    }
    std::vector<bool> bits;
    for (char c : hex) {
        int v;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            v = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
        } else {
            throw ContractError(std::string(what) + ": invalid hex digit");
        }
        for (int j = 3; j >= 0; j--) {
            bits.push_back((v >> j) & 1);
        }
    }
    for (size_t k = nbits; k < bits.size(); k++) {
        if (bits[k]) {
            throw ContractError(std::string(what) + ": nonzero padding bits");
        }
    }
    bits.resize(nbits);
    return bits;
}

}  // namespace

std::string tableau_to_hex(const CliffordTableau &t) {
    int n = t.num_qubits();
    std::vector<bool> bits;
    bits.reserve(static_cast<size_t>(4 * n * n));
    for (int r = 0; r < 2 * n; r++) {
        for (int c = 0; c < 2 * n; c++) {
            bits.push_back((t.row(r) >> c) & 1);
        }
    }
    return pack_hex(bits);
}

std::string signs_to_hex(const CliffordTableau &t) {
    int n = t.num_qubits();
    std::vector<bool> bits;
    for (int r = 0; r < 2 * n; r++) {
        bits.push_back(t.sign(r));
    }
    return pack_hex(bits);
}

CliffordTableau tableau_from_hex(int n, std::string_view bits_hex, std::string_view signs_hex) {
    CliffordTableau t(n);
    auto bits = unpack_hex(bits_hex, static_cast<size_t>(4 * n * n), "tableau");
    auto signs = unpack_hex(signs_hex, static_cast<size_t>(2 * n), "signs");
    for (int r = 0; r < 2 * n; r++) {
        uint32_t row = 0;
        for (int c = 0; c < 2 * n; c++) {
            if (bits[static_cast<size_t>(r * 2 * n + c)]) {
                row |= uint32_t{1} << c;
            }
        }
        t.set_row(r, row, signs[static_cast<size_t>(r)]);
    }
    if (!t.is_symplectic()) {
        throw ContractError("tableau: rows violate the symplectic condition");
    }
    return t;
}

}  // namespace noqe
