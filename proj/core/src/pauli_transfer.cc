#include "noqe/pauli_transfer.h"

#include <bit>
#include <cmath>

#include "noqe/errors.h"

namespace noqe {

namespace {

// Basis-index mask for the packed qubit bits (qubit q <-> basis bit N-1-q).
uint64_t to_basis_mask(uint64_t bits, int n) {
    uint64_t out = 0;
    for (int q = 0; q < n; q++) {
        if ((bits >> q) & 1) {
            out |= uint64_t{1} << (n - 1 - q);
        }
    }
    return out;
}

// Conjugates one signed Pauli by a Clifford gate (same rules as the tableau).
inline void conjugate(uint32_t &row, bool &sign, const Gate &g, int n) {
    auto bit = [&](int pos) { return (row >> pos) & 1u; };
    auto flip = [&](int pos) { row ^= uint32_t{1} << pos; };
    int a = g.qubits[0];
    switch (g.kind) {
        case GateKind::H: {
            uint32_t xb = bit(a), zb = bit(n + a);
            sign ^= xb & zb;
            if (xb != zb) {
                flip(a);
                flip(n + a);
            }
            return;
        }
        case GateKind::S: {
            uint32_t xb = bit(a), zb = bit(n + a);
            sign ^= xb & zb;
            if (xb) {
                flip(n + a);
            }
            return;
        }
        case GateKind::Sdg: {
            uint32_t xb = bit(a), zb = bit(n + a);
            sign ^= xb & (zb ^ 1u);
            if (xb) {
                flip(n + a);
            }
            return;
        }
        case GateKind::X:
            sign ^= bit(n + a);
            return;
        case GateKind::Z:
            sign ^= bit(a);
            return;
        case GateKind::CNOT: {
            int b = g.qubits[1];
            uint32_t xa = bit(a), xb = bit(b), za = bit(n + a), zb = bit(n + b);
            sign ^= xa & zb & (xb ^ za ^ 1u);
            if (xa) {
                flip(b);
            }
            if (zb) {
                flip(n + a);
            }
            return;
        }
        case GateKind::CZ: {
            Gate h = Gate::h(g.qubits[1]);
            Gate cx = Gate::cnot(a, g.qubits[1]);
            conjugate(row, sign, h, n);
            conjugate(row, sign, cx, n);
            conjugate(row, sign, h, n);
            return;
        }
        default:
            throw ContractError("Pauli-transfer path accepts Clifford gates only, got " +
                                std::string(gate_name(g.kind)));
    }
}

}  // namespace

PauliTransferState::PauliTransferState(const DensityMatrix &rho) : n_(rho.num_qubits()) {
    if (n_ > 8) {
        throw ResourceError("Pauli-transfer representation limited to 8 qubits");
    }
    uint64_t d = uint64_t{1} << n_;
    uint64_t count = d * d;
    c_.assign(count, 0.0);
    scratch_.assign(count, 0.0);
    const auto &m = rho.matrix();
    for (uint64_t p = 0; p < count; p++) {
        uint64_t xb = p & (d - 1), zb = p >> n_;
        uint64_t X = to_basis_mask(xb, n_), Z = to_basis_mask(zb, n_);
        int ny = std::popcount(xb & zb);
        // P|c> = phase(c)|c^X>, so Tr(P rho) = sum_c phase(c) rho[c, c^X].
        cplx acc = 0;
        for (uint64_t c = 0; c < d; c++) {
            double s = (std::popcount(c & Z) & 1) ? -1.0 : 1.0;
            acc += s * m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ X));
        }
        static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        c_[p] = (kIPow[ny & 3] * acc).real();
    }
}

void PauliTransferState::apply_gate(const Gate &g) {
    uint64_t count = c_.size();
    std::fill(scratch_.begin(), scratch_.end(), 0.0);
    for (uint64_t p = 0; p < count; p++) {
        uint32_t row = static_cast<uint32_t>(p);
        bool sign = false;
        conjugate(row, sign, g, n_);
        scratch_[row] = sign ? -c_[p] : c_[p];
    }
    c_.swap(scratch_);
}

void PauliTransferState::apply_channel(const NoiseOp &op) {
    if (op.rate == 0) {
        return;
    }
    uint64_t count = c_.size();
    uint32_t xa = uint32_t{1} << op.qubits[0], za = uint32_t{1} << (n_ + op.qubits[0]);
    double r = op.rate;
    switch (op.kind) {
        case ChannelKind::Depolarizing: {
            uint32_t support = xa | za;
            if (op.arity == 2) {
                support |= (uint32_t{1} << op.qubits[1]) | (uint32_t{1} << (n_ + op.qubits[1]));
            }
            for (uint64_t p = 0; p < count; p++) {
                if (p & support) {
                    c_[p] *= (1 - r);
                }
            }
            return;
        }
        case ChannelKind::AmplitudeDamping: {
            double s = std::sqrt(1 - r);
            for (uint64_t p = 0; p < count; p++) {
                if (p & xa) {
                    c_[p] *= s;
                } else if (p & za) {
                    c_[p] = (1 - r) * c_[p] + r * c_[p ^ za];
                }
            }
            return;
        }
        case ChannelKind::PhaseDamping: {
            double s = std::sqrt(1 - r);
            for (uint64_t p = 0; p < count; p++) {
                if (p & xa) {
                    c_[p] *= s;
                }
            }
            return;
        }
    }
}

void PauliTransferState::apply_noisy(const Gate &g, const NoiseModel &model) {
    apply_gate(g);
    for (const auto &op : noise_after(g, model)) {
        apply_channel(op);
    }
}

Eigen::VectorXd PauliTransferState::probabilities() const {
    uint64_t d = uint64_t{1} << n_;
    // Walsh-Hadamard transform over the Z-type coefficients.
    std::vector<double> f(d);
    for (uint64_t z = 0; z < d; z++) {
        f[z] = c_[z << n_];
    }
    for (uint64_t h = 1; h < d; h <<= 1) {
        for (uint64_t i = 0; i < d; i += 2 * h) {
            for (uint64_t j = i; j < i + h; j++) {
                double a = f[j], b = f[j + h];
                f[j] = a + b;
                f[j + h] = a - b;
            }
        }
    }
    Eigen::VectorXd p(static_cast<Eigen::Index>(d));
    for (uint64_t y = 0; y < d; y++) {
        p[static_cast<Eigen::Index>(to_basis_mask(y, n_))] = std::max(f[y] / static_cast<double>(d), 0.0);
    }
    return p;
}

DensityMatrix PauliTransferState::to_density() const {
    uint64_t d = uint64_t{1} << n_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (uint64_t p = 0; p < c_.size(); p++) {
        if (c_[p] == 0) {
            continue;
        }
        uint64_t xb = p & (d - 1), zb = p >> n_;
        uint64_t X = to_basis_mask(xb, n_), Z = to_basis_mask(zb, n_);
        cplx ph = kIPow[std::popcount(xb & zb) & 3];
        for (uint64_t b = 0; b < d; b++) {
            double s = (std::popcount(b & Z) & 1) ? -1.0 : 1.0;
            m(static_cast<Eigen::Index>(b ^ X), static_cast<Eigen::Index>(b)) += c_[p] * s * ph;
        }
    }
    return DensityMatrix(n_, m / static_cast<double>(d));
}

Eigen::VectorXd noisy_clifford_probabilities(const PauliTransferState &prep, const Circuit &c,
                                             const NoiseModel &model) {
    PauliTransferState st = prep;
    for (const auto &g : c.gates) {
        st.apply_noisy(g, model);
    }
    return st.probabilities();
}

}  // namespace noqe
