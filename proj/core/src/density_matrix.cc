#include <cmath>
#include <nlohmann/json.hpp>

#include "noqe/errors.h"
#include "noqe/noise.h"

namespace noqe {

static void check_density_width(int n) {
    if (n < 1) {
        throw ContractError("density matrix needs at least one qubit");
    }
    if (n > kMaxDensityQubits) {
        throw ResourceError("density matrices limited to " + std::to_string(kMaxDensityQubits) + " qubits");
    }
}

DensityMatrix::DensityMatrix(int num_qubits) : n_(num_qubits) {
    check_density_width(num_qubits);
    auto d = static_cast<Eigen::Index>(dim());
    rho_ = Eigen::MatrixXcd::Zero(d, d);
    rho_(0, 0) = 1;
}

DensityMatrix::DensityMatrix(int num_qubits, Eigen::MatrixXcd rho) : n_(num_qubits), rho_(std::move(rho)) {
    check_density_width(num_qubits);
    if (static_cast<uint64_t>(rho_.rows()) != dim() || rho_.rows() != rho_.cols()) {
        throw ContractError("density matrix shape does not match qubit count");
    }
}

DensityMatrix DensityMatrix::from_statevector(const Statevector &psi) {
    return DensityMatrix(psi.num_qubits(), psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::fidelity(const Statevector &psi) const {
    if (psi.num_qubits() != n_) {
        throw ContractError("fidelity: qubit count mismatch");
    }
    return psi.amplitudes().dot(rho_ * psi.amplitudes()).real();
}

Eigen::VectorXd DensityMatrix::probabilities() const {
    return rho_.diagonal().real().cwiseMax(0.0);
}

std::string channel_name(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::Depolarizing:
            return "depolarizing";
        case ChannelKind::AmplitudeDamping:
            return "amplitude_damping";
        case ChannelKind::PhaseDamping:
            return "phase_damping";
    }
    return "";
}

NoiseModel NoiseModel::flattened() const {
    NoiseModel out = *this;
    out.p1 = rate1();
    out.p2 = rate2();
    out.lambda = 1.0;
    return out;
}

void NoiseModel::validate() const {
    auto ok = [](double r) { return std::isfinite(r) && r >= 0 && r <= 1; };
    if (!(lambda >= 0) || !ok(rate1()) || !ok(rate2())) {
        throw ContractError("noise model: effective rates lambda*p1, lambda*p2 must lie in [0, 1]");
    }
}

bool NoiseModel::is_noiseless() const {
    return rate1() == 0 && rate2() == 0;
}

NoiseModel noise_model_from_json(const nlohmann::json &j) {
    if (!j.is_object()) {
        throw ParseError("noise: expected an object");
    }
    NoiseModel m;
    auto num = [&](const char *key, double &dst) {
        if (j.contains(key)) {
            if (!j[key].is_number()) {
                throw ParseError(std::string("noise: field \"") + key + "\" must be a number");
            }
            dst = j[key].get<double>();
        }
    };
    num("p1", m.p1);
    num("p2", m.p2);
    num("lambda", m.lambda);
    if (j.contains("channels")) {
        if (!j["channels"].is_array()) {
            throw ParseError("noise: field \"channels\" must be an array");
        }
        m.depolarizing = m.amplitude_damping = m.phase_damping = false;
        for (const auto &c : j["channels"]) {
            std::string name = c.is_string() ? c.get<std::string>() : "";
            if (name == "depolarizing") {
                m.depolarizing = true;
            } else if (name == "amplitude_damping") {
                m.amplitude_damping = true;
            } else if (name == "phase_damping") {
                m.phase_damping = true;
            } else {
                throw ParseError("noise: unknown channel \"" + name + "\"");
            }
        }
    }
    try {
        m.validate();
    } catch (const ContractError &e) {
        throw ParseError(e.what());
    }
    return m;
}

nlohmann::json noise_model_to_json(const NoiseModel &m) {
    nlohmann::json channels = nlohmann::json::array();
    if (m.depolarizing) {
        channels.push_back("depolarizing");
    }
    if (m.amplitude_damping) {
        channels.push_back("amplitude_damping");
    }
    if (m.phase_damping) {
        channels.push_back("phase_damping");
    }
    return {{"p1", m.p1}, {"p2", m.p2}, {"lambda", m.lambda}, {"channels", channels}};
}

int native_two_qubit_count(GateKind kind) {
    switch (kind) {
        case GateKind::CNOT:
        case GateKind::CZ:
        case GateKind::CRZ:
            return 1;
        case GateKind::GIVENS:
            return 2;
        case GateKind::U2Q:
            return 3;
        case GateKind::CSWAP:
            return 7;
        default:
            return 0;
    }
}

std::vector<NoiseOp> noise_after(const Gate &g, const NoiseModel &model) {
    std::vector<NoiseOp> ops;
    auto add_1q = [&](int q, double r) {
        if (model.depolarizing) {
            ops.push_back({ChannelKind::Depolarizing, {q, 0}, 1, r});
        }
        if (model.amplitude_damping) {
            ops.push_back({ChannelKind::AmplitudeDamping, {q, 0}, 1, r});
        }
        if (model.phase_damping) {
            ops.push_back({ChannelKind::PhaseDamping, {q, 0}, 1, r});
        }
    };
    auto add_2q = [&](int a, int b, double r) {
        if (model.depolarizing) {
            ops.push_back({ChannelKind::Depolarizing, {a, b}, 2, r});
        }
        if (model.amplitude_damping) {
            ops.push_back({ChannelKind::AmplitudeDamping, {a, 0}, 1, r});
            ops.push_back({ChannelKind::AmplitudeDamping, {b, 0}, 1, r});
        }
        if (model.phase_damping) {
            ops.push_back({ChannelKind::PhaseDamping, {a, 0}, 1, r});
            ops.push_back({ChannelKind::PhaseDamping, {b, 0}, 1, r});
        }
    };
    int rounds = native_two_qubit_count(g.kind);
    if (rounds == 0) {
        if (model.rate1() > 0) {
            add_1q(g.qubits[0], model.rate1());
        }
        return ops;
    }
    if (model.rate2() == 0) {
        return ops;
    }
    if (g.kind == GateKind::CSWAP) {
        // Native interactions cycle over the three qubit pairs.
        int c = g.qubits[0], a = g.qubits[1], b = g.qubits[2];
        const int pairs[3][2] = {{c, a}, {c, b}, {a, b}};
        for (int k = 0; k < rounds; k++) {
            add_2q(pairs[k % 3][0], pairs[k % 3][1], model.rate2());
        }
        return ops;
    }
    for (int k = 0; k < rounds; k++) {
        add_2q(g.qubits[0], g.qubits[1], model.rate2());
    }
    return ops;
}

void apply_unitary(DensityMatrix &rho, const Gate &g) {
    int n = rho.num_qubits();
    uint64_t d = rho.dim();
    cplx *data = rho.matrix().data();
    // Column-major storage: column c is contiguous, row r has stride d.
    for (uint64_t c = 0; c < d; c++) {
        apply_gate_strided(data + c * d, n, 1, g, false);
    }
    for (uint64_t r = 0; r < d; r++) {
        apply_gate_strided(data + r, n, d, g, true);
    }
}

namespace {

template <typename F>
void for_each_block_1q(DensityMatrix &rho, int q, F &&f) {
    int n = rho.num_qubits();
    uint64_t d = rho.dim();
    uint64_t m = uint64_t{1} << qubit_bit(n, q);
    auto &mat = rho.matrix();
    for (uint64_t c = 0; c < d; c++) {
        if (c & m) {
            continue;
        }
        for (uint64_t r = 0; r < d; r++) {
            if (r & m) {
                continue;
            }
            auto R0 = static_cast<Eigen::Index>(r), R1 = static_cast<Eigen::Index>(r | m);
            auto C0 = static_cast<Eigen::Index>(c), C1 = static_cast<Eigen::Index>(c | m);
            f(mat(R0, C0), mat(R0, C1), mat(R1, C0), mat(R1, C1));
        }
    }
}

void depolarize_2q(DensityMatrix &rho, int a, int b, double p) {
    int n = rho.num_qubits();
    uint64_t d = rho.dim();
    uint64_t ma = uint64_t{1} << qubit_bit(n, a), mb = uint64_t{1} << qubit_bit(n, b);
    uint64_t sub[4] = {0, mb, ma, ma | mb};
    auto &mat = rho.matrix();
    for (uint64_t c = 0; c < d; c++) {
        if (c & (ma | mb)) {
            continue;
        }
        for (uint64_t r = 0; r < d; r++) {
            if (r & (ma | mb)) {
                continue;
            }
            cplx tr = 0;
            for (int k = 0; k < 4; k++) {
                tr += mat(static_cast<Eigen::Index>(r | sub[k]), static_cast<Eigen::Index>(c | sub[k]));
            }
            for (int k = 0; k < 4; k++) {
                for (int l = 0; l < 4; l++) {
                    auto &e = mat(static_cast<Eigen::Index>(r | sub[k]), static_cast<Eigen::Index>(c | sub[l]));
                    e *= (1 - p);
                    if (k == l) {
                        e += p * tr / 4.0;
                    }
                }
            }
        }
    }
}

}  // namespace

void apply_channel_inplace(DensityMatrix &rho, ChannelKind kind, const std::vector<int> &qubits, double rate) {
    if (!(rate >= 0 && rate <= 1)) {
        throw ContractError("channel rate must lie in [0, 1]");
    }
    for (int q : qubits) {
        if (q < 0 || q >= rho.num_qubits()) {
            throw ContractError("channel qubit out of range");
        }
    }
    if (rate == 0) {
        return;
    }
    if (qubits.size() == 2) {
        if (kind != ChannelKind::Depolarizing) {
            throw ContractError("only the depolarizing channel has a two-qubit form");
        }
        if (qubits[0] == qubits[1]) {
            throw ContractError("two-qubit channel needs distinct qubits");
        }
        depolarize_2q(rho, qubits[0], qubits[1], rate);
        return;
    }
    if (qubits.size() != 1) {
        throw ContractError("channels act on one or two qubits");
    }
    int q = qubits[0];
    switch (kind) {
        case ChannelKind::Depolarizing:
            for_each_block_1q(rho, q, [rate](cplx &b00, cplx &b01, cplx &b10, cplx &b11) {
                cplx half = (b00 + b11) * 0.5;
                b00 = (1 - rate) * b00 + rate * half;
                b11 = (1 - rate) * b11 + rate * half;
                b01 *= (1 - rate);
                b10 *= (1 - rate);
            });
            break;
        case ChannelKind::AmplitudeDamping: {
            double s = std::sqrt(1 - rate);
            for_each_block_1q(rho, q, [rate, s](cplx &b00, cplx &b01, cplx &b10, cplx &b11) {
                b00 += rate * b11;
                b11 *= (1 - rate);
                b01 *= s;
                b10 *= s;
            });
            break;
        }
        case ChannelKind::PhaseDamping: {
            double s = std::sqrt(1 - rate);
            for_each_block_1q(rho, q, [s](cplx &, cplx &b01, cplx &b10, cplx &) {
                b01 *= s;
                b10 *= s;
            });
            break;
        }
    }
}

DensityMatrix apply_channel(const DensityMatrix &rho, ChannelKind kind, const std::vector<int> &qubits,
                            double rate) {
    DensityMatrix out = rho;
    apply_channel_inplace(out, kind, qubits, rate);
    return out;
}

void noisy_run_inplace(const Circuit &c, const NoiseModel &model, DensityMatrix &rho) {
    if (c.num_qubits != rho.num_qubits()) {
        throw ContractError("noisy_run: circuit and state widths differ");
    }
    validate(c);
    model.validate();
    for (const auto &g : c.gates) {
        apply_unitary(rho, g);
        for (const auto &op : noise_after(g, model)) {
            std::vector<int> qs(op.qubits.begin(), op.qubits.begin() + op.arity);
            apply_channel_inplace(rho, op.kind, qs, op.rate);
        }
    }
}

DensityMatrix noisy_run(const Circuit &c, const NoiseModel &model, const DensityMatrix &initial) {
    if (c.num_qubits > kMaxDensityQubits) {
        throw ResourceError("noisy_run limited to " + std::to_string(kMaxDensityQubits) + " qubits");
    }
    DensityMatrix rho = initial;
    noisy_run_inplace(c, model, rho);
    return rho;
}

OutcomeCounts sample_from_density(const DensityMatrix &rho, uint64_t shots, uint64_t seed) {
    return sample_from_probabilities(rho.probabilities(), rho.num_qubits(), shots, seed);
}

}  // namespace noqe
