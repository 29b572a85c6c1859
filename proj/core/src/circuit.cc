#include "noqe/circuit.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "noqe/errors.h"
#include "noqe/rng.h"

namespace noqe {

namespace {

struct KindInfo {
    GateKind kind;
    const char *name;
    int arity;
    bool angle;
};

constexpr KindInfo kKinds[] = {
    {GateKind::H, "H", 1, false},         {GateKind::X, "X", 1, false},
    {GateKind::Z, "Z", 1, false},         {GateKind::S, "S", 1, false},
    {GateKind::Sdg, "Sdg", 1, false},     {GateKind::PHASE, "PHASE", 1, true},
    {GateKind::RZ, "RZ", 1, true},        {GateKind::RY, "RY", 1, true},
    {GateKind::CNOT, "CNOT", 2, false},   {GateKind::CZ, "CZ", 2, false},
    {GateKind::CRZ, "CRZ", 2, true},      {GateKind::GIVENS, "GIVENS", 2, true},
    {GateKind::CSWAP, "CSWAP", 3, false}, {GateKind::U1Q, "U1Q", 1, false},
    {GateKind::U2Q, "U2Q", 2, false},
};

const KindInfo &info(GateKind k) {
    return kKinds[static_cast<int>(k)];
}

Gate make(GateKind k, std::initializer_list<int> qs, double theta = 0) {
    Gate g;
    g.kind = k;
    std::copy(qs.begin(), qs.end(), g.qubits.begin());
    g.theta = theta;
    return g;
}

inline uint64_t mask_of(int n, int q) {
    return uint64_t{1} << qubit_bit(n, q);
}

inline cplx maybe_conj(cplx z, bool conj) {
    return conj ? std::conj(z) : z;
}

void apply_diag1(cplx *v, uint64_t d, uint64_t s, uint64_t m, cplx d0, cplx d1) {
    bool touch0 = d0 != cplx(1, 0);
    for (uint64_t i = 0; i < d; i++) {
        if (i & m) {
            v[i * s] *= d1;
        } else if (touch0) {
            v[i * s] *= d0;
        }
    }
}

void apply_mat1(cplx *v, uint64_t d, uint64_t s, uint64_t m, const cplx u[4]) {
    for (uint64_t hi = 0; hi < d; hi += 2 * m) {
        for (uint64_t lo = 0; lo < m; lo++) {
            uint64_t i0 = (hi + lo) * s;
            uint64_t i1 = (hi + lo + m) * s;
            cplx a = v[i0], b = v[i1];
            v[i0] = u[0] * a + u[1] * b;
            v[i1] = u[2] * a + u[3] * b;
        }
    }
}

void apply_mat2(cplx *v, uint64_t d, uint64_t s, uint64_t ma, uint64_t mb, const cplx u[16]) {
    for (uint64_t i = 0; i < d; i++) {
        if (i & (ma | mb)) {
            continue;
        }
        uint64_t idx[4] = {i * s, (i | mb) * s, (i | ma) * s, (i | ma | mb) * s};
        cplx in[4] = {v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
        for (int r = 0; r < 4; r++) {
            v[idx[r]] = u[4 * r] * in[0] + u[4 * r + 1] * in[1] + u[4 * r + 2] * in[2] + u[4 * r + 3] * in[3];
        }
    }
}

}  // namespace

std::string_view gate_name(GateKind kind) {
    return info(kind).name;
}

GateKind gate_kind_from_name(std::string_view name) {
    for (const auto &k : kKinds) {
        if (name == k.name) {
            return k.kind;
        }
    }
    throw ParseError("unknown gate name \"" + std::string(name) + "\"");
}

int gate_arity(GateKind kind) {
    return info(kind).arity;
}

bool gate_has_angle(GateKind kind) {
    return info(kind).angle;
}

bool is_clifford_kind(GateKind kind) {
    switch (kind) {
        case GateKind::H:
        case GateKind::X:
        case GateKind::Z:
        case GateKind::S:
        case GateKind::Sdg:
        case GateKind::CNOT:
        case GateKind::CZ:
            return true;
        default:
            return false;
    }
}

Gate Gate::h(int q) {
    return make(GateKind::H, {q});
}
Gate Gate::x(int q) {
    return make(GateKind::X, {q});
}
Gate Gate::z(int q) {
    return make(GateKind::Z, {q});
}
Gate Gate::s(int q) {
    return make(GateKind::S, {q});
}
Gate Gate::sdg(int q) {
    return make(GateKind::Sdg, {q});
}
Gate Gate::phase(int q, double theta) {
    return make(GateKind::PHASE, {q}, theta);
}
Gate Gate::rz(int q, double theta) {
    return make(GateKind::RZ, {q}, theta);
}
Gate Gate::ry(int q, double theta) {
    return make(GateKind::RY, {q}, theta);
}
Gate Gate::cnot(int control, int target) {
    return make(GateKind::CNOT, {control, target});
}
Gate Gate::cz(int a, int b) {
    return make(GateKind::CZ, {a, b});
}
Gate Gate::crz(int control, int target, double theta) {
    return make(GateKind::CRZ, {control, target}, theta);
}
Gate Gate::givens(int a, int b, double theta) {
    return make(GateKind::GIVENS, {a, b}, theta);
}
Gate Gate::cswap(int control, int a, int b) {
    return make(GateKind::CSWAP, {control, a, b});
}
Gate Gate::u1q(int q, const Eigen::Matrix2cd &u) {
    Gate g = make(GateKind::U1Q, {q});
    g.matrix = std::make_shared<const Eigen::MatrixXcd>(u);
    return g;
}
Gate Gate::u2q(int a, int b, const Eigen::Matrix4cd &u) {
    Gate g = make(GateKind::U2Q, {a, b});
    g.matrix = std::make_shared<const Eigen::MatrixXcd>(u);
    return g;
}

Eigen::MatrixXcd gate_matrix(const Gate &g) {
    const cplx i(0, 1);
    double c = std::cos(g.theta), s = std::sin(g.theta);
    double ch = std::cos(g.theta / 2), sh = std::sin(g.theta / 2);
    Eigen::MatrixXcd m;
    switch (g.kind) {
        case GateKind::H:
            m = Eigen::MatrixXcd(2, 2);
            m << 1, 1, 1, -1;
            m /= std::sqrt(2.0);
            break;
        case GateKind::X:
            m = Eigen::MatrixXcd(2, 2);
            m << 0, 1, 1, 0;
            break;
        case GateKind::Z:
            m = Eigen::MatrixXcd(2, 2);
            m << 1, 0, 0, -1;
            break;
        case GateKind::S:
            m = Eigen::MatrixXcd(2, 2);
            m << 1, 0, 0, i;
            break;
        case GateKind::Sdg:
            m = Eigen::MatrixXcd(2, 2);
            m << 1, 0, 0, -i;
            break;
        case GateKind::PHASE:
            m = Eigen::MatrixXcd(2, 2);
            m << 1, 0, 0, std::polar(1.0, g.theta);
            break;
        case GateKind::RZ:
            m = Eigen::MatrixXcd(2, 2);
            m << std::polar(1.0, -g.theta / 2), 0, 0, std::polar(1.0, g.theta / 2);
            break;
        case GateKind::RY:
            m = Eigen::MatrixXcd(2, 2);
            m << ch, -sh, sh, ch;
            break;
        case GateKind::CNOT:
            m = Eigen::MatrixXcd::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
            break;
        case GateKind::CZ:
            m = Eigen::MatrixXcd::Identity(4, 4);
            m(3, 3) = -1;
            break;
        case GateKind::CRZ:
            m = Eigen::MatrixXcd::Identity(4, 4);
            m(2, 2) = std::polar(1.0, -g.theta / 2);
            m(3, 3) = std::polar(1.0, g.theta / 2);
            break;
        case GateKind::GIVENS:
            m = Eigen::MatrixXcd::Identity(4, 4);
            m(1, 1) = c;
            m(1, 2) = -s;
            m(2, 1) = s;
            m(2, 2) = c;
            break;
        case GateKind::CSWAP:
            m = Eigen::MatrixXcd::Identity(8, 8);
            m(5, 5) = m(6, 6) = 0;
            m(5, 6) = m(6, 5) = 1;
            break;
        case GateKind::U1Q:
        case GateKind::U2Q:
            if (!g.matrix) {
                throw ContractError("matrix gate without a matrix");
            }
            m = *g.matrix;
            break;
    }
    return m;
}

Gate inverse(const Gate &g) {
    Gate out = g;
    switch (g.kind) {
        case GateKind::S:
            out.kind = GateKind::Sdg;
            break;
        case GateKind::Sdg:
            out.kind = GateKind::S;
            break;
        case GateKind::PHASE:
        case GateKind::RZ:
        case GateKind::RY:
        case GateKind::CRZ:
        case GateKind::GIVENS:
            out.theta = -g.theta;
            break;
        case GateKind::U1Q:
        case GateKind::U2Q:
            out.matrix = std::make_shared<const Eigen::MatrixXcd>(g.matrix->adjoint());
            break;
        default:
            break;
    }
    return out;
}

Circuit &Circuit::append(const Circuit &other) {
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
    return *this;
}

void validate(const Circuit &c) {
    if (c.num_qubits < 1) {
        throw ContractError("circuit needs at least one qubit");
    }
    for (size_t k = 0; k < c.gates.size(); k++) {
        const auto &g = c.gates[k];
        int a = g.arity();
        for (int j = 0; j < a; j++) {
            int q = g.qubits[static_cast<size_t>(j)];
            if (q < 0 || q >= c.num_qubits) {
                throw ContractError("gate " + std::to_string(k) + " (" + std::string(gate_name(g.kind)) +
                                    ") addresses qubit " + std::to_string(q) + " outside [0, " +
                                    std::to_string(c.num_qubits) + ")");
            }
            for (int j2 = 0; j2 < j; j2++) {
                if (g.qubits[static_cast<size_t>(j2)] == q) {
                    throw ContractError("gate " + std::to_string(k) + " repeats qubit " + std::to_string(q));
                }
            }
        }
        if ((g.kind == GateKind::U1Q || g.kind == GateKind::U2Q)) {
            int dim = g.kind == GateKind::U1Q ? 2 : 4;
            if (!g.matrix || g.matrix->rows() != dim || g.matrix->cols() != dim) {
                throw ContractError("gate " + std::to_string(k) + " has a matrix of the wrong shape");
            }
        }
    }
}

Circuit inverse(const Circuit &c) {
    Circuit out(c.num_qubits, c.label);
    out.gates.reserve(c.gates.size());
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
        out.gates.push_back(inverse(*it));
    }
    return out;
}

Circuit embed(const Circuit &c, int num_qubits, int offset) {
    Circuit out(num_qubits, c.label);
    for (Gate g : c.gates) {
        for (int j = 0; j < g.arity(); j++) {
            g.qubits[static_cast<size_t>(j)] += offset;
        }
        out.gates.push_back(g);
    }
    validate(out);
    return out;
}

void apply_gate_strided(cplx *v, int n, uint64_t s, const Gate &g, bool conj) {
    uint64_t d = uint64_t{1} << n;
    uint64_t m0 = mask_of(n, g.qubits[0]);
    const cplx i(0, 1);
    switch (g.kind) {
        case GateKind::X:
            for (uint64_t k = 0; k < d; k++) {
                if (!(k & m0)) {
                    std::swap(v[k * s], v[(k | m0) * s]);
                }
            }
            return;
        case GateKind::Z:
            apply_diag1(v, d, s, m0, 1, -1);
            return;
        case GateKind::S:
            apply_diag1(v, d, s, m0, 1, maybe_conj(i, conj));
            return;
        case GateKind::Sdg:
            apply_diag1(v, d, s, m0, 1, maybe_conj(-i, conj));
            return;
        case GateKind::PHASE:
            apply_diag1(v, d, s, m0, 1, maybe_conj(std::polar(1.0, g.theta), conj));
            return;
        case GateKind::RZ:
            apply_diag1(v, d, s, m0, maybe_conj(std::polar(1.0, -g.theta / 2), conj),
                        maybe_conj(std::polar(1.0, g.theta / 2), conj));
            return;
        case GateKind::H: {
            double r = 1 / std::sqrt(2.0);
            cplx u[4] = {r, r, r, -r};
            apply_mat1(v, d, s, m0, u);
            return;
        }
        case GateKind::RY: {
            double ch = std::cos(g.theta / 2), sh = std::sin(g.theta / 2);
            cplx u[4] = {ch, -sh, sh, ch};
            apply_mat1(v, d, s, m0, u);
            return;
        }
        case GateKind::U1Q: {
            const auto &m = *g.matrix;
            cplx u[4] = {maybe_conj(m(0, 0), conj), maybe_conj(m(0, 1), conj), maybe_conj(m(1, 0), conj),
                         maybe_conj(m(1, 1), conj)};
            apply_mat1(v, d, s, m0, u);
            return;
        }
        default:
            break;
    }
    uint64_t m1 = mask_of(n, g.qubits[1]);
    switch (g.kind) {
        case GateKind::CNOT:
            for (uint64_t k = 0; k < d; k++) {
                if ((k & m0) && !(k & m1)) {
                    std::swap(v[k * s], v[(k | m1) * s]);
                }
            }
            return;
        case GateKind::CZ:
            for (uint64_t k = 0; k < d; k++) {
                if ((k & m0) && (k & m1)) {
                    v[k * s] = -v[k * s];
                }
            }
            return;
        case GateKind::CRZ: {
            cplx lo = maybe_conj(std::polar(1.0, -g.theta / 2), conj);
            cplx hi = maybe_conj(std::polar(1.0, g.theta / 2), conj);
            for (uint64_t k = 0; k < d; k++) {
                if (k & m0) {
                    v[k * s] *= (k & m1) ? hi : lo;
                }
            }
            return;
        }
        case GateKind::GIVENS: {
            double c = std::cos(g.theta), sn = std::sin(g.theta);
            for (uint64_t k = 0; k < d; k++) {
                if (k & (m0 | m1)) {
                    continue;
                }
                uint64_t i01 = (k | m1) * s, i10 = (k | m0) * s;
                cplx a = v[i01], b = v[i10];
                v[i01] = c * a - sn * b;
                v[i10] = sn * a + c * b;
            }
            return;
        }
        case GateKind::U2Q: {
            const auto &m = *g.matrix;
            cplx u[16];
            for (int r = 0; r < 4; r++) {
                for (int c = 0; c < 4; c++) {
                    u[4 * r + c] = maybe_conj(m(r, c), conj);
                }
            }
            apply_mat2(v, d, s, m0, m1, u);
            return;
        }
        case GateKind::CSWAP: {
            uint64_t m2 = mask_of(n, g.qubits[2]);
            for (uint64_t k = 0; k < d; k++) {
                if ((k & m0) && (k & m1) && !(k & m2)) {
                    std::swap(v[k * s], v[((k ^ m1) | m2) * s]);
                }
            }
            return;
        }
        default:
            throw ContractError("unhandled gate kind");
    }
}

void apply_gate(Eigen::VectorXcd &amps, int n, const Gate &g) {
    apply_gate_strided(amps.data(), n, 1, g, false);
}

void run_circuit_inplace(const Circuit &c, Eigen::VectorXcd &amps) {
    if (static_cast<uint64_t>(amps.size()) != (uint64_t{1} << c.num_qubits)) {
        throw ContractError("run_circuit: state size does not match circuit width");
    }
    for (const auto &g : c.gates) {
        apply_gate(amps, c.num_qubits, g);
    }
}

Statevector run_circuit(const Circuit &c, const Statevector &initial) {
    if (c.num_qubits != initial.num_qubits()) {
        throw ContractError("run_circuit: circuit has " + std::to_string(c.num_qubits) + " qubits, state has " +
                            std::to_string(initial.num_qubits()));
    }
    validate(c);
    Statevector out = initial;
    run_circuit_inplace(c, out.amplitudes());
    return out;
}

Eigen::MatrixXcd circuit_unitary(const Circuit &c) {
    validate(c);
    if (c.num_qubits > kMaxDenseQubits) {
        throw ResourceError("circuit_unitary: too many qubits");
    }
    auto d = static_cast<Eigen::Index>(uint64_t{1} << c.num_qubits);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
    for (Eigen::Index col = 0; col < d; col++) {
        for (const auto &g : c.gates) {
            apply_gate_strided(u.col(col).data(), c.num_qubits, 1, g, false);
        }
    }
    return u;
}

OutcomeCounts sample_from_probabilities(const Eigen::VectorXd &probs, int num_qubits, uint64_t shots,
                                        uint64_t seed) {
    if (shots < 1) {
        throw ContractError("shots must be at least 1");
    }
    std::vector<double> cdf(static_cast<size_t>(probs.size()));
    double acc = 0;
    for (Eigen::Index k = 0; k < probs.size(); k++) {
        acc += std::max(probs[k], 0.0);
        cdf[static_cast<size_t>(k)] = acc;
    }
    if (!(acc > 0)) {
        throw ContractError("probability vector has no mass");
    }
    SplitMix64 rng(splitmix64_mix(seed ^ 0x5EED5A3B1E5ULL));
    std::vector<uint64_t> counts(cdf.size(), 0);
    for (uint64_t k = 0; k < shots; k++) {
        double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        size_t idx = std::min(static_cast<size_t>(it - cdf.begin()), cdf.size() - 1);
        counts[idx]++;
    }
    OutcomeCounts out;
    for (size_t k = 0; k < counts.size(); k++) {
        if (counts[k]) {
            out[index_to_bitstring(k, num_qubits)] = counts[k];
        }
    }
    return out;
}

OutcomeCounts sample_bitstrings(const Statevector &state, uint64_t shots, uint64_t seed) {
    Eigen::VectorXd p = state.amplitudes().cwiseAbs2();
    return sample_from_probabilities(p, state.num_qubits(), shots, seed);
}

static nlohmann::json gate_to_json(const Gate &g) {
    nlohmann::json j;
    j["name"] = gate_name(g.kind);
    j["qubits"] = std::vector<int>(g.qubits.begin(), g.qubits.begin() + g.arity());
    std::vector<double> params;
    if (gate_has_angle(g.kind)) {
        params.push_back(g.theta);
    } else if (g.matrix) {
        const auto &m = *g.matrix;
        for (Eigen::Index r = 0; r < m.rows(); r++) {
            for (Eigen::Index c = 0; c < m.cols(); c++) {
                params.push_back(m(r, c).real());
                params.push_back(m(r, c).imag());
            }
        }
    }
    j["params"] = params;
    return j;
}

std::string circuit_to_json(const Circuit &c) {
    nlohmann::json doc;
    doc["num_qubits"] = c.num_qubits;
    if (!c.label.empty()) {
        doc["label"] = c.label;
    }
    doc["gates"] = nlohmann::json::array();
    for (const auto &g : c.gates) {
        doc["gates"].push_back(gate_to_json(g));
    }
    return doc.dump();
}

std::string circuit_hash(const Circuit &c) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : circuit_to_json(c)) {
        h = (h ^ ch) * 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Circuit parse_circuit(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("circuit: malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("num_qubits") || !doc["num_qubits"].is_number_integer()) {
        throw ParseError("circuit: missing integer field \"num_qubits\"");
    }
    if (!doc.contains("gates") || !doc["gates"].is_array()) {
        throw ParseError("circuit: missing array field \"gates\"");
    }
    Circuit c(doc["num_qubits"].get<int>(), doc.value("label", std::string()));
    size_t k = 0;
    for (const auto &gj : doc["gates"]) {
        std::string where = "circuit: gate " + std::to_string(k);
        if (!gj.is_object() || !gj.contains("name") || !gj["name"].is_string()) {
            throw ParseError(where + ": missing string field \"name\"");
        }
        GateKind kind;
        try {
            kind = gate_kind_from_name(gj["name"].get<std::string>());
        } catch (const ParseError &e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!gj.contains("qubits") || !gj["qubits"].is_array()) {
            throw ParseError(where + ": missing array field \"qubits\"");
        }
        std::vector<int> qs;
        std::vector<double> params;
        try {
            qs = gj["qubits"].get<std::vector<int>>();
            params = gj.value("params", std::vector<double>());
        } catch (const nlohmann::json::exception &e) {
            throw ParseError(where + ": " + e.what());
        }
        if (static_cast<int>(qs.size()) != gate_arity(kind)) {
            throw ParseError(where + ": expected " + std::to_string(gate_arity(kind)) + " qubits");
        }
        Gate g;
        g.kind = kind;
        std::copy(qs.begin(), qs.end(), g.qubits.begin());
        if (gate_has_angle(kind)) {
            if (params.size() != 1 || !std::isfinite(params[0])) {
                throw ParseError(where + ": expected one finite angle parameter");
            }
            g.theta = params[0];
        } else if (kind == GateKind::U1Q || kind == GateKind::U2Q) {
            int dim = kind == GateKind::U1Q ? 2 : 4;
            if (params.size() != static_cast<size_t>(2 * dim * dim)) {
                throw ParseError(where + ": expected " + std::to_string(2 * dim * dim) + " matrix parameters");
            }
            Eigen::MatrixXcd m(dim, dim);
            for (int r = 0; r < dim; r++) {
                for (int col = 0; col < dim; col++) {
                    size_t p = static_cast<size_t>(2 * (r * dim + col));
                    m(r, col) = cplx(params[p], params[p + 1]);
                }
            }
            if (!(m.adjoint() * m).isIdentity(1e-9)) {
                throw ParseError(where + ": matrix is not unitary");
            }
            g.matrix = std::make_shared<const Eigen::MatrixXcd>(m);
        } else if (!params.empty()) {
            throw ParseError(where + ": gate takes no parameters");
        }
        c.gates.push_back(g);
        k++;
    }
    try {
        validate(c);
    } catch (const ContractError &e) {
        throw ParseError(std::string("circuit: ") + e.what());
    }
    return c;
}

Circuit load_circuit(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("circuit: cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_circuit(ss.str());
}

}  // namespace noqe
