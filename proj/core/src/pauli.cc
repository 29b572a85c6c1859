#include "noqe/pauli.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "noqe/errors.h"

namespace noqe {

namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

}  // namespace

PauliWord::PauliWord(std::vector<PauliLetter> letters) : letters_(std::move(letters)) {
    int n = num_qubits();
    for (int q = 0; q < n; q++) {
        auto l = letters_[static_cast<size_t>(q)];
        uint64_t bit = n <= 63 ? uint64_t{1} << qubit_bit(n, q) : 0;
        if (l == PauliLetter::X || l == PauliLetter::Y) {
            x_mask_ |= bit;
        }
        if (l == PauliLetter::Z || l == PauliLetter::Y) {
            z_mask_ |= bit;
        }
        num_y_ += l == PauliLetter::Y;
    }
}

PauliWord PauliWord::parse(std::string_view text) {
    std::vector<PauliLetter> letters;
    letters.reserve(text.size());
    for (size_t k = 0; k < text.size(); k++) {
        switch (text[k]) {
            case 'I':
                letters.push_back(PauliLetter::I);
                break;
            case 'X':
                letters.push_back(PauliLetter::X);
                break;
            case 'Y':
                letters.push_back(PauliLetter::Y);
                break;
            case 'Z':
                letters.push_back(PauliLetter::Z);
                break;
            default:
                throw ParseError("invalid Pauli letter '" + std::string(1, text[k]) + "' at position " +
                                 std::to_string(k) + " of \"" + std::string(text) + "\"");
        }
    }
    if (letters.empty()) {
        throw ParseError("empty Pauli word");
    }
    return PauliWord(std::move(letters));
}

PauliWord PauliWord::identity(int num_qubits) {
    return PauliWord(std::vector<PauliLetter>(static_cast<size_t>(num_qubits), PauliLetter::I));
}

std::string PauliWord::str() const {
    static constexpr char kChars[4] = {'I', 'X', 'Y', 'Z'};
    std::string out;
    for (auto l : letters_) {
        out.push_back(kChars[static_cast<int>(l)]);
    }
    return out;
}

bool PauliWord::is_identity() const {
    for (auto l : letters_) {
        if (l != PauliLetter::I) {
            return false;
        }
    }
    return true;
}

std::vector<int> PauliWord::support() const {
    std::vector<int> out;
    for (int q = 0; q < num_qubits(); q++) {
        if (letters_[static_cast<size_t>(q)] != PauliLetter::I) {
            out.push_back(q);
        }
    }
    return out;
}

cplx pauli_phase(const PauliWord &word, uint64_t b) {
    cplx p = kIPow[word.num_y() & 3];
    return (std::popcount(b & word.z_mask()) & 1) ? -p : p;
}

PauliSum::PauliSum(int num_qubits, std::vector<PauliTerm> terms, std::string unit_label)
    : num_qubits_(num_qubits), unit_label_(std::move(unit_label)) {
    if (num_qubits < 1) {
        throw ContractError("PauliSum needs at least one qubit");
    }
    std::map<PauliWord, size_t> seen;
    for (auto &t : terms) {
        if (t.word.num_qubits() != num_qubits) {
            throw ContractError("Pauli word " + t.word.str() + " has length " +
                                std::to_string(t.word.num_qubits()) + ", expected " +
                                std::to_string(num_qubits));
        }
        auto it = seen.find(t.word);
        if (it == seen.end()) {
            seen.emplace(t.word, terms_.size());
            terms_.push_back(std::move(t));
        } else {
            terms_[it->second].coefficient += t.coefficient;
        }
    }
    for (const auto &t : terms_) {
        if (std::abs(t.coefficient.imag()) >= 1e-12) {
            hermitian_ = false;
        }
    }
}

PauliSum PauliSum::single(const PauliWord &word, cplx coefficient) {
    return PauliSum(word.num_qubits(), {PauliTerm{word, coefficient}});
}

FrobeniusBound PauliSum::frobenius_bound() const {
    FrobeniusBound fb;
    fb.D = uint64_t{1} << num_qubits_;
    double s = 0;
    for (const auto &t : terms_) {
        s += std::norm(t.coefficient);
    }
    fb.B = static_cast<double>(fb.D) * s;
    return fb;
}

static void check_dense(int n) {
    if (n > kMaxDenseQubits) {
        throw ResourceError("dense materialization limited to " + std::to_string(kMaxDenseQubits) +
                            " qubits");
    }
}

Eigen::MatrixXcd materialize(const PauliWord &word) {
    int n = word.num_qubits();
    check_dense(n);
    // Kronecker product of 2x2 factors in qubit order.
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int q = 0; q < n; q++) {
        Eigen::Matrix2cd f;
        switch (word[q]) {
            case PauliLetter::I:
                f << 1, 0, 0, 1;
                break;
            case PauliLetter::X:
                f << 0, 1, 1, 0;
                break;
            case PauliLetter::Y:
                f << 0, cplx(0, -1), cplx(0, 1), 0;
                break;
            case PauliLetter::Z:
                f << 1, 0, 0, -1;
                break;
        }
        Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index r = 0; r < out.rows(); r++) {
            for (Eigen::Index c = 0; c < out.cols(); c++) {
                next.block<2, 2>(2 * r, 2 * c) = out(r, c) * f;
            }
        }
        out = std::move(next);
    }
    return out;
}

Eigen::MatrixXcd materialize(const PauliSum &sum) {
    int n = sum.num_qubits();
    check_dense(n);
    auto d = static_cast<Eigen::Index>(uint64_t{1} << n);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (const auto &t : sum.terms()) {
        uint64_t x = t.word.x_mask();
        for (uint64_t b = 0; b < static_cast<uint64_t>(d); b++) {
            out(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) += t.coefficient * pauli_phase(t.word, b);
        }
    }
    return out;
}

Eigen::VectorXcd apply_pauli(const PauliWord &word, const Eigen::VectorXcd &psi) {
    uint64_t d = uint64_t{1} << word.num_qubits();
    if (static_cast<uint64_t>(psi.size()) != d) {
        throw ContractError("apply_pauli: vector length mismatch");
    }
    Eigen::VectorXcd out(psi.size());
    uint64_t x = word.x_mask();
    for (uint64_t b = 0; b < d; b++) {
        out[static_cast<Eigen::Index>(b ^ x)] = pauli_phase(word, b) * psi[static_cast<Eigen::Index>(b)];
    }
    return out;
}

cplx expectation(const PauliWord &word, const Statevector &state) {
    if (word.num_qubits() != state.num_qubits()) {
        throw ContractError("expectation: qubit count mismatch");
    }
    const auto &a = state.amplitudes();
    return a.dot(apply_pauli(word, a));
}

cplx matrix_element(const PauliSum &obs, const Statevector &a, const Statevector &b) {
    if (obs.num_qubits() != a.num_qubits() || obs.num_qubits() != b.num_qubits()) {
        throw ContractError("matrix_element: qubit count mismatch");
    }
    cplx total = 0;
    for (const auto &t : obs.terms()) {
        total += t.coefficient * a.amplitudes().dot(apply_pauli(t.word, b.amplitudes()));
    }
    return total;
}

cplx expectation(const PauliSum &obs, const Statevector &state) {
    return matrix_element(obs, state, state);
}

cplx trace_with(const PauliWord &word, const Eigen::MatrixXcd &m) {
    uint64_t d = uint64_t{1} << word.num_qubits();
    if (static_cast<uint64_t>(m.rows()) != d || static_cast<uint64_t>(m.cols()) != d) {
        throw ContractError("trace_with: matrix dimension mismatch");
    }
    // Tr(P M) = sum_c phase(c) M[c, c ^ x].
    uint64_t x = word.x_mask();
    cplx total = 0;
    for (uint64_t c = 0; c < d; c++) {
        total += pauli_phase(word, c) * m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ x));
    }
    return total;
}

cplx trace_with(const PauliSum &obs, const Eigen::MatrixXcd &m) {
    cplx total = 0;
    for (const auto &t : obs.terms()) {
        total += t.coefficient * trace_with(t.word, m);
    }
    return total;
}

PauliSum parse_hamiltonian(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("hamiltonian: malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("num_qubits") || !doc["num_qubits"].is_number_integer()) {
        throw ParseError("hamiltonian: missing integer field \"num_qubits\"");
    }
    int n = doc["num_qubits"].get<int>();
    if (n < 1 || n > 63) {
        throw ParseError("hamiltonian: num_qubits out of range");
    }
    if (!doc.contains("terms") || !doc["terms"].is_array()) {
        throw ParseError("hamiltonian: missing array field \"terms\"");
    }
    std::string unit = doc.value("unit", std::string());
    std::vector<PauliTerm> terms;
    size_t k = 0;
    for (const auto &entry : doc["terms"]) {
        std::string where = "hamiltonian: term " + std::to_string(k);
        if (!entry.is_object() || !entry.contains("pauli") || !entry["pauli"].is_string()) {
            throw ParseError(where + ": missing string field \"pauli\"");
        }
        auto letters = entry["pauli"].get<std::string>();
        PauliWord w;
        try {
            w = PauliWord::parse(letters);
        } catch (const ParseError &e) {
            throw ParseError(where + ": " + e.what());
        }
        if (w.num_qubits() != n) {
            throw ParseError(where + ": word \"" + letters + "\" has length " + std::to_string(w.num_qubits()) +
                             " but num_qubits is " + std::to_string(n));
        }
        auto num = [&](const char *key) -> double {
            if (!entry.contains(key)) {
                return 0.0;
            }
            if (!entry[key].is_number()) {
                throw ParseError(where + ": field \"" + key + "\" is not a number");
            }
            double v = entry[key].get<double>();
            if (!std::isfinite(v)) {
                throw ParseError(where + ": non-finite coefficient");
            }
            return v;
        };
        if (!entry.contains("re")) {
            throw ParseError(where + ": missing field \"re\"");
        }
        terms.push_back({std::move(w), cplx(num("re"), num("im"))});
        k++;
    }
    if (terms.empty()) {
        throw ParseError("hamiltonian: no terms");
    }
    return PauliSum(n, std::move(terms), unit);
}

PauliSum load_hamiltonian(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("hamiltonian: cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_hamiltonian(ss.str());
}

std::string hamiltonian_to_json(const PauliSum &sum) {
    nlohmann::json doc;
    doc["num_qubits"] = sum.num_qubits();
    doc["unit"] = sum.unit_label();
    doc["terms"] = nlohmann::json::array();
    for (const auto &t : sum.terms()) {
        doc["terms"].push_back({{"pauli", t.word.str()}, {"re", t.coefficient.real()}, {"im", t.coefficient.imag()}});
    }
    return doc.dump(2);
}

}  // namespace noqe
