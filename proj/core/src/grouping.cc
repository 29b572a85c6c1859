#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "noqe/errors.h"
#include "noqe/hadamard.h"

namespace noqe {

namespace {

std::vector<uint64_t> support_of(const Statevector &psi, double tol) {
    std::vector<uint64_t> out;
    for (uint64_t b = 0; b < psi.dim(); b++) {
        if (std::abs(psi.amplitudes()[static_cast<Eigen::Index>(b)]) > tol) {
            out.push_back(b);
        }
    }
    return out;
}

// Phases are powers of i, so they round to exact small integers.
std::pair<int, int> round_phase(cplx z) {
    return {static_cast<int>(std::lround(z.real())), static_cast<int>(std::lround(z.imag()))};
}

struct Coupling {
    std::vector<uint64_t> kets;  // b with <b^x|psi_i> and <b|psi_j> both nonzero
    std::vector<cplx> phases;    // <b^x|P|b>
};

Coupling coupling_of(const PauliWord &w, const std::vector<uint64_t> &supp_j,
                     const std::unordered_set<uint64_t> &supp_i) {
    Coupling c;
    for (uint64_t b : supp_j) {
        if (supp_i.count(b ^ w.x_mask())) {
            c.kets.push_back(b);
            c.phases.push_back(pauli_phase(w, b));
        }
    }
    return c;
}

}  // namespace

MeasurementPlan plan_measurements(const PauliSum &h, const Statevector &psi_i, const Statevector &psi_j,
                                  bool diagonal, bool grouping, double support_tol) {
    if (psi_i.num_qubits() != h.num_qubits() || psi_j.num_qubits() != h.num_qubits()) {
        throw ContractError("plan_measurements: state and Hamiltonian widths differ");
    }
    MeasurementPlan plan;
    plan.diagonal = diagonal;
    const auto &terms = h.terms();

    if (!grouping) {
        for (size_t k = 0; k < terms.size(); k++) {
            if (diagonal && terms[k].word.is_identity()) {
                plan.constant += terms[k].coefficient;
                plan.known_terms.push_back(k);
                continue;
            }
            plan.classes.push_back({terms[k].word, {k}, {cplx(1, 0)}, terms[k].coefficient});
        }
        return plan;
    }

    auto supp_j = support_of(psi_j, support_tol);
    auto supp_i_list = support_of(psi_i, support_tol);
    std::unordered_set<uint64_t> supp_i(supp_i_list.begin(), supp_i_list.end());

    // Class key: x mask, coupled kets, and phases normalized by the first one.
    using Key = std::pair<uint64_t, std::vector<std::pair<uint64_t, std::pair<int, int>>>>;
    std::map<Key, size_t> index;
    for (size_t k = 0; k < terms.size(); k++) {
        const auto &w = terms[k].word;
        auto c = coupling_of(w, supp_j, supp_i);
        if (c.kets.empty()) {
            plan.zero_terms.push_back(k);
            continue;
        }
        cplx lead = c.phases[0];
        if (diagonal && w.x_mask() == 0 &&
            std::all_of(c.phases.begin(), c.phases.end(), [&](cplx p) { return std::abs(p - lead) < 1e-12; })) {
            // Acts as lead * identity on the support.
            plan.constant += terms[k].coefficient * lead;
            plan.known_terms.push_back(k);
            continue;
        }
        Key key{w.x_mask(), {}};
        for (size_t e = 0; e < c.kets.size(); e++) {
            key.second.push_back({c.kets[e], round_phase(c.phases[e] / lead)});
        }
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(std::move(key), plan.classes.size());
            plan.classes.push_back({w, {k}, {cplx(1, 0)}, terms[k].coefficient});
            continue;
        }
        auto &cls = plan.classes[it->second];
        cplx rep_lead = coupling_of(cls.representative, supp_j, supp_i).phases[0];
        cplx factor = lead / rep_lead;
        cls.members.push_back(k);
        cls.factors.push_back(factor);
        cls.weight += terms[k].coefficient * factor;
    }
    return plan;
}

}  // namespace noqe
