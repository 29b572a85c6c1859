#include "noqe/hadamard.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "noqe/errors.h"
#include "noqe/rng.h"
#include "noqe/zne.h"

namespace noqe {

namespace {

constexpr uint64_t kShotStream = 0x4AD0;

// Pauli word on the full register: `basis` on qubits [0, N) plus Z on the ancilla.
PauliWord lift(const PauliWord &basis, int total, int ancilla) {
    std::vector<PauliLetter> letters(static_cast<size_t>(total), PauliLetter::I);
    for (int q = 0; q < basis.num_qubits(); q++) {
        letters[static_cast<size_t>(q)] = basis[q];
    }
    if (ancilla >= 0) {
        letters[static_cast<size_t>(ancilla)] = PauliLetter::Z;
    }
    return PauliWord(std::move(letters));
}

Circuit rotation_circuit(const PauliWord &w) {
    Circuit c(w.num_qubits());
    for (int q = 0; q < w.num_qubits(); q++) {
        if (w[q] == PauliLetter::X) {
            c.append(Gate::h(q));
        } else if (w[q] == PauliLetter::Y) {
            c.append(Gate::sdg(q));
            c.append(Gate::h(q));
        }
    }
    return c;
}

double parity_expectation(const Eigen::VectorXd &probs, int n, const PauliWord &w) {
    uint64_t mask = 0;
    for (int q = 0; q < w.num_qubits(); q++) {
        if (w[q] != PauliLetter::I) {
            mask |= uint64_t{1} << qubit_bit(n, q);
        }
    }
    double e = 0;
    for (Eigen::Index b = 0; b < probs.size(); b++) {
        e += (std::popcount(static_cast<uint64_t>(b) & mask) & 1) ? -probs[b] : probs[b];
    }
    return e;
}

void add_classes(HadamardExperiment &exp, int prep_re, int prep_im, int ancilla) {
    for (const auto &cls : exp.plan.classes) {
        exp.class_re.push_back(static_cast<int>(exp.jobs.size()));
        exp.jobs.push_back({prep_re, cls.representative, ancilla, cls.representative.str() + ":re"});
        if (prep_im >= 0) {
            exp.class_im.push_back(static_cast<int>(exp.jobs.size()));
            exp.jobs.push_back({prep_im, cls.representative, ancilla, cls.representative.str() + ":im"});
        } else {
            exp.class_im.push_back(-1);
        }
    }
}

}  // namespace

HadamardExperiment build_hadamard_experiment(const ReferenceSpec &spec_i, const ReferenceSpec &spec_j,
                                             const PauliSum &h, const HadamardOptions &options) {
    if (h.num_qubits() != spec_i.num_qubits || h.num_qubits() != spec_j.num_qubits) {
        throw ContractError("Hadamard experiment: Hamiltonian width differs from the references");
    }
    HadamardExperiment exp;
    exp.label = spec_i.label + "," + spec_j.label;
    auto psi_i = run_circuit(build_reference_circuit(spec_i), Statevector(spec_i.num_qubits));
    auto psi_j = run_circuit(build_reference_circuit(spec_j), Statevector(spec_j.num_qubits));
    exp.plan = plan_measurements(h, psi_i, psi_j, false, options.grouping);

    HadamardLayout lay{spec_i.num_qubits};
    exp.preps.push_back(build_hadamard_circuit(spec_i, spec_j, 0.0, options.simplified_first_stage));
    int prep_im = -1;
    if (options.measure_imaginary) {
        exp.preps.push_back(
            build_hadamard_circuit(spec_i, spec_j, std::numbers::pi / 2, options.simplified_first_stage));
        prep_im = 1;
    }
    auto id = PauliWord::identity(lay.num_qubits);
    exp.s_re = 0;
    exp.jobs.push_back({0, id, lay.ancilla(), "S:re"});
    if (prep_im >= 0) {
        exp.s_im = 1;
        exp.jobs.push_back({prep_im, id, lay.ancilla(), "S:im"});
    }
    add_classes(exp, 0, prep_im, lay.ancilla());
    return exp;
}

HadamardExperiment build_diagonal_experiment(const ReferenceSpec &spec, const PauliSum &h,
                                             const HadamardOptions &options) {
    if (h.num_qubits() != spec.num_qubits) {
        throw ContractError("diagonal experiment: Hamiltonian width differs from the reference");
    }
    HadamardExperiment exp;
    exp.label = spec.label + "," + spec.label;
    exp.diagonal = true;
    exp.preps.push_back(build_reference_circuit(spec));
    auto psi = run_circuit(exp.preps[0], Statevector(spec.num_qubits));
    exp.plan = plan_measurements(h, psi, psi, true, options.grouping);
    add_classes(exp, 0, -1, -1);
    return exp;
}

std::vector<double> evaluate_jobs(const HadamardExperiment &exp, const std::optional<NoiseModel> &noise,
                                  double fold_scale) {
    std::vector<double> out(exp.jobs.size(), 0.0);
    for (size_t p = 0; p < exp.preps.size(); p++) {
        Circuit prep = fold_scale > 1.0 ? fold_circuit(exp.preps[p], fold_scale) : exp.preps[p];
        int total = prep.num_qubits;
        if (!noise || noise->is_noiseless()) {
            auto psi = run_circuit(prep, Statevector(total));
            for (size_t k = 0; k < exp.jobs.size(); k++) {
                const auto &job = exp.jobs[k];
                if (job.prep == static_cast<int>(p)) {
                    out[k] = expectation(lift(job.basis, total, job.ancilla), psi).real();
                }
            }
            continue;
        }
        if (total > kMaxDensityQubits) {
            throw ResourceError("noisy Hadamard evaluation needs " + std::to_string(total) +
                                " qubits, above the density-matrix limit");
        }
        auto rho = noisy_run(prep, *noise, DensityMatrix(total));
        for (size_t k = 0; k < exp.jobs.size(); k++) {
            const auto &job = exp.jobs[k];
            if (job.prep != static_cast<int>(p)) {
                continue;
            }
            auto word = lift(job.basis, total, job.ancilla);
            auto rot = rotation_circuit(word);
            if (rot.gates.empty()) {
                out[k] = parity_expectation(rho.probabilities(), total, word);
            } else {
                out[k] = parity_expectation(noisy_run(rot, *noise, rho).probabilities(), total, word);
            }
        }
    }
    return out;
}

std::vector<SampledValue> sample_jobs(const std::vector<double> &exact, uint64_t shots, uint64_t seed) {
    if (shots == 0) {
        throw ContractError("sample_jobs: shots must be at least 1");
    }
    std::vector<SampledValue> out(exact.size());
    for (size_t k = 0; k < exact.size(); k++) {
        double p = std::clamp(0.5 * (1 + exact[k]), 0.0, 1.0);
        SplitMix64 rng(derive_seed(seed, kShotStream, k));
        uint64_t plus = 0;
        for (uint64_t s = 0; s < shots; s++) {
            plus += uniform01(rng) < p;
        }
        double mean = 2.0 * static_cast<double>(plus) / static_cast<double>(shots) - 1.0;
        out[k] = {mean, std::sqrt(std::max(0.0, 1 - mean * mean) / static_cast<double>(shots))};
    }
    return out;
}

std::vector<SampledValue> exact_values(const std::vector<double> &exact) {
    std::vector<SampledValue> out;
    out.reserve(exact.size());
    for (double e : exact) {
        out.push_back({e, 0.0});
    }
    return out;
}

ElementValues combine_jobs(const HadamardExperiment &exp, const std::vector<SampledValue> &v) {
    if (v.size() != exp.jobs.size()) {
        throw ContractError("combine_jobs: expected " + std::to_string(exp.jobs.size()) + " values, got " +
                            std::to_string(v.size()));
    }
    // At theta = pi/2 the circuit measures Re(i x) = -Im x.
    auto element = [&](int re, int im) {
        double r = v[static_cast<size_t>(re)].mean, rs = v[static_cast<size_t>(re)].se;
        double i = 0, is = 0;
        if (im >= 0) {
            i = -v[static_cast<size_t>(im)].mean;
            is = v[static_cast<size_t>(im)].se;
        }
        return std::pair{cplx(r, i), std::pair{rs, is}};
    };
    ElementValues out;
    if (!exp.diagonal) {
        auto [s, se] = element(exp.s_re, exp.s_im);
        out.s = s;
        out.s_se = cplx(se.first, se.second);
    }
    cplx h = exp.plan.constant;
    double var_re = 0, var_im = 0;
    for (size_t k = 0; k < exp.plan.classes.size(); k++) {
        cplx w = exp.plan.classes[k].weight;
        auto [x, se] = element(exp.class_re[k], exp.diagonal ? -1 : exp.class_im[k]);
        if (exp.diagonal) {
            x = cplx(x.real(), 0);
        }
        h += w * x;
        var_re += w.real() * w.real() * se.first * se.first + w.imag() * w.imag() * se.second * se.second;
        var_im += w.imag() * w.imag() * se.first * se.first + w.real() * w.real() * se.second * se.second;
    }
    out.h = h;
    out.h_se = cplx(std::sqrt(var_re), std::sqrt(var_im));
    return out;
}

ElementValues hadamard_estimate(const HadamardExperiment &exp, const std::optional<NoiseModel> &noise,
                                uint64_t shots, uint64_t seed) {
    auto exact = evaluate_jobs(exp, noise);
    return combine_jobs(exp, shots > 0 ? sample_jobs(exact, shots, seed) : exact_values(exact));
}

}  // namespace noqe
