#include "noqe/estimators.h"

#include <cmath>

#include "noqe/errors.h"

namespace noqe {

namespace {

// Pullbacks are materialized at once below this many complex entries, and
// streamed in chunks above it.
constexpr uint64_t kCacheEntries = uint64_t{1} << 24;
constexpr uint64_t kChunk = 8192;

void fill_pullbacks(const ShadowDataset &ds, uint64_t begin, uint64_t end, Eigen::MatrixXcd &out) {
    int nq = ds.num_qubits;
    uint64_t d = uint64_t{1} << nq;
    out.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(end - begin));
    for (uint64_t a = begin; a < end; a++) {
        const auto &s = ds.snapshots[a];
        pullback_into(elimination_sequence(s.tableau), nq, s.outcome, out.col(static_cast<Eigen::Index>(a - begin)).data());
    }
}

void check_dataset(const ShadowDataset &ds) {
    if (ds.snapshots.empty()) {
        throw ContractError("dataset " + ds.label + " is empty");
    }
    for (const auto &s : ds.snapshots) {
        if (s.tableau.num_qubits() != ds.num_qubits) {
            throw ContractError("dataset " + ds.label + " mixes snapshot widths");
        }
    }
}

// <s_a|q|s_a> for every column a.
Eigen::VectorXd quadratic_forms(const Eigen::MatrixXcd &q, const Eigen::MatrixXcd &v) {
    Eigen::MatrixXcd y = q * v;
    return (v.conjugate().cwiseProduct(y)).colwise().sum().real().transpose();
}

}  // namespace

Eigen::MatrixXcd pullback_states(const ShadowDataset &ds) {
    check_dataset(ds);
    Eigen::MatrixXcd v;
    fill_pullbacks(ds, 0, ds.size(), v);
    return v;
}

ShadowMoments shadow_moments(const Eigen::MatrixXcd &v, const Eigen::VectorXd *w, int max_order) {
    ShadowMoments mom;
    auto d = v.rows();
    mom.num_qubits = static_cast<int>(std::lround(std::log2(static_cast<double>(d))));
    if (w) {
        if (w->size() != v.cols()) {
            throw ContractError("shadow_moments: weight vector length mismatch");
        }
        mom.n = w->sum();
        mom.q = v * w->asDiagonal() * v.adjoint();
    } else {
        mom.n = static_cast<double>(v.cols());
        mom.q = v * v.adjoint();
    }
    if (max_order >= 3) {
        Eigen::VectorXd c = quadratic_forms(mom.q, v);
        if (w) {
            c = c.cwiseProduct(*w);
        }
        mom.wq = v * c.asDiagonal() * v.adjoint();
        mom.has_wq = true;
    }
    return mom;
}

ShadowMoments shadow_moments(const ShadowDataset &ds, int max_order) {
    check_dataset(ds);
    uint64_t n = ds.size();
    uint64_t d = uint64_t{1} << ds.num_qubits;
    if (n * d <= kCacheEntries) {
        return shadow_moments(pullback_states(ds), nullptr, max_order);
    }
    // Two streaming passes; the second recomputes pullbacks chunk by chunk.
    ShadowMoments mom;
    mom.num_qubits = ds.num_qubits;
    mom.n = static_cast<double>(n);
    auto dd = static_cast<Eigen::Index>(d);
    mom.q = Eigen::MatrixXcd::Zero(dd, dd);
    Eigen::MatrixXcd v;
    for (uint64_t b = 0; b < n; b += kChunk) {
        fill_pullbacks(ds, b, std::min(n, b + kChunk), v);
        mom.q.noalias() += v * v.adjoint();
    }
    if (max_order >= 3) {
        mom.wq = Eigen::MatrixXcd::Zero(dd, dd);
        for (uint64_t b = 0; b < n; b += kChunk) {
            fill_pullbacks(ds, b, std::min(n, b + kChunk), v);
            Eigen::VectorXd c = quadratic_forms(mom.q, v);
            mom.wq.noalias() += v * c.asDiagonal() * v.adjoint();
        }
        mom.has_wq = true;
    }
    return mom;
}

ShadowEstimate estimate_from_moments(const ShadowMoments &mom, int m) {
    if (m < 1 || m > 3) {
        throw ContractError("estimator order must be 1, 2 or 3");
    }
    double n = mom.n;
    if (n < m) {
        throw ContractError("estimator of order " + std::to_string(m) + " needs at least " + std::to_string(m) +
                            " snapshots, dataset has " + std::to_string(static_cast<long long>(n)));
    }
    if (m == 3 && !mom.has_wq) {
        throw ContractError("order-3 estimate requested from moments without the quadratic term");
    }
    auto dd = mom.q.rows();
    double D = static_cast<double>(dd);
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dd, dd);
    Eigen::MatrixXcd s1 = (D + 1) * mom.q - n * id;
    Eigen::MatrixXcd e;
    if (m == 1) {
        e = s1 / n;
    } else {
        Eigen::MatrixXcd s2 = (D * D - 1) * mom.q + n * id;
        if (m == 2) {
            e = (s1 * s1 - s2) / (n * (n - 1));
        } else {
            Eigen::MatrixXcd s3 = (D * D * D + 1) * mom.q - n * id;
            // T(s1) = sum_a A_a s1 A_a expanded with A_a = (D+1) P_a - I.
            Eigen::MatrixXcd w_s1 = (D + 1) * mom.wq - n * mom.q;
            Eigen::MatrixXcd t = (D + 1) * (D + 1) * w_s1 - (D + 1) * (mom.q * s1 + s1 * mom.q) + n * s1;
            e = (s1 * s1 * s1 - s2 * s1 - s1 * s2 - t + 2.0 * s3) / (n * (n - 1) * (n - 2));
        }
    }
    ShadowEstimate est;
    est.matrix = 0.5 * (e + e.adjoint());
    est.order = m;
    est.n = n;
    est.trace = est.matrix.trace();
    return est;
}

ShadowEstimate u_estimate(const ShadowDataset &ds, int m) {
    if (m < 1 || m > 3) {
        throw ContractError("estimator order must be 1, 2 or 3");
    }
    if (ds.size() < static_cast<size_t>(m)) {
        throw ContractError("estimator of order " + std::to_string(m) + " needs at least " + std::to_string(m) +
                            " snapshots, dataset has " + std::to_string(ds.size()));
    }
    return estimate_from_moments(shadow_moments(ds, m), m);
}

ShadowEstimate distill(const ShadowEstimate &est) {
    if (std::abs(est.trace) < 1e-6) {
        throw DegenerateError("distill: estimate trace " + std::to_string(std::abs(est.trace)) + " is below 1e-6");
    }
    ShadowEstimate out = est;
    out.matrix = est.matrix / est.trace;
    out.trace = out.matrix.trace();
    out.distilled = true;
    return out;
}

cplx estimate_linear(const ShadowDataset &ds, const PauliSum &obs, int m) {
    if (obs.num_qubits() != ds.num_qubits) {
        throw ContractError("estimate_linear: observable and dataset widths differ");
    }
    return trace_with(obs, u_estimate(ds, m).matrix);
}

cplx trace_product(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    return a.cwiseProduct(b.transpose()).sum();
}

cplx trace_product(const Eigen::MatrixXcd &o, const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    return trace_product(o, a * b);
}

static void check_independent(const ShadowDataset &a, const ShadowDataset &b) {
    if (a.num_qubits != b.num_qubits) {
        throw ContractError("bilinear estimate: dataset widths differ");
    }
    bool same_object = &a == &b;
    bool same_draws = a.metadata.seed == b.metadata.seed && a.metadata.circuit_hash == b.metadata.circuit_hash &&
                      a.size() == b.size() && a.snapshots == b.snapshots;
    if (same_object || same_draws) {
        throw ContractError("bilinear estimate needs two independent datasets; the same data was passed twice");
    }
}

cplx estimate_bilinear(const ShadowDataset &a, const ShadowDataset &b, const PauliSum &obs, int m, bool symmetrized) {
    check_independent(a, b);
    if (obs.num_qubits() != a.num_qubits) {
        throw ContractError("estimate_bilinear: observable width differs from datasets");
    }
    auto ea = u_estimate(a, m).matrix;
    auto eb = u_estimate(b, m).matrix;
    cplx v = trace_with(obs, ea * eb);
    if (symmetrized) {
        v += trace_with(obs, eb * ea);
    }
    return v;
}

OverlapEstimate reconstruct_overlap(const ShadowEstimate &i, const ShadowEstimate &i_r, const ShadowEstimate &i_i,
                                    const ShadowEstimate &j, const ShadowEstimate &j_r) {
    OverlapEstimate out;
    out.abs_sq = trace_product(i.matrix, j.matrix).real();
    double base = 0.5 * (1 + out.abs_sq);
    double re = 2 * trace_product(i_r.matrix, j_r.matrix).real() - base;
    double im = 2 * trace_product(i_i.matrix, j_r.matrix).real() - base;
    out.value = cplx(re, im);
    out.consistency_residual = std::abs(re * re + im * im - out.abs_sq);
    return out;
}

OverlapEstimate reconstruct_overlap(const ShadowDataset &ds_i, const ShadowDataset &ds_r_i,
                                    const ShadowDataset &ds_i_i, const ShadowDataset &ds_j,
                                    const ShadowDataset &ds_r_j, int m, bool distill_estimates) {
    check_independent(ds_i, ds_j);
    check_independent(ds_r_i, ds_r_j);
    check_independent(ds_i_i, ds_r_j);
    for (const auto *ds : {&ds_r_i, &ds_i_i, &ds_j, &ds_r_j}) {
        if (ds->num_qubits != ds_i.num_qubits) {
            throw ContractError("reconstruct_overlap: datasets differ in width");
        }
    }
    auto est = [&](const ShadowDataset &ds) {
        auto e = u_estimate(ds, m);
        return distill_estimates ? distill(e) : e;
    };
    return reconstruct_overlap(est(ds_i), est(ds_r_i), est(ds_i_i), est(ds_j), est(ds_r_j));
}

cplx reconstruct_hamiltonian_element(const ShadowEstimate &i, const ShadowEstimate &j,
                                     const Eigen::MatrixXcd &hamiltonian, cplx s_ij, double delta) {
    cplx num = trace_product(hamiltonian, j.matrix, i.matrix);
    if (std::abs(s_ij) < delta) {
        throw UnreliableDivision("overlap magnitude " + std::to_string(std::abs(s_ij)) + " is below the floor " +
                                     std::to_string(delta),
                                 num, s_ij);
    }
    return num / std::conj(s_ij);
}

cplx reconstruct_hamiltonian_element(const ShadowDataset &ds_i, const ShadowDataset &ds_j, const PauliSum &h,
                                     cplx s_ij, int m, bool distill_estimates, double delta) {
    check_independent(ds_i, ds_j);
    auto ei = u_estimate(ds_i, m), ej = u_estimate(ds_j, m);
    if (distill_estimates) {
        ei = distill(ei);
        ej = distill(ej);
    }
    return reconstruct_hamiltonian_element(ei, ej, materialize(h), s_ij, delta);
}

}  // namespace noqe
