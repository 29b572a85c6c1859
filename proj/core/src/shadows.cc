#include "noqe/shadows.h"

#include <thread>

#include "noqe/errors.h"
#include "noqe/pauli_transfer.h"
#include "noqe/version.h"

namespace noqe {

uint64_t snapshot_seed(uint64_t master_seed, uint64_t index) {
    return derive_seed(master_seed, 0x5AD0, index);
}

namespace {

uint64_t sample_outcome(const double *probs, uint64_t d, SplitMix64 &rng) {
    double total = 0;
    for (uint64_t k = 0; k < d; k++) {
        total += probs[k];
    }
    double u = uniform01(rng) * total;
    double acc = 0;
    for (uint64_t k = 0; k < d; k++) {
        acc += probs[k];
        if (u < acc) {
            return k;
        }
    }
    // Round-off at the top end: last outcome with nonzero mass.
    for (uint64_t k = d; k-- > 0;) {
        if (probs[k] > 0) {
            return k;
        }
    }
    return d - 1;
}

}  // namespace

ShadowDataset acquire(const Circuit &prep, uint64_t n, const AcquireOptions &options) {
    if (n < 1) {
        throw ContractError("acquire: n must be at least 1");
    }
    validate(prep);
    int nq = prep.num_qubits;
    if (nq > kMaxTableauQubits) {
        throw ResourceError("acquire: too many qubits");
    }
    bool noisy = options.noise.has_value() && !options.noise->is_noiseless();
    if (options.noise) {
        options.noise->validate();
    }
    uint64_t d = uint64_t{1} << nq;

    ShadowDataset ds;
    ds.label = options.label;
    ds.num_qubits = nq;
    ds.metadata.seed = options.seed;
    ds.metadata.noise = options.noise;
    ds.metadata.circuit_hash = circuit_hash(prep);
    ds.metadata.creator = std::string("noqe ") + version_string();
    ds.snapshots.assign(n, Snapshot{CliffordTableau(nq), 0});

    // Prepared state: a pure vector, or the noisy density matrix in Pauli form.
    Eigen::VectorXcd psi;
    std::optional<PauliTransferState> prep_state;
    if (noisy) {
        DensityMatrix rho = noisy_run(prep, *options.noise, DensityMatrix(nq));
        prep_state.emplace(rho);
    } else {
        psi = run_circuit(prep, Statevector(nq)).amplitudes();
    }

    auto work = [&](uint64_t begin, uint64_t end) {
        Eigen::VectorXcd phi(static_cast<Eigen::Index>(d));
        Eigen::VectorXd probs(static_cast<Eigen::Index>(d));
        for (uint64_t a = begin; a < end; a++) {
            SplitMix64 rng(snapshot_seed(options.seed, a));
            CliffordTableau u = sample_uniform_clifford(nq, rng);
            Circuit uc = to_circuit(u);
            if (noisy) {
                probs = noisy_clifford_probabilities(*prep_state, uc, *options.noise);
            } else {
                phi = psi;
                run_circuit_inplace(uc, phi);
                probs = phi.cwiseAbs2();
            }
            ds.snapshots[a] = Snapshot{u, sample_outcome(probs.data(), d, rng)};
        }
    };

    int threads = std::max(1, options.threads);
    if (threads == 1 || n < 256) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        uint64_t chunk = (n + static_cast<uint64_t>(threads) - 1) / static_cast<uint64_t>(threads);
        for (int t = 0; t < threads; t++) {
            uint64_t b = std::min(n, chunk * static_cast<uint64_t>(t));
            uint64_t e = std::min(n, b + chunk);
            pool.emplace_back(work, b, e);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    return ds;
}

Eigen::MatrixXcd snapshot_matrix(const Snapshot &s) {
    Eigen::VectorXcd v = pullback_vector(s.tableau, s.outcome);
    auto d = v.size();
    return static_cast<double>(d + 1) * (v * v.adjoint()) - Eigen::MatrixXcd::Identity(d, d);
}

}  // namespace noqe
