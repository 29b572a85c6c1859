#ifndef NOQE_SHADOWS_H
#define NOQE_SHADOWS_H

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "noqe/circuit.h"
#include "noqe/clifford.h"
#include "noqe/noise.h"

namespace noqe {

/// One randomized measurement: the Clifford drawn and the observed outcome.
struct Snapshot {
    CliffordTableau tableau;
    uint64_t outcome = 0;  // basis index, qubit 0 most significant

    bool operator==(const Snapshot &) const = default;
};

inline constexpr const char *kSeedScheme = "splitmix64-counter/v1";

struct DatasetMetadata {
    uint64_t seed = 0;
    std::optional<NoiseModel> noise;
    std::string circuit_hash;
    std::string creator;
    std::string seed_scheme = kSeedScheme;
};

struct ShadowDataset {
    std::string label;
    int num_qubits = 0;
    std::vector<Snapshot> snapshots;
    DatasetMetadata metadata;

    size_t size() const {
        return snapshots.size();
    }
};

/// Per-snapshot generator seed; stream tag separates Clifford draws from
/// any other randomness keyed on the same master seed.
uint64_t snapshot_seed(uint64_t master_seed, uint64_t index);

struct AcquireOptions {
    std::optional<NoiseModel> noise;  // none => noiseless statevector path
    uint64_t seed = 0;
    std::string label;
    int threads = 1;
};

/// n snapshots of the state prepared by `prep` from |0...0>. Each snapshot
/// draws a fresh uniform Clifford U and one Z-basis outcome of U rho U^dagger.
/// Noisy acquisition evolves prep under the noise model, then runs
/// to_circuit(U) gate by gate with noise before measuring.
ShadowDataset acquire(const Circuit &prep, uint64_t n, const AcquireOptions &options);

/// (D + 1) U^dagger|b><b|U - I.
Eigen::MatrixXcd snapshot_matrix(const Snapshot &s);

/// Text form: JSON header line, then one {"t","s","b"} line per snapshot.
std::string serialize_dataset(const ShadowDataset &ds);
ShadowDataset parse_dataset(std::string_view text);
void save_dataset(const ShadowDataset &ds, const std::string &path);
ShadowDataset load_dataset(const std::string &path);

}  // namespace noqe

#endif
