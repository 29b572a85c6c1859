#ifndef NOQE_PIPELINE_H
#define NOQE_PIPELINE_H

#include <Eigen/Dense>
#include <array>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "noqe/estimators.h"
#include "noqe/gevp.h"
#include "noqe/hadamard.h"
#include "noqe/noise.h"
#include "noqe/pauli.h"
#include "noqe/references.h"
#include "noqe/shadows.h"
#include "noqe/zne.h"

namespace noqe {

enum class Method { Shadow, Hadamard };
std::string method_name(Method m);

struct ReferenceEntry {
    std::string label;
    std::string circuit;  // path, resolved against the config directory
    std::string hf_occupation;
};

/// Experiment config (JSON):
///   {"hamiltonian", "references": [{"label", "circuit", "hf_occupation"?}],
///    "method", "budget", "estimator_m", "distill", "noise", "s_min", "seed",
///    "zne": {"scales", "shots_per_scale"}}
/// Optional extras: "bootstrap" (resamples, 0 disables), "overlap_floor",
/// "grouping", "measure_imaginary", "threads", "datasets" (directory of saved
/// datasets to estimate from), "sweep": {"lambdas", "methods"}.
struct ExperimentConfig {
    std::string hamiltonian;
    std::vector<ReferenceEntry> references;
    Method method = Method::Shadow;
    uint64_t budget = 10000;
    int estimator_m = 3;
    bool distill = false;
    std::optional<NoiseModel> noise;
    double s_min = kDefaultSMin;
    uint64_t seed = 0;
    std::optional<ZneConfig> zne;
    int bootstrap = 200;
    double overlap_floor = kOverlapFloor;
    bool grouping = true;
    bool measure_imaginary = true;
    int threads = 1;
    std::string datasets;
    std::vector<double> sweep_lambdas = {0.5, 0.75, 1.0, 1.25, 1.5};
    std::vector<Method> sweep_methods = {Method::Shadow, Method::Hadamard};
    std::string base_dir;
    nlohmann::json raw;
};

/// Errors name the offending field and throw ParseError.
ExperimentConfig parse_config(std::string_view json_text, const std::string &base_dir = ".");
ExperimentConfig load_config(const std::string &path);

struct Problem {
    PauliSum hamiltonian;
    std::vector<ReferenceSpec> references;
};

/// Loads the Hamiltonian and reference circuits named by the config.
Problem load_problem(const ExperimentConfig &config);

/// Exact S and H from the ideal reference states.
struct OracleMatrices {
    Eigen::MatrixXcd s;
    Eigen::MatrixXcd h;
    std::vector<Statevector> states;
};
OracleMatrices oracle_matrices(const Problem &problem);

/// One reported matrix element.
struct ElementEstimate {
    std::string quantity;  // "S" or "H"
    int i = 0, j = 0;
    cplx value = 0;
    cplx se = 0;  // real and imaginary standard errors
    std::optional<cplx> raw_value;  // undistilled value when distillation ran
    double residual = 0;             // overlap consistency residual
    bool unreliable = false;
    uint64_t n = 0;  // snapshots per dataset or shots per circuit
    int m = 1;
    bool distilled = false;
};

struct MatrixElementEstimates {
    Method method = Method::Shadow;
    Eigen::MatrixXcd s;
    Eigen::MatrixXcd h;
    std::vector<ElementEstimate> elements;
    std::vector<std::string> flags;
    uint64_t total_shots = 0;

    int size() const {
        return static_cast<int>(s.rows());
    }
    const ElementEstimate *find(const std::string &quantity, int i, int j) const;
};

// ---- Shadow path ----

enum class DatasetKind { Psi = 0, R = 1, I = 2 };

/// Three datasets per reference: the reference itself and its R and I
/// auxiliaries, each with `n` snapshots and its own derived seed.
struct ShadowData {
    std::vector<std::array<ShadowDataset, 3>> per_ref;
};

uint64_t dataset_seed(uint64_t master, size_t reference, DatasetKind kind);
std::string dataset_label(const ReferenceSpec &spec, DatasetKind kind);
Circuit dataset_circuit(const ReferenceSpec &spec, DatasetKind kind);

ShadowData acquire_shadow_data(const Problem &problem, uint64_t n, const std::optional<NoiseModel> &noise,
                               uint64_t seed, int threads = 1);

struct ShadowOptions {
    int m = 3;
    bool distill = false;
    double overlap_floor = kOverlapFloor;
    int bootstrap = 0;  // resamples for standard errors, 0 disables
    uint64_t seed = 0;  // bootstrap stream
};

/// Per-reference estimates (psi, R, I), before distillation.
using ShadowEstimates = std::vector<std::array<ShadowEstimate, 3>>;
ShadowEstimates estimate_shadow_data(const ShadowData &data, int m);

/// Matrices from per-dataset estimates. Distillation is applied here when
/// requested; raw values are kept alongside.
MatrixElementEstimates assemble_from_estimates(const Problem &problem, const ShadowEstimates &est,
                                               const ShadowOptions &options, uint64_t n);

/// Estimates plus bootstrap standard errors over snapshots.
MatrixElementEstimates assemble_shadow(const Problem &problem, const ShadowData &data, const ShadowOptions &options);

// ---- Hadamard path ----

/// Diagonal experiments for every reference, then one per pair i < j.
struct HadamardSuite {
    std::vector<HadamardExperiment> experiments;
    std::vector<std::pair<int, int>> elements;
    int num_references = 0;
};

HadamardSuite build_hadamard_suite(const Problem &problem, const HadamardOptions &options = {});
/// Exact job expectations for every experiment (the expensive part).
std::vector<std::vector<double>> evaluate_suite(const HadamardSuite &suite, const std::optional<NoiseModel> &noise,
                                                double fold_scale = 1.0);
size_t suite_job_count(const HadamardSuite &suite);

/// Samples `shots` per job (0 means exact values) and assembles the matrices.
MatrixElementEstimates assemble_hadamard(const HadamardSuite &suite, const std::vector<std::vector<double>> &exact,
                                         uint64_t shots, uint64_t seed);

/// ZNE: per scale, sample `shots_per_scale` for every job, extrapolate each
/// job to zero noise, then assemble. `exact_per_scale` follows config.scales.
MatrixElementEstimates assemble_hadamard_zne(const HadamardSuite &suite,
                                             const std::vector<std::vector<std::vector<double>>> &exact_per_scale,
                                             const ZneConfig &config, uint64_t seed);

// ---- End to end ----

struct ExperimentResult {
    MatrixElementEstimates estimates;
    std::optional<MatrixElementEstimates> raw;  // unmitigated counterpart, when mitigation ran
    GevpResult gevp;
    OracleMatrices oracle;
    double exact_energy = 0;  // lowest NOQE energy from the oracle matrices
    nlohmann::json report;
};

/// Shadow or Hadamard estimation per the config, then the GEVP. With
/// `exact_mode` sampling is bypassed: statevector oracles for a noiseless
/// run, exact noisy expectations for the Hadamard path under noise.
ExperimentResult noqe_energy(const ExperimentConfig &config, const Problem &problem, bool exact_mode = false,
                             const ShadowData *data = nullptr);
/// ZNE-mitigated Hadamard energy; needs config.zne.
ExperimentResult zne_hadamard_energy(const ExperimentConfig &config, const Problem &problem);

/// Lowest NOQE energy of the ideal references.
double exact_noqe_energy(const Problem &problem, double s_min = kDefaultSMin);

/// One CSV row of a noise sweep.
struct SweepRow {
    double lambda = 0;
    std::string method;
    std::string quantity;
    double value = 0;
    double se = 0;
    double true_value = 0;
    double abs_error = 0;
};
std::vector<SweepRow> run_sweep(const ExperimentConfig &config, const Problem &problem);
std::string sweep_to_csv(const std::vector<SweepRow> &rows);

nlohmann::json estimates_to_json(const MatrixElementEstimates &est);
nlohmann::json gevp_to_json(const GevpResult &g);
nlohmann::json matrix_to_json(const Eigen::MatrixXcd &m);

}  // namespace noqe

#endif
