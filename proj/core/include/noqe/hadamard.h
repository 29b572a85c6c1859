#ifndef NOQE_HADAMARD_H
#define NOQE_HADAMARD_H

#include <optional>
#include <string>
#include <vector>

#include "noqe/noise.h"
#include "noqe/pauli.h"
#include "noqe/references.h"

namespace noqe {

/// Terms of H whose transition values <psi_i|P|psi_j> are proportional for
/// every pair of states with the given supports. Measuring the representative
/// yields every member: <i|P_k|j> = factor_k <i|rep|j>, factor_k in {+-1, +-i}.
struct MeasurementClass {
    PauliWord representative;
    std::vector<size_t> members;
    std::vector<cplx> factors;
    cplx weight = 0;  // sum_k w_k factor_k
};

struct MeasurementPlan {
    bool diagonal = false;
    std::vector<MeasurementClass> classes;  // settings that need a measurement
    /// Diagonal only: terms proportional to the identity on the support, whose
    /// value is known without measuring.
    cplx constant = 0;
    std::vector<size_t> known_terms;
    /// Terms with no support overlap; they contribute exactly zero.
    std::vector<size_t> zero_terms;
};

/// Groups terms by their coupling pattern over the supports of the ideal
/// states (amplitudes above `support_tol`). Without grouping every term is its
/// own class, except the identity on a diagonal, which is known.
MeasurementPlan plan_measurements(const PauliSum &h, const Statevector &psi_i, const Statevector &psi_j,
                                  bool diagonal, bool grouping = true, double support_tol = 1e-12);

/// One measured expectation: run preps[prep], rotate `basis` into Z on the
/// register qubits, and average the parity of the support plus the ancilla.
struct MeasurementJob {
    int prep = 0;
    PauliWord basis;
    int ancilla = -1;  // -1 for the direct N-qubit path
    std::string tag;
};

/// All circuits and measurements for one matrix element.
struct HadamardExperiment {
    std::string label;
    bool diagonal = false;
    std::vector<Circuit> preps;
    std::vector<MeasurementJob> jobs;
    MeasurementPlan plan;
    // Job indices; -1 when absent.
    int s_re = -1;
    int s_im = -1;
    std::vector<int> class_re;
    std::vector<int> class_im;
};

struct HadamardOptions {
    bool grouping = true;
    bool measure_imaginary = true;
    bool simplified_first_stage = true;
};

/// Off-diagonal element (i, j): S from <Z_anc> at theta = 0 and pi/2, H from
/// each class representative at both angles.
HadamardExperiment build_hadamard_experiment(const ReferenceSpec &spec_i, const ReferenceSpec &spec_j,
                                             const PauliSum &h, const HadamardOptions &options = {});
/// Diagonal element: direct measurement of the reference circuit.
HadamardExperiment build_diagonal_experiment(const ReferenceSpec &spec, const PauliSum &h,
                                             const HadamardOptions &options = {});

/// Exact expectation of every job, under noise when given. `fold_scale` > 1
/// folds each prep circuit (not the basis rotation) for noise amplification.
std::vector<double> evaluate_jobs(const HadamardExperiment &exp, const std::optional<NoiseModel> &noise,
                                  double fold_scale = 1.0);

struct SampledValue {
    double mean = 0;
    double se = 0;
};

/// Finite-shot estimate of each job from its exact expectation: `shots`
/// single-shot parities per job, each +1 with probability (1 + E)/2.
std::vector<SampledValue> sample_jobs(const std::vector<double> &exact, uint64_t shots, uint64_t seed);
std::vector<SampledValue> exact_values(const std::vector<double> &exact);

struct ElementValues {
    cplx s = 1;
    cplx s_se = 0;  // real and imaginary standard errors packed as a complex
    cplx h = 0;
    cplx h_se = 0;
};

/// Assembles S and H of the element from per-job values.
ElementValues combine_jobs(const HadamardExperiment &exp, const std::vector<SampledValue> &values);

/// Convenience: evaluate, then sample (`shots` > 0) or use exact values.
ElementValues hadamard_estimate(const HadamardExperiment &exp, const std::optional<NoiseModel> &noise,
                                uint64_t shots, uint64_t seed);

}  // namespace noqe

#endif
