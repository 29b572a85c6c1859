#ifndef NOQE_NOISE_H
#define NOQE_NOISE_H

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "noqe/circuit.h"
#include "noqe/statevector.h"

namespace noqe {

/// Density matrices are simulated densely up to this width.
inline constexpr int kMaxDensityQubits = 10;

class DensityMatrix {
   public:
    /// |0...0><0...0|.
    explicit DensityMatrix(int num_qubits);
    DensityMatrix(int num_qubits, Eigen::MatrixXcd rho);
    static DensityMatrix from_statevector(const Statevector &psi);

    int num_qubits() const {
        return n_;
    }
    uint64_t dim() const {
        return uint64_t{1} << n_;
    }
    const Eigen::MatrixXcd &matrix() const {
        return rho_;
    }
    Eigen::MatrixXcd &matrix() {
        return rho_;
    }
    cplx trace() const {
        return rho_.trace();
    }
    /// <psi|rho|psi>.
    double fidelity(const Statevector &psi) const;
    /// Computational-basis probabilities (real diagonal, clipped at zero).
    Eigen::VectorXd probabilities() const;

   private:
    int n_;
    Eigen::MatrixXcd rho_;
};

enum class ChannelKind { Depolarizing, AmplitudeDamping, PhaseDamping };

std::string channel_name(ChannelKind kind);

/// Gate-level noise: after every gate, depolarizing then amplitude damping then
/// phase damping, each at lambda * p1 for one-qubit gates and lambda * p2 for
/// each native two-qubit interaction the gate compiles to.
struct NoiseModel {
    double p1 = 3e-5;
    double p2 = 1.5e-3;
    double lambda = 1.0;
    bool depolarizing = true;
    bool amplitude_damping = true;
    bool phase_damping = true;

    double rate1() const {
        return lambda * p1;
    }
    double rate2() const {
        return lambda * p2;
    }
    /// Same model with lambda folded into the rates.
    NoiseModel flattened() const;
    /// Throws ContractError unless effective rates lie in [0, 1].
    void validate() const;
    bool is_noiseless() const;
};

/// {"p1", "p2", "lambda", "channels": [...]}; missing fields take defaults.
NoiseModel noise_model_from_json(const nlohmann::json &j);
nlohmann::json noise_model_to_json(const NoiseModel &model);

/// One channel application produced by the noise model.
struct NoiseOp {
    ChannelKind kind;
    std::array<int, 2> qubits;
    int arity;
    double rate;
};

/// Number of native two-qubit interactions used for noise and resource
/// accounting. Zero for one-qubit gates.
int native_two_qubit_count(GateKind kind);

/// Channels applied after `g` under `model`, in order.
std::vector<NoiseOp> noise_after(const Gate &g, const NoiseModel &model);

/// rho -> G rho G^dagger.
void apply_unitary(DensityMatrix &rho, const Gate &g);
void apply_channel_inplace(DensityMatrix &rho, ChannelKind kind, const std::vector<int> &qubits, double rate);
DensityMatrix apply_channel(const DensityMatrix &rho, ChannelKind kind, const std::vector<int> &qubits,
                            double rate);

/// Gate-by-gate evolution with the model's channels after each gate.
DensityMatrix noisy_run(const Circuit &c, const NoiseModel &model, const DensityMatrix &initial);
void noisy_run_inplace(const Circuit &c, const NoiseModel &model, DensityMatrix &rho);

OutcomeCounts sample_from_density(const DensityMatrix &rho, uint64_t shots, uint64_t seed);

}  // namespace noqe

#endif
