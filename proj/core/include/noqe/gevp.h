#ifndef NOQE_GEVP_H
#define NOQE_GEVP_H

#include <Eigen/Dense>
#include <vector>

namespace noqe {

inline constexpr double kDefaultSMin = 1e-4;

struct GevpResult {
    Eigen::VectorXd energies;        // ascending
    Eigen::MatrixXcd coefficients;   // column k solves H c = E_k S c
    int retained_dim = 0;
    std::vector<double> overlap_eigenvalues;    // all, ascending
    std::vector<double> discarded_eigenvalues;  // those below s_min
    std::vector<double> residual_norms;         // ||H c - E S c|| per pair
};

/// Canonical orthogonalization: Hermitize both matrices, eigendecompose S,
/// keep eigenvalues >= s_min, solve X^dagger H X with X = U_r lambda_r^{-1/2},
/// and back-transform. Throws DegenerateError if nothing is retained.
GevpResult solve_gevp(const Eigen::MatrixXcd &h, const Eigen::MatrixXcd &s, double s_min = kDefaultSMin);

}  // namespace noqe

#endif
