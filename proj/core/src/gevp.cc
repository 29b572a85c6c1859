#include "noqe/gevp.h"

#include <cmath>
#include <string>

#include "noqe/errors.h"

namespace noqe {

GevpResult solve_gevp(const Eigen::MatrixXcd &h_in, const Eigen::MatrixXcd &s_in, double s_min) {
    if (h_in.rows() != h_in.cols() || s_in.rows() != s_in.cols() || h_in.rows() != s_in.rows() || h_in.rows() == 0) {
        throw ContractError("solve_gevp: H and S must be square matrices of the same size");
    }
    if (!(s_min > 0 && s_min < 1)) {
        throw ContractError("solve_gevp: s_min must lie in (0, 1), got " + std::to_string(s_min));
    }
    if (!h_in.allFinite() || !s_in.allFinite()) {
        throw DegenerateError("solve_gevp: matrices contain non-finite entries");
    }
    Eigen::MatrixXcd h = 0.5 * (h_in + h_in.adjoint());
    Eigen::MatrixXcd s = 0.5 * (s_in + s_in.adjoint());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> so(s);
    GevpResult out;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < so.eigenvalues().size(); k++) {
        double lam = so.eigenvalues()[k];
        out.overlap_eigenvalues.push_back(lam);
        if (lam >= s_min) {
            keep.push_back(k);
        } else {
            out.discarded_eigenvalues.push_back(lam);
        }
    }
    if (keep.empty()) {
        throw DegenerateError("solve_gevp: every overlap eigenvalue is below s_min = " + std::to_string(s_min));
    }
    auto r = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXcd x(s.rows(), r);
    for (Eigen::Index c = 0; c < r; c++) {
        x.col(c) = so.eigenvectors().col(keep[static_cast<size_t>(c)]) /
                   std::sqrt(so.eigenvalues()[keep[static_cast<size_t>(c)]]);
    }
    Eigen::MatrixXcd ht = x.adjoint() * h * x;
    ht = (0.5 * (ht + ht.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eo(ht);

    out.retained_dim = static_cast<int>(r);
    out.energies = eo.eigenvalues();
    out.coefficients = x * eo.eigenvectors();
    for (Eigen::Index k = 0; k < r; k++) {
        Eigen::VectorXcd c = out.coefficients.col(k);
        out.residual_norms.push_back((h * c - out.energies[k] * (s * c)).norm());
    }
    return out;
}

}  // namespace noqe
