#ifndef NOQE_ZNE_H
#define NOQE_ZNE_H

#include <vector>

#include "noqe/circuit.h"

namespace noqe {

inline const std::vector<double> kDefaultZneScales = {1.0, 1.5, 2.0, 2.5, 3.0};

struct ZneConfig {
    std::vector<double> scales = kDefaultZneScales;
    uint64_t shots_per_scale = 10000;

    /// Throws ContractError unless scales are >= 1, distinct, and at least three.
    void validate() const;
};

/// Unitary folding to amplify noise by about `scale` while keeping the ideal
/// unitary: k = floor((scale - 1)/2) whole-circuit folds U (U^dagger U)^k, then
/// the last ceil(f * G) gates individually folded as g g^dagger g, where f is
/// the fractional remainder of (scale - 1)/2.
Circuit fold_circuit(const Circuit &c, double scale);

struct ZnePoint {
    double scale = 1;
    double value = 0;
    double se = 0;  // zero means unit weight
};

struct ZneFit {
    double value = 0;  // model at zero noise
    double se = 0;     // linear propagation of the point SEs at the fitted c
    double a = 0, b = 0, c = 0;
    double residual = 0;  // weighted sum of squared residuals
    bool linear_fallback = false;
};

/// Weighted least squares of a + b exp(-c x): c searched on a log grid over
/// [1e-3, 10] and refined by golden section, (a, b) solved in closed form for
/// each c. Falls back to a straight line when the best c sits on the grid edge
/// or the fit is not finite. Returns the fitted value at x = 0.
ZneFit extrapolate(const std::vector<ZnePoint> &points);

}  // namespace noqe

#endif
