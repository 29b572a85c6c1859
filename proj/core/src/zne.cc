#include "noqe/zne.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "noqe/errors.h"

namespace noqe {

void ZneConfig::validate() const {
    if (scales.size() < 3) {
        throw ContractError("ZNE needs at least three scale factors for the exponential fit");
    }
    std::set<double> seen;
    for (double s : scales) {
        if (!(s >= 1.0) || !std::isfinite(s)) {
            throw ContractError("ZNE scale factors must be finite and >= 1, got " + std::to_string(s));
        }
        if (!seen.insert(s).second) {
            throw ContractError("ZNE scale factors must be distinct, " + std::to_string(s) + " repeats");
        }
    }
    if (shots_per_scale == 0) {
        throw ContractError("ZNE shots_per_scale must be at least 1");
    }
}

Circuit fold_circuit(const Circuit &c, double scale) {
    if (!(scale >= 1.0) || !std::isfinite(scale)) {
        throw ContractError("fold scale must be >= 1, got " + std::to_string(scale));
    }
    double half = (scale - 1.0) / 2.0;
    auto k = static_cast<size_t>(std::floor(half + 1e-12));
    double frac = std::max(0.0, half - static_cast<double>(k));
    size_t g = c.gates.size();
    auto m = std::min(g, static_cast<size_t>(std::ceil(frac * static_cast<double>(g) - 1e-9)));

    Circuit out(c.num_qubits, c.label);
    out.gates.reserve(g * (2 * k + 1) + 2 * m);
    Circuit inv = inverse(c);
    out.append(c);
    for (size_t r = 0; r < k; r++) {
        out.append(inv);
        out.append(c);
    }
    // Fold the trailing m gates one by one: ... g -> ... g g^dagger g.
    std::vector<Gate> tail(out.gates.end() - static_cast<std::ptrdiff_t>(m), out.gates.end());
    out.gates.resize(out.gates.size() - m);
    for (const auto &gate : tail) {
        out.append(gate);
        out.append(inverse(gate));
        out.append(gate);
    }
    return out;
}

namespace {

struct LinearSolve {
    double a = 0, b = 0, rss = 0;
    std::vector<double> grad;  // d(a + b * f(0)) / d y_k
    bool ok = false;
};

// Weighted least squares of y ~ a + b * f(x) with f given per point.
LinearSolve solve_two(const std::vector<ZnePoint> &pts, const std::vector<double> &f, double f0) {
    LinearSolve out;
    double s00 = 0, s01 = 0, s11 = 0, t0 = 0, t1 = 0;
    std::vector<double> w(pts.size());
    for (size_t k = 0; k < pts.size(); k++) {
        w[k] = pts[k].se > 0 ? 1.0 / (pts[k].se * pts[k].se) : 1.0;
        s00 += w[k];
        s01 += w[k] * f[k];
        s11 += w[k] * f[k] * f[k];
        t0 += w[k] * pts[k].value;
        t1 += w[k] * f[k] * pts[k].value;
    }
    double det = s00 * s11 - s01 * s01;
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det)) {
        return out;
    }
    out.a = (s11 * t0 - s01 * t1) / det;
    out.b = (s00 * t1 - s01 * t0) / det;
    out.grad.resize(pts.size());
    for (size_t k = 0; k < pts.size(); k++) {
        double r = pts[k].value - out.a - out.b * f[k];
        out.rss += w[k] * r * r;
        double da = w[k] * (s11 - s01 * f[k]) / det;
        double db = w[k] * (s00 * f[k] - s01) / det;
        out.grad[k] = da + db * f0;
    }
    out.ok = std::isfinite(out.a) && std::isfinite(out.b);
    return out;
}

LinearSolve solve_exponential(const std::vector<ZnePoint> &pts, double c) {
    std::vector<double> f(pts.size());
    for (size_t k = 0; k < pts.size(); k++) {
        f[k] = std::exp(-c * pts[k].scale);
    }
    return solve_two(pts, f, 1.0);
}

double propagate(const LinearSolve &s, const std::vector<ZnePoint> &pts) {
    double var = 0;
    for (size_t k = 0; k < pts.size(); k++) {
        var += s.grad[k] * s.grad[k] * pts[k].se * pts[k].se;
    }
    return std::sqrt(var);
}

}  // namespace

ZneFit extrapolate(const std::vector<ZnePoint> &points) {
    if (points.size() < 3) {
        throw ContractError("extrapolate needs at least three points");
    }
    std::set<double> xs;
    for (const auto &p : points) {
        xs.insert(p.scale);
        if (!std::isfinite(p.value)) {
            throw ContractError("extrapolate: non-finite value at scale " + std::to_string(p.scale));
        }
    }
    if (xs.size() < 2) {
        throw ContractError("extrapolate: all points share one scale factor");
    }

    constexpr int kGrid = 200;
    const double lo = std::log(1e-3), hi = std::log(10.0);
    auto grid_c = [&](int i) { return std::exp(lo + (hi - lo) * i / (kGrid - 1)); };
    int best = -1;
    double best_rss = INFINITY;
    for (int i = 0; i < kGrid; i++) {
        auto s = solve_exponential(points, grid_c(i));
        if (s.ok && s.rss < best_rss) {
            best_rss = s.rss;
            best = i;
        }
    }

    ZneFit fit;
    bool edge = best <= 0 || best >= kGrid - 1;
    if (!edge) {
        // Golden-section search on log c between the neighbours of the best grid point.
        double a = std::log(grid_c(best - 1)), b = std::log(grid_c(best + 1));
        const double phi = (std::sqrt(5.0) - 1) / 2;
        auto rss = [&](double lc) {
            auto s = solve_exponential(points, std::exp(lc));
            return s.ok ? s.rss : INFINITY;
        };
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = rss(x1), f2 = rss(x2);
        for (int it = 0; it < 200 && b - a > 1e-12; it++) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = rss(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = rss(x2);
            }
        }
        double c = std::exp(0.5 * (a + b));
        auto s = solve_exponential(points, c);
        if (s.ok && std::isfinite(s.a + s.b)) {
            fit.a = s.a;
            fit.b = s.b;
            fit.c = c;
            fit.value = s.a + s.b;
            fit.residual = s.rss;
            fit.se = propagate(s, points);
            return fit;
        }
    }
    std::vector<double> f(points.size());
    for (size_t k = 0; k < points.size(); k++) {
        f[k] = points[k].scale;
    }
    auto s = solve_two(points, f, 0.0);
    if (!s.ok) {
        throw DegenerateError("extrapolate: linear fallback fit is singular");
    }
    fit.linear_fallback = true;
    fit.a = s.a;
    fit.b = s.b;
    fit.c = 0;
    fit.value = s.a;
    fit.residual = s.rss;
    fit.se = propagate(s, points);
    return fit;
}

}  // namespace noqe
