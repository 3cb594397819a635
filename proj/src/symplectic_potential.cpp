#include "kahler/symplectic_potential.hpp"

#include "kahler/error.hpp"

#include <cmath>
#include <string>

namespace kahler {

namespace {

// Lagrange extrapolation of samples (x_i, y_i) to x.
double extrapolate(const double* x, const double* y, int n, double at) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double l = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) l *= (at - x[j]) / (x[i] - x[j]);
        sum += l * y[i];
    }
    return sum;
}

}  // namespace

SymplecticPotential::SymplecticPotential(QuadratureRule rule, std::vector<double> upp,
                                         double kappa, double boundary_tol)
    : rule_(std::move(rule)), upp_(std::move(upp)), kappa_(kappa) {
    if (upp_.size() != rule_.size() || rule_.size() < 8)
        throw Error(ErrorCode::NotAdmissible, "u'' samples do not match the rule");
    if (rule_.lo != -1.0 || rule_.hi != 1.0)
        throw Error(ErrorCode::NotAdmissible, "rule must span [-1, 1]");
    for (std::size_t i = 0; i < upp_.size(); ++i)
        if (!(upp_[i] > 0.0) || !std::isfinite(upp_[i]))
            throw Error(ErrorCode::NotAdmissible,
                        "u'' not positive at z = " + std::to_string(rule_.nodes[i]));
    const auto [left, right] = boundary_limits();
    if (std::abs(left - 1.0) > boundary_tol || std::abs(right - 1.0) > boundary_tol)
        throw Error(ErrorCode::NotAdmissible, "boundary behaviour (1-z^2)u'' -> 1 violated: " +
                                                  std::to_string(left) + ", " +
                                                  std::to_string(right));
}

SymplecticPotential SymplecticPotential::canonical(QuadratureRule rule, double kappa) {
    std::vector<double> upp(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double z = rule.nodes[i];
        upp[i] = 1.0 / ((1.0 - z) * (1.0 + z));
    }
    return SymplecticPotential(std::move(rule), std::move(upp), kappa);
}

std::pair<double, double> SymplecticPotential::boundary_limits() const {
    constexpr int n = 4;
    const std::size_t m = upp_.size();
    double xl[n], yl[n], xr[n], yr[n];
    for (int i = 0; i < n; ++i) {
        const double zl = rule_.nodes[i];
        const double zr = rule_.nodes[m - 1 - i];
        xl[i] = zl;
        yl[i] = (1.0 - zl) * (1.0 + zl) * upp_[i];
        xr[i] = zr;
        yr[i] = (1.0 - zr) * (1.0 + zr) * upp_[m - 1 - i];
    }
    return {extrapolate(xl, yl, n, -1.0), extrapolate(xr, yr, n, 1.0)};
}

}  // namespace kahler
