#include "kahler/ckem_solver.hpp"

#include "kahler/error.hpp"
#include "kahler/format.hpp"

#include <cmath>
#include <limits>

namespace kahler {

double b_kappa(double kappa) {
    if (!(kappa > 1.0) || !std::isfinite(kappa))
        throw Error(ErrorCode::OutOfDomain, "b_kappa needs kappa > 1");
    return kappa + std::sqrt((kappa - 1.0) * (kappa + 1.0));
}

namespace {

// Unknowns (c, alpha, beta) for
//   P = (s/2) f^2 + c q + alpha f^3/b^3 + beta z f^3/b^3,   q = -(2z + kappa + b)/12,
// q being the particular response to -c (z + kappa); f^3 and z f^3 span the kernel.
// Rows: P(1), P(-1), P'(1), P'(-1); each normalised to unit length.
struct BoundarySystem {
    Eigen::Matrix<double, 4, 3> A;
    Eigen::Vector4d y;
};

BoundarySystem boundary_system(const RuledSurfaceData& X, double b) {
    const double s = X.base_scal;
    const double k = X.kappa;
    const double b3 = b * b * b;
    BoundarySystem sys;
    int row = 0;
    for (double z : {1.0, -1.0}) {
        const double f = z + b;
        sys.A.row(row) << -(2.0 * z + k + b) / 12.0, f * f * f / b3, z * f * f * f / b3;
        sys.y(row) = -0.5 * s * f * f;
        ++row;
    }
    for (double z : {1.0, -1.0}) {
        const double f = z + b;
        const double target = z > 0 ? -2.0 * (1.0 + k) : 2.0 * (k - 1.0);
        sys.A.row(row) << -1.0 / 6.0, 3.0 * f * f / b3, (f * f * f + 3.0 * z * f * f) / b3;
        sys.y(row) = target - s * f;
        ++row;
    }
    for (int i = 0; i < 4; ++i) {
        const double n = sys.A.row(i).norm();
        sys.A.row(i) /= n;
        sys.y(i) /= n;
    }
    return sys;
}

}  // namespace

PKappaSolution solve_P(const RuledSurfaceData& X, double b) {
    if (!(b >= 1.0) || !std::isfinite(b)) throw Error(ErrorCode::OutOfDomain, "solve_P needs b >= 1");
    const auto sys = boundary_system(X, b);
    const auto ls = solve_least_squares(sys.A, sys.y);
    const double c = ls.x(0), alpha = ls.x(1), beta = ls.x(2);

    const Polynomial f{b, 1.0};
    const Polynomial f3 = (1.0 / (b * b * b)) * (f * f * f);
    PKappaSolution sol;
    sol.X = X;
    sol.b = b;
    sol.c = c;
    sol.residual = ls.residual;
    sol.P = (0.5 * X.base_scal) * (f * f) + c * Polynomial{-(X.kappa + b) / 12.0, -1.0 / 6.0} +
            alpha * f3 + beta * (Polynomial{0.0, 1.0} * f3);
    return sol;
}

std::function<double(double)> futaki_residual(const RuledSurfaceData& X) {
    return [X](double b) { return solve_P(X, b).residual; };
}

InteriorMinimum interior_minimum(const Polynomial& P) {
    const Polynomial dP = P.derivative();
    const Polynomial d2P = dP.derivative();
    constexpr int cells = 4096;
    InteriorMinimum best;
    best.value = std::numeric_limits<double>::infinity();
    double zl = -1.0, gl = dP(zl);
    for (int i = 1; i <= cells; ++i) {
        const double zr = -1.0 + 2.0 * i / cells;
        const double gr = dP(zr);
        // a minimum is where P' goes from negative to nonnegative
        if (gl < 0.0 && gr >= 0.0) {
            const double z = gr == 0.0 ? zr : brent_root([&](double t) { return dP(t); }, zl, zr).root;
            if (z > -1.0 && z < 1.0 && d2P(z) >= 0.0 && P(z) < best.value) {
                best.exists = true;
                best.value = P(z);
                best.z = z;
            }
        }
        zl = zr;
        gl = gr;
    }
    if (!best.exists) best.value = std::numeric_limits<double>::infinity();
    return best;
}

double min_P(int genus, int degree, double kappa) {
    return interior_minimum(solve_P(RuledSurfaceData::make(genus, degree, kappa)).P).value;
}

double kappa_zero(int genus, int degree, double tol) {
    auto m = [&](double k) { return min_P(genus, degree, k); };
    double lo = 1.0 + 1e-3, hi = 2.0;
    while (!(m(lo) < 0.0)) {
        lo = 1.0 + (lo - 1.0) / 10.0;
        if (lo - 1.0 < 1e-9) throw Error(ErrorCode::SearchFailed, "no kappa with min P < 0 found");
    }
    while (!(m(hi) > 0.0)) {
        hi *= 2.0;
        if (hi > 1e4) throw Error(ErrorCode::SearchFailed, "no kappa with min P > 0 found");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = m(mid);
        if (std::isfinite(v) && std::abs(v) < tol) return mid;
        (v < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-15 * hi) break;
    }
    throw Error(ErrorCode::SearchFailed, "bisection stalled before |m| < tol");
}

std::string_view to_string(CkemLabel label) {
    switch (label) {
        case CkemLabel::ExistsCKEM: return "ExistsCKEM";
        case CkemLabel::NegativeSomewhere: return "NegativeSomewhere";
        case CkemLabel::DoubleRoot: return "DoubleRoot";
    }
    return "?";
}

CkemLabel classify(const PKappaSolution& sol, double tol) {
    const auto m = interior_minimum(sol.P);
    if (!m.exists || m.value > tol) return CkemLabel::ExistsCKEM;
    if (m.value < -tol) return CkemLabel::NegativeSomewhere;
    return CkemLabel::DoubleRoot;
}

SweepRow sweep_row(int genus, int degree, double kappa) {
    const auto X = RuledSurfaceData::make(genus, degree, kappa);
    const auto sol = solve_P(X);
    SweepRow row;
    row.kappa = kappa;
    row.b = sol.b;
    row.c = sol.c;
    row.residual = sol.residual;
    row.minimum = interior_minimum(sol.P);
    row.label = classify(sol);
    return row;
}

std::string to_csv_line(const SweepRow& row) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return join_csv({fmt_num(row.kappa), fmt_num(row.b), fmt_num(row.c), fmt_num(row.residual),
                     fmt_num(row.minimum.value), fmt_num(row.minimum.exists ? row.minimum.z : nan),
                     std::string(to_string(row.label))});
}

}  // namespace kahler
