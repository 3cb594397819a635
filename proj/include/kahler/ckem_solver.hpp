#pragma once

#include "kahler/calabi_profile.hpp"
#include "kahler/polynomial.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace kahler {

/// Larger root of b^2 - 2 kappa b + 1; the Futaki invariant of the weight vanishes there.
double b_kappa(double kappa);

/// Quartic P with P(+-1) = 0, P'(1) = -2(1+kappa), P'(-1) = 2(kappa-1) and constant
/// weighted curvature c for the weight (z+b)^4.
struct PKappaSolution {
    RuledSurfaceData X;
    double b = 0.0;
    double c = 0.0;
    Polynomial P;
    double residual = 0.0;  // least-squares defect of the boundary system

    Profile profile() const { return Profile::polynomial(P, X.kappa); }
    WeightData weight() const { return {b, 4.0}; }
};

/// Solves at an arbitrary b >= 1; the defect is nonzero off the Futaki curve.
PKappaSolution solve_P(const RuledSurfaceData& X, double b);
inline PKappaSolution solve_P(const RuledSurfaceData& X) { return solve_P(X, b_kappa(X.kappa)); }

/// b -> least-squares defect of the (row-normalised) boundary system.
std::function<double(double)> futaki_residual(const RuledSurfaceData& X);

struct InteriorMinimum {
    bool exists = false;   // false: P has no local minimum inside (-1, 1)
    double value = 0.0;
    double z = 0.0;
};

/// Smallest local minimum of P over the open interval, from the roots of P'.
InteriorMinimum interior_minimum(const Polynomial& P);

/// m(kappa): interior minimum of P_kappa, +infinity when there is none.
double min_P(int genus, int degree, double kappa);

/// Threshold where min P_kappa crosses zero.
double kappa_zero(int genus, int degree, double tol = default_config().kappa0_tol);

enum class CkemLabel { ExistsCKEM, NegativeSomewhere, DoubleRoot };
std::string_view to_string(CkemLabel label);

CkemLabel classify(const PKappaSolution& sol, double tol = default_config().classify_tol);

struct SweepRow {
    double kappa = 0.0;
    double b = 0.0;
    double c = 0.0;
    double residual = 0.0;
    InteriorMinimum minimum;
    CkemLabel label = CkemLabel::ExistsCKEM;
};

SweepRow sweep_row(int genus, int degree, double kappa);

inline constexpr std::string_view kSweepHeader = "kappa,b_kappa,c,futaki_residual,min_P,argmin_z,label";
std::string to_csv_line(const SweepRow& row);

}  // namespace kahler
