#pragma once

#include "kahler/calabi_profile.hpp"
#include "kahler/ckem_solver.hpp"
#include "kahler/symplectic_potential.hpp"

#include <functional>
#include <vector>

namespace kahler {

/// Closed-form energy on the ruled surface (defined up to a positive factor):
///   int P/(z+b)^3 (u'' - u_k'') dz - int (z+kappa)/(z+b)^3 log(u''/u_k'') dz.
double mabuchi_energy_amt(const SymplecticPotential& u, const PKappaSolution& sol);

/// Directional derivative along v, given by v'' at the nodes of u's rule.
double mabuchi_gradient_amt(const SymplecticPotential& u, const PKappaSolution& sol,
                            const std::vector<double>& vpp);

/// amplitude * exp(-1 / (1 - x^2)), x = (z - center) / radius, zero outside |x| < 1.
struct BumpDirection {
    double center = 0.0;
    double radius = 0.5;
    double amplitude = 1.0;

    static BumpDirection make(double center, double radius, double amplitude);
    double operator()(double z) const;
    double lo() const { return center - radius; }
    double hi() const { return center + radius; }
};

/// Composite rule whose panels break at the bump support.
QuadratureRule probe_rule(const BumpDirection& bump, int order_per_panel = 128);

/// u_k'' = u_kappa'' + k * bump on the given rule.
SymplecticPotential bumped_potential(const QuadratureRule& rule, double kappa,
                                     const BumpDirection& bump, double k);

/// int P f / (z+b)^3 dz, the asymptotic slope of the probe energies.
double bump_slope(const PKappaSolution& sol, const BumpDirection& bump, int order = 256);

/// Bump centred in the negativity interval of P around its interior minimum,
/// amplitude chosen so that bump_slope equals target_slope.
BumpDirection auto_bump(const PKappaSolution& sol, double target_slope = -2.0);

struct ProbeResult {
    std::vector<double> k;
    std::vector<double> energy;
    std::vector<double> slope_fit;  // running fit; NaN until enough points
    double predicted_slope = 0.0;
    double fitted_slope = 0.0;
    bool strictly_decreasing = false;
    bool diverges = false;
};

ProbeResult unboundedness_probe(const PKappaSolution& sol, const BumpDirection& bump,
                                const std::vector<double>& k_list, int order_per_panel = 128);

/// Slope of E(k) ~ a + s k + g log k fitted over the supplied points.
double affine_log_slope(const std::vector<double>& k, const std::vector<double>& e);

/// Profile Theta_t and the velocity of u'' at (t, z).
struct PathPoint {
    Jet2 theta;
    double udot_pp = 0.0;
};
using ProfilePath = std::function<PathPoint(double t, double z)>;

/// Straight segment in u'' between two profiles.
ProfilePath straight_path(const Profile& from, const Profile& to);

/// Integral over t in [0, 1] of the 1-form  udot -> int udot (W - c)(z+kappa)(z+b)^{-(p+1)} dz.
/// udot is rebuilt from its second derivative with udot(-1) = udot'(-1) = 0; the affine
/// ambiguity drops out on the Futaki curve. c is evaluated at t = 0.
double mabuchi_path_integral(const ProfilePath& path, const PKappaSolution& sol,
                             const NumericConfig& cfg = default_config());

/// Ratio of the path integral along the straight path u_kappa -> u to the closed form.
double calibrate_amt_constant(const PKappaSolution& sol, const Profile& target,
                              const NumericConfig& cfg = default_config());

}  // namespace kahler
