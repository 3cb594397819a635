#include "kahler/mabuchi.hpp"

#include "kahler/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace kahler {

double mabuchi_energy_amt(const SymplecticPotential& u, const PKappaSolution& sol) {
    const auto& rule = u.rule();
    const double b = sol.b;
    const double kappa = sol.X.kappa;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double z = rule.nodes[i];
        const double upp = u.upp()[i];
        if (!(upp > 0.0)) throw Error(ErrorCode::NotAdmissible, "u'' not positive");
        // (1-z^2) u'' is bounded and tends to 1, which keeps both integrands finite
        const double one_m = (1.0 - z) * (1.0 + z);
        const double ratio = one_m * upp;
        const double f3 = std::pow(z + b, 3);
        sum += rule.weights[i] *
               (sol.P(z) / f3 * (ratio - 1.0) / one_m - (z + kappa) / f3 * std::log(ratio));
    }
    return sum;
}

double mabuchi_gradient_amt(const SymplecticPotential& u, const PKappaSolution& sol,
                            const std::vector<double>& vpp) {
    const auto& rule = u.rule();
    if (vpp.size() != rule.size()) throw Error(ErrorCode::InvalidConfig, "direction size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double z = rule.nodes[i];
        const double f3 = std::pow(z + sol.b, 3);
        sum += rule.weights[i] * (sol.P(z) / f3 - (z + sol.X.kappa) / f3 / u.upp()[i]) * vpp[i];
    }
    return sum;
}

BumpDirection BumpDirection::make(double center, double radius, double amplitude) {
    if (!(radius > 0.0) || !(center - radius > -1.0) || !(center + radius < 1.0))
        throw Error(ErrorCode::BadDirection, "bump support must lie strictly inside (-1, 1)");
    if (!std::isfinite(amplitude)) throw Error(ErrorCode::BadDirection, "amplitude not finite");
    return {center, radius, amplitude};
}

double BumpDirection::operator()(double z) const {
    const double x = (z - center) / radius;
    if (std::abs(x) >= 1.0) return 0.0;
    return amplitude * std::exp(-1.0 / ((1.0 - x) * (1.0 + x)));
}

QuadratureRule probe_rule(const BumpDirection& bump, int order_per_panel) {
    return composite_rule({-1.0, bump.lo(), bump.hi(), 1.0}, order_per_panel);
}

SymplecticPotential bumped_potential(const QuadratureRule& rule, double kappa,
                                     const BumpDirection& bump, double k) {
    std::vector<double> upp(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double z = rule.nodes[i];
        upp[i] = 1.0 / ((1.0 - z) * (1.0 + z)) + k * bump(z);
    }
    return SymplecticPotential(rule, std::move(upp), kappa);
}

double bump_slope(const PKappaSolution& sol, const BumpDirection& bump, int order) {
    const auto rule = gauss_legendre(order, bump.lo(), bump.hi());
    return integrate(rule, [&](double z) { return sol.P(z) * bump(z) / std::pow(z + sol.b, 3); });
}

BumpDirection auto_bump(const PKappaSolution& sol, double target_slope) {
    if (!(target_slope < 0.0)) throw Error(ErrorCode::BadDirection, "target slope must be negative");
    const auto m = interior_minimum(sol.P);
    if (!m.exists || !(m.value < 0.0))
        throw Error(ErrorCode::BadDirection, "P has no negative interior minimum");
    auto P = [&](double z) { return sol.P(z); };
    // P(+-1) = 0 exactly, so search for the sign change just inside the endpoints
    const double eps = 1e-9;
    const double zl = P(-1.0 + eps) > 0.0 ? brent_root(P, -1.0 + eps, m.z).root : -1.0;
    const double zr = P(1.0 - eps) > 0.0 ? brent_root(P, m.z, 1.0 - eps).root : 1.0;
    const double center = 0.5 * (zl + zr);
    const double radius = 0.45 * (zr - zl);
    auto unit = BumpDirection::make(center, radius, 1.0);
    const double s1 = bump_slope(sol, unit);
    return BumpDirection::make(center, radius, target_slope / s1);
}

double affine_log_slope(const std::vector<double>& k, const std::vector<double>& e) {
    Eigen::MatrixXd A(k.size(), 3);
    Eigen::VectorXd y(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = k[i];
        A(i, 2) = std::log(k[i]);
        y(i) = e[i];
    }
    return solve_least_squares(A, y).x(1);
}

ProbeResult unboundedness_probe(const PKappaSolution& sol, const BumpDirection& bump,
                                const std::vector<double>& k_list, int order_per_panel) {
    // the bump must sit where P < 0
    for (int i = 0; i <= 1000; ++i) {
        const double z = bump.lo() + (bump.hi() - bump.lo()) * i / 1000.0;
        if (!(sol.P(z) < 0.0))
            throw Error(ErrorCode::BadDirection,
                        "bump support leaves the region P < 0 at z = " + std::to_string(z));
    }
    if (!(bump.amplitude > 0.0)) throw Error(ErrorCode::BadDirection, "bump amplitude must be positive");

    const auto rule = probe_rule(bump, order_per_panel);
    ProbeResult out;
    out.predicted_slope = bump_slope(sol, bump);
    std::vector<double> fk, fe;
    for (double k : k_list) {
        if (!(k >= 0.0)) throw Error(ErrorCode::InvalidConfig, "probe k must be nonnegative");
        const double e = mabuchi_energy_amt(bumped_potential(rule, sol.X.kappa, bump, k), sol);
        out.k.push_back(k);
        out.energy.push_back(e);
        if (k > 0.0) {
            fk.push_back(k);
            fe.push_back(e);
        }
        out.slope_fit.push_back(fk.size() >= 3 ? affine_log_slope(fk, fe)
                                               : std::numeric_limits<double>::quiet_NaN());
    }
    out.strictly_decreasing = true;
    for (std::size_t i = 1; i < out.energy.size(); ++i)
        if (!(out.energy[i] < out.energy[i - 1])) out.strictly_decreasing = false;
    // fit on the upper half of the positive k values
    if (fk.size() >= 3) {
        const std::size_t start = fk.size() >= 6 ? fk.size() / 2 - 1 : 0;
        out.fitted_slope = affine_log_slope({fk.begin() + start, fk.end()}, {fe.begin() + start, fe.end()});
    } else {
        out.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    }
    out.diverges = out.strictly_decreasing && out.fitted_slope < 0.0;
    return out;
}

ProfilePath straight_path(const Profile& from, const Profile& to) {
    return [from, to](double t, double z) {
        const Jet2 a = from.jet(z);
        const Jet2 b = to.jet(z);
        // u''_t = (1-t)/Theta_a + t/Theta_b
        const Jet2 denom = (1.0 - t) * b + t * a;
        PathPoint pt;
        pt.theta = a * b / denom;
        pt.udot_pp = (a.v - b.v) / (a.v * b.v);
        return pt;
    };
}

double mabuchi_path_integral(const ProfilePath& path, const PKappaSolution& sol,
                             const NumericConfig& cfg) {
    const auto& X = sol.X;
    const auto w = sol.weight();
    const auto tr = gauss_legendre(cfg.path_order, 0.0, 1.0);
    const auto zr = gauss_legendre(cfg.quad_order);
    const auto sub = gauss_legendre(64);

    auto profile_at = [&](double t) {
        return Profile::derived([&path, t](double z) { return path(t, z).theta; }, X.kappa);
    };
    const double c = weighted_average_c(profile_at(0.0), X, w, zr);

    double total = 0.0;
    for (std::size_t a = 0; a < tr.size(); ++a) {
        const double t = tr.nodes[a];
        const auto th = profile_at(t);
        double acc = 0.0;
        for (std::size_t i = 0; i < zr.size(); ++i) {
            const double z = zr.nodes[i];
            if (!(th(z) > 0.0))
                throw Error(ErrorCode::NotAdmissible,
                            "path leaves the admissible set at t = " + std::to_string(t));
            const double W = weighted_scalar_curvature(th, X, w, z);
            // udot(z) = int_{-1}^{z} (z - s) udot''(s) ds
            const double half = 0.5 * (z + 1.0);
            double udot = 0.0;
            for (std::size_t m = 0; m < sub.size(); ++m) {
                const double s = -1.0 + half * (sub.nodes[m] + 1.0);
                udot += sub.weights[m] * half * (z - s) * path(t, s).udot_pp;
            }
            acc += zr.weights[i] * udot * (W - c) * (z + X.kappa) * std::pow(z + w.b, -(w.p + 1.0));
        }
        total += tr.weights[a] * acc;
    }
    if (!std::isfinite(total)) throw Error(ErrorCode::NonFiniteIntegrand, "path integral not finite");
    return total;
}

double calibrate_amt_constant(const PKappaSolution& sol, const Profile& target,
                              const NumericConfig& cfg) {
    const double path = mabuchi_path_integral(straight_path(Profile::canonical(sol.X.kappa), target), sol, cfg);
    const double closed = mabuchi_energy_amt(to_symplectic(target, gauss_legendre(cfg.quad_order)), sol);
    if (closed == 0.0) throw Error(ErrorCode::OutOfDomain, "calibration endpoint has zero energy");
    return path / closed;
}

}  // namespace kahler
