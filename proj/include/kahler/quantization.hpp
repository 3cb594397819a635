#pragma once

#include "kahler/numerics.hpp"
#include "kahler/polynomial.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace kahler {

// S^1-invariant metrics on the projective line, class 2 pi c_1(O(1)).
// Coordinates: y = log|w| on C*, round momentum s = e^{2y}/(1+e^{2y}) in (0, 1).
// A metric is a convex psi(y) = psi_0(y) + phi, psi_0 = -1/2 log(1-s); its momentum is
// mu = psi', the profile S(mu) = psi'' and Scal = -d^2S/dmu^2.

/// Killing potential f = mu + b0 on [b0, b0+1]; without b0 the field is zero and f = 1.
struct ToyModel {
    std::optional<double> b0;
    double p = 4.0;

    static ToyModel weighted(double b0, double p);
    static ToyModel unweighted(double p);

    bool has_field() const { return b0.has_value(); }
    double f(double mu) const { return b0 ? mu + *b0 : 1.0; }
    nlohmann::json to_json() const;
};

struct SpectrumData {
    int k = 1;
    std::vector<double> lambda;    // b0 + j/k
    std::vector<double> lambda_p;  // lambda^{1-p} - c/(4k) lambda^{-(p+1)}
    double c = 0.0;
    double trace_p = 0.0;          // sum of lambda_p
};

/// Gauss nodes in s with the logs needed by every monomial integral.
struct MomentumGrid {
    QuadratureRule rule;
    std::vector<double> log_s, log_1ms;

    static std::shared_ptr<const MomentumGrid> make(int order = default_config().toy_order);
    std::size_t size() const { return rule.size(); }
};
using GridPtr = std::shared_ptr<const MomentumGrid>;

/// Potential sampled at the grid nodes: phi and the first four y-derivatives of psi.
class RadialPotential {
public:
    static RadialPotential round(GridPtr grid);
    /// phi = g(s) for a polynomial g.
    static RadialPotential perturbed(GridPtr grid, const Polynomial& g);
    /// Random admissible perturbation, profile factor psi''/(2s(1-s)) kept above 0.2.
    static RadialPotential random(GridPtr grid, std::mt19937_64& rng, double amplitude = 0.3);
    /// (1-t) a + t b.
    static RadialPotential lerp(const RadialPotential& a, const RadialPotential& b, double t);

    /// Builds from explicit samples (used by the Fubini-Study map).
    RadialPotential(GridPtr grid, std::vector<double> phi, std::array<std::vector<double>, 4> d);

    RadialPotential shifted(double s) const;

    const MomentumGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const std::vector<double>& phi() const { return phi_; }
    double mu(std::size_t i) const { return d_[0][i]; }
    double S(std::size_t i) const { return d_[1][i]; }
    double dS(std::size_t i) const { return dS_[i]; }
    double d2S(std::size_t i) const { return d2S_[i]; }
    /// dmu / ds at node i: the density of vol_omega / (2 pi) in s.
    double density(std::size_t i) const;
    const std::array<std::vector<double>, 4>& derivatives() const { return d_; }

    /// Interior positivity plus S -> 0 and dS/dmu -> +-2 at the poles.
    bool admissible(double tol = default_config().toy_boundary_tol) const;
    /// (mu_i, S_i) pairs.
    std::vector<std::pair<double, double>> profile() const;

    /// The polynomial g when phi = g(s); lets paths between such potentials stay exact.
    const std::optional<Polynomial>& generator() const { return g_; }

private:
    GridPtr grid_;
    std::vector<double> phi_;
    std::array<std::vector<double>, 4> d_;
    std::vector<double> dS_, d2S_;
    std::optional<Polynomial> g_;
};

/// Diagonal Hermitian form in the monomial basis w^j, j = 0..k.
struct HermitianNorms {
    int k = 1;
    std::vector<double> h;
    nlohmann::json to_json() const;
};

/// lambda_j = b0 + j/k (all 1 without a field), no sign condition on lambda(p).
std::vector<double> lattice_eigenvalues(int k, const ToyModel& model);
/// Throws WeightSignError when some lambda(p)_j <= 0.
SpectrumData eigenvalues(int k, const ToyModel& model);

/// Weighted scalar curvature f^2 Scal - 2(p-1) f Lap f - p(p-1)|df|^2 at node i.
double toy_weighted_scal(const RadialPotential& phi, const ToyModel& model, std::size_t i);
double c_top(const RadialPotential& phi, const ToyModel& model);

/// int f^{1-p} vol_{k omega}; independent of the metric in the class.
double weighted_volume(int k, const ToyModel& model, const MomentumGrid& grid);
/// Normalising constant of the Fubini-Study map.
double C_k(int k, const ToyModel& model, const MomentumGrid& grid);

HermitianNorms hilb(const RadialPotential& phi, int k, const ToyModel& model);
RadialPotential fs(const HermitianNorms& H, const ToyModel& model, const GridPtr& grid);

/// Psi(f) sum_j Phi(lambda_j) |w^j|^2 / ||w^j||^2_Psi at every node.
std::vector<double> bergman_density(const RadialPotential& phi, int k, const ToyModel& model,
                                    const std::function<double(double)>& Psi,
                                    const std::function<double(double)>& Phi);
/// f^{1-p} sum_j |w^j|^2 / h_j with h = hilb(phi).
std::vector<double> rho_p(const RadialPotential& phi, int k, const ToyModel& model);

/// int of nodal values against vol_{k omega_phi}.
double integrate_vol(const RadialPotential& phi, int k, const std::vector<double>& values);

struct ExpansionReport {
    std::vector<int> k;
    std::vector<double> residual_sup;   // with the Scal correction
    std::vector<double> leading_sup;    // f^{1-p} only
    std::vector<double> slope_running;  // slope between consecutive k; NaN for the first
    double slope = 0.0;
    double leading_slope = 0.0;
};
ExpansionReport expansion_check(const RadialPotential& phi, const ToyModel& model,
                                const std::vector<int>& k_list);

struct BalancedResult {
    HermitianNorms H;
    std::optional<RadialPotential> phi;
    bool converged = false;
    int iterations = 0;
    std::vector<double> history;
};

/// Plain (or relaxed) iteration H -> hilb(fs(H)) started at hilb(phi0).
/// Throws NoConvergence when max_iter is exhausted or the iterate escapes the grid.
BalancedResult balanced_iterate(const RadialPotential& phi0, int k, const ToyModel& model,
                                int max_iter = default_config().balanced_max_iter,
                                double tol = default_config().balanced_tol,
                                double relaxation = 1.0);

/// sup |rho - C_k f^{1-p}| for the metric fs(H).
double balanced_residual(const HermitianNorms& H, const ToyModel& model, const GridPtr& grid);

/// sum_j (j/k) lambda_j(p) (1 - T(H)_j / h_j), T = hilb o fs. Independent of H because T
/// commutes with the C* action; a nonzero value rules out balanced metrics at level k.
double finite_futaki(int k, const ToyModel& model, const GridPtr& grid);

double functional_I(const HermitianNorms& H, const SpectrumData& spec);
/// Block version: sum over blocks of lambda(p) log det.
double functional_I(const std::vector<Eigen::MatrixXcd>& blocks, const std::vector<double>& lambda_p);

/// Path integral of 2k C_k int phidot f^{1-p} vol_{k omega} along the straight segment a -> b.
double aubin_I_segment(const RadialPotential& a, const RadialPotential& b, int k,
                       const ToyModel& model, int path_order = default_config().path_order);
/// Same from the reference metric.
double aubin_I(const RadialPotential& phi, int k, const ToyModel& model,
               int path_order = default_config().path_order);

double functional_L(const RadialPotential& phi, int k, const ToyModel& model);
double functional_Z(const HermitianNorms& H, const ToyModel& model, const GridPtr& grid);

/// h_j(t) = h_j(0) exp(t A_j); A must be traceless on every eigenvalue block.
HermitianNorms geodesic(const HermitianNorms& H0, const std::vector<double>& A, double t,
                        const ToyModel& model);

/// d/dt Z(H exp(tA)) at t = 0:  sum_j A_j [lambda(p)_j - int f^{1-p} |w^j|^2 / h_j vol_{k omega}],
/// all on the metric fs(H). Vanishes at a balanced point.
double geodesic_slope(const HermitianNorms& H, const std::vector<double>& A, const ToyModel& model,
                      const GridPtr& grid);

/// Weighted Mabuchi energy from the reference: -int phidot (W - c) f^{-(p+1)} vol along the
/// straight path.
double toy_mabuchi(const RadialPotential& phi, const ToyModel& model,
                   int path_order = default_config().path_order);

struct AlmostBalancedReport {
    std::vector<int> k;
    std::vector<double> eps_hat;  // k^{-1} [Z(hilb phi) - Z(hilb phi_star)]_-
};
AlmostBalancedReport almost_balanced_check(const RadialPotential& phi_star, const RadialPotential& phi,
                                           const ToyModel& model, const std::vector<int>& k_list);

}  // namespace kahler
