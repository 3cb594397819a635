#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace kahler {

/// Every tolerance and default discretization in one place.
struct NumericConfig {
    int quad_order = 128;         // ruled-surface z-grid
    int toy_order = 256;          // toy model momentum grid
    int path_order = 24;          // Gauss nodes along a path parameter t
    double root_xtol = 1e-14;
    int root_max_iter = 200;
    double rank_tol = 1e-12;      // relative, on the R diagonal
    double boundary_tol = 1e-9;
    double admissible_boundary_tol = 1e-6;  // ruled surface, via extrapolation
    double toy_boundary_tol = 1e-9;
    double classify_tol = 1e-8;
    double kappa0_tol = 1e-8;
    double balanced_tol = 1e-10;
    int balanced_max_iter = 500;
};

const NumericConfig& default_config();

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo = -1.0;
    double hi = 1.0;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule of the given order on [lo, hi].
QuadratureRule gauss_legendre(int order, double lo = -1.0, double hi = 1.0);

/// Concatenated Gauss-Legendre panels between consecutive breakpoints.
QuadratureRule composite_rule(const std::vector<double>& breaks, int order_per_panel);

/// Throws NonFiniteIntegrand if f is NaN/Inf at any node.
double integrate(const QuadratureRule& rule, const std::function<double(double)>& f);

/// Weighted sum of precomputed samples at rule nodes.
double integrate_samples(const QuadratureRule& rule, const std::vector<double>& values);

struct RootResult {
    double root;
    double residual;
    int iterations;
};

/// Brent's method on a sign-changing bracket.
RootResult brent_root(const std::function<double(double)>& f, double lo, double hi,
                      double xtol = default_config().root_xtol,
                      int max_iter = default_config().root_max_iter);

struct LeastSquaresResult {
    Eigen::VectorXd x;
    double residual;  // 2-norm of A x - y
};

/// Column-pivoted QR; throws RankDeficient when numerical rank < cols.
LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                                       double rank_tol = default_config().rank_tol);

/// Slope of the least-squares line through (log x, log y).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kahler
