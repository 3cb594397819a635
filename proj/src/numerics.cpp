#include "kahler/numerics.hpp"

#include "kahler/error.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_roots.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace kahler {

const NumericConfig& default_config() {
    static const NumericConfig config{};
    return config;
}

namespace {

struct GslSilencer {
    GslSilencer() { gsl_set_error_handler_off(); }
};
const GslSilencer silencer;

}  // namespace

QuadratureRule gauss_legendre(int order, double lo, double hi) {
    if (order < 1) throw Error(ErrorCode::InvalidConfig, "quadrature order must be positive");
    if (!(hi > lo)) throw Error(ErrorCode::InvalidConfig, "quadrature interval is empty");
    // Newton on P_n from Tricomi's initial guesses; symmetric pairs filled together.
    QuadratureRule rule;
    rule.lo = lo;
    rule.hi = hi;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int n = order;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = rule.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = mid;
    return rule;
}

QuadratureRule composite_rule(const std::vector<double>& breaks, int order_per_panel) {
    if (breaks.size() < 2) throw Error(ErrorCode::InvalidConfig, "need at least two breakpoints");
    QuadratureRule rule;
    rule.lo = breaks.front();
    rule.hi = breaks.back();
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i]))
            throw Error(ErrorCode::InvalidConfig, "breakpoints must increase strictly");
        auto panel = gauss_legendre(order_per_panel, breaks[i], breaks[i + 1]);
        rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
        rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
    }
    return rule;
}

double integrate(const QuadratureRule& rule, const std::function<double(double)>& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double v = f(rule.nodes[i]);
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonFiniteIntegrand,
                        "integrand not finite at x = " + std::to_string(rule.nodes[i]));
        sum += rule.weights[i] * v;
    }
    return sum;
}

double integrate_samples(const QuadratureRule& rule, const std::vector<double>& values) {
    if (values.size() != rule.size())
        throw Error(ErrorCode::InvalidConfig, "sample count does not match rule");
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw Error(ErrorCode::NonFiniteIntegrand, "sample not finite");
        sum += rule.weights[i] * values[i];
    }
    return sum;
}

namespace {

double gsl_trampoline(double x, void* params) {
    return (*static_cast<const std::function<double(double)>*>(params))(x);
}

}  // namespace

RootResult brent_root(const std::function<double(double)>& f, double lo, double hi, double xtol,
                      int max_iter) {
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw Error(ErrorCode::NonFiniteIntegrand, "function not finite at bracket ends");
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo > 0) == (fhi > 0))
        throw Error(ErrorCode::NoBracket, "no sign change on [" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + "]");

    std::unique_ptr<gsl_root_fsolver, decltype(&gsl_root_fsolver_free)> solver(
        gsl_root_fsolver_alloc(gsl_root_fsolver_brent), &gsl_root_fsolver_free);
    gsl_function F;
    F.function = &gsl_trampoline;
    F.params = const_cast<std::function<double(double)>*>(&f);
    gsl_root_fsolver_set(solver.get(), &F, lo, hi);

    for (int it = 1; it <= max_iter; ++it) {
        if (gsl_root_fsolver_iterate(solver.get()) != GSL_SUCCESS)
            throw Error(ErrorCode::NoConvergence, "Brent iteration failed");
        const double a = gsl_root_fsolver_x_lower(solver.get());
        const double b = gsl_root_fsolver_x_upper(solver.get());
        const double r = gsl_root_fsolver_root(solver.get());
        if (gsl_root_test_interval(a, b, xtol, xtol) == GSL_SUCCESS || f(r) == 0.0)
            return {r, std::abs(f(r)), it};
    }
    throw Error(ErrorCode::NoConvergence, "Brent exceeded iteration budget");
}

LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                                       double rank_tol) {
    if (A.rows() != y.size()) throw Error(ErrorCode::InvalidConfig, "dimension mismatch");
    if (A.rows() < A.cols()) throw Error(ErrorCode::RankDeficient, "underdetermined system");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(rank_tol);
    if (qr.rank() < A.cols())
        throw Error(ErrorCode::RankDeficient,
                    "numerical rank " + std::to_string(qr.rank()) + " < " + std::to_string(A.cols()));
    LeastSquaresResult out;
    out.x = qr.solve(y);
    out.residual = (A * out.x - y).norm();
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InvalidConfig, "slope fit needs two or more points");
    Eigen::MatrixXd A(x.size(), 2);
    Eigen::VectorXd b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0))
            throw Error(ErrorCode::OutOfDomain, "log-log fit needs positive data");
        A(i, 0) = 1.0;
        A(i, 1) = std::log(x[i]);
        b(i) = std::log(y[i]);
    }
    return solve_least_squares(A, b).x(1);
}

}  // namespace kahler
