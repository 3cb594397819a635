#include "kahler/quantization.hpp"

#include "kahler/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace kahler {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// D = d/dy acting on polynomials in s, since ds/dy = 2s(1-s).
Polynomial Dy(const Polynomial& q) { return Polynomial{0.0, 2.0, -2.0} * q.derivative(); }

double lagrange_extrapolate(const double* x, const double* y, int n, double at) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double l = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) l *= (at - x[j]) / (x[i] - x[j]);
        sum += l * y[i];
    }
    return sum;
}

double log_sum_exp(const std::vector<double>& a) {
    const double m = *std::max_element(a.begin(), a.end());
    double s = 0.0;
    for (double v : a) s += std::exp(v - m);
    return m + std::log(s);
}

// log |w^j|^2_{k psi} at node i
inline double log_monomial(const MomentumGrid& g, const RadialPotential& phi, int k, int j,
                           std::size_t i) {
    return j * g.log_s[i] + (k - j) * g.log_1ms[i] - 2.0 * k * phi.phi()[i];
}

const GridPtr& default_grid() {
    static const GridPtr grid = MomentumGrid::make();
    return grid;
}

}  // namespace

ToyModel ToyModel::weighted(double b0, double p) {
    if (!(b0 > 0.0) || !std::isfinite(b0)) throw Error(ErrorCode::InvalidConfig, "b0 must be positive");
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidConfig, "p must be finite");
    return ToyModel{b0, p};
}

ToyModel ToyModel::unweighted(double p) {
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidConfig, "p must be finite");
    return ToyModel{std::nullopt, p};
}

nlohmann::json ToyModel::to_json() const {
    nlohmann::json j;
    j["b0"] = b0 ? nlohmann::json(*b0) : nlohmann::json("inf");
    j["p"] = p;
    return j;
}

nlohmann::json HermitianNorms::to_json() const { return {{"k", k}, {"h", h}}; }

GridPtr MomentumGrid::make(int order) {
    static std::mutex mutex;
    static std::map<int, GridPtr> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    auto g = std::make_shared<MomentumGrid>();
    g->rule = gauss_legendre(order, 0.0, 1.0);
    for (double s : g->rule.nodes) {
        g->log_s.push_back(std::log(s));
        g->log_1ms.push_back(std::log1p(-s));
    }
    cache.emplace(order, g);
    return g;
}

// ---------------------------------------------------------------- potentials

RadialPotential::RadialPotential(GridPtr grid, std::vector<double> phi,
                                 std::array<std::vector<double>, 4> d)
    : grid_(std::move(grid)), phi_(std::move(phi)), d_(std::move(d)) {
    for (const auto& v : d_)
        if (v.size() != grid_->size()) throw Error(ErrorCode::InvalidConfig, "potential size mismatch");
    if (phi_.size() != grid_->size()) throw Error(ErrorCode::InvalidConfig, "potential size mismatch");
    dS_.resize(phi_.size());
    d2S_.resize(phi_.size());
    for (std::size_t i = 0; i < phi_.size(); ++i) {
        const double p2 = d_[1][i], p3 = d_[2][i], p4 = d_[3][i];
        dS_[i] = p3 / p2;
        d2S_[i] = (p4 * p2 - p3 * p3) / (p2 * p2 * p2);
    }
}

RadialPotential RadialPotential::perturbed(GridPtr grid, const Polynomial& g) {
    // sigma = 2s(1-s), A = dmu/ds: psi'' = sigma A and every further y-derivative adds a
    // factor sigma. Keeping sigma factored (1 - s is exact for s >= 1/2) avoids the
    // cancellation that expanded polynomials suffer near the poles.
    const Polynomial sigma{0.0, 2.0, -2.0};
    const Polynomial mu = Polynomial{0.0, 1.0} + sigma * g.derivative();
    const Polynomial A = mu.derivative(), dA = A.derivative(), d2A = dA.derivative();
    const auto& s = grid->rule.nodes;
    const std::size_t n = s.size();
    std::vector<double> phi(n);
    std::array<std::vector<double>, 4> d;
    for (auto& v : d) v.resize(n);
    std::vector<double> dS(n), d2S(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = s[i], sg = 2.0 * x * (1.0 - x), sg1 = 2.0 - 4.0 * x, sg2 = -4.0;
        const double a = A(x), a1 = dA(x), a2 = d2A(x);
        const double q1 = sg1 * a + sg * a1;                   // (sigma A)'
        const double q2 = sg2 * a + 2.0 * sg1 * a1 + sg * a2;  // (sigma A)''
        phi[i] = g(x);
        d[0][i] = mu(x);
        d[1][i] = sg * a;
        d[2][i] = sg * q1;
        d[3][i] = sg * (sg1 * q1 + sg * q2);
        dS[i] = q1 / a;
        d2S[i] = (a * q2 - a1 * q1) / (a * a * a);
    }
    RadialPotential out(std::move(grid), std::move(phi), std::move(d));
    out.dS_ = std::move(dS);
    out.d2S_ = std::move(d2S);
    out.g_ = g;
    return out;
}

RadialPotential RadialPotential::round(GridPtr grid) { return perturbed(std::move(grid), Polynomial{0.0}); }

RadialPotential RadialPotential::random(GridPtr grid, std::mt19937_64& rng, double amplitude) {
    std::uniform_real_distribution<double> coeff(-amplitude, amplitude);
    const Polynomial two_s_1ms{0.0, 2.0, -2.0};
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> c(5, 0.0);
        for (int n = 1; n <= 4; ++n) c[n] = coeff(rng);
        const Polynomial g(c);
        // psi'' = 2s(1-s) A(s); A must stay away from zero on [0, 1]
        const auto [A, rem] = Dy(Polynomial{0.0, 1.0} + Dy(g)).divmod(two_s_1ms);
        bool ok = true;
        for (int i = 0; i <= 400 && ok; ++i) ok = A(i / 400.0) > 0.2;
        if (ok) return perturbed(grid, g);
    }
    throw Error(ErrorCode::NotAdmissible, "could not draw an admissible random potential");
}

RadialPotential RadialPotential::lerp(const RadialPotential& a, const RadialPotential& b, double t) {
    if (a.grid_ != b.grid_) throw Error(ErrorCode::InvalidConfig, "potentials live on different grids");
    if (a.g_ && b.g_) return perturbed(a.grid_, (1.0 - t) * *a.g_ + t * *b.g_);
    const std::size_t n = a.phi_.size();
    std::vector<double> phi(n);
    std::array<std::vector<double>, 4> d;
    for (auto& v : d) v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = (1.0 - t) * a.phi_[i] + t * b.phi_[i];
        for (int m = 0; m < 4; ++m) d[m][i] = (1.0 - t) * a.d_[m][i] + t * b.d_[m][i];
    }
    return RadialPotential(a.grid_, std::move(phi), std::move(d));
}

RadialPotential RadialPotential::shifted(double s) const {
    auto out = *this;
    for (auto& v : out.phi_) v += s;
    if (out.g_) *out.g_ = *out.g_ + Polynomial{s};
    return out;
}

double RadialPotential::density(std::size_t i) const {
    const double s = grid_->rule.nodes[i];
    return d_[1][i] / (2.0 * s * (1.0 - s));
}

bool RadialPotential::admissible(double tol) const {
    for (std::size_t i = 0; i < phi_.size(); ++i)
        if (!(d_[1][i] > 0.0) || !std::isfinite(d_[1][i])) return false;
    constexpr int n = 4;
    const auto& s = grid_->rule.nodes;
    const std::size_t m = s.size();
    double xl[n], Sl[n], dl[n], xr[n], Sr[n], dr[n];
    for (int i = 0; i < n; ++i) {
        xl[i] = s[i];
        Sl[i] = S(i);
        dl[i] = dS(i);
        xr[i] = s[m - 1 - i];
        Sr[i] = S(m - 1 - i);
        dr[i] = dS(m - 1 - i);
    }
    return std::abs(lagrange_extrapolate(xl, Sl, n, 0.0)) < tol &&
           std::abs(lagrange_extrapolate(xr, Sr, n, 1.0)) < tol &&
           std::abs(lagrange_extrapolate(xl, dl, n, 0.0) - 2.0) < tol &&
           std::abs(lagrange_extrapolate(xr, dr, n, 1.0) + 2.0) < tol;
}

std::vector<std::pair<double, double>> RadialPotential::profile() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < phi_.size(); ++i) out.emplace_back(mu(i), S(i));
    return out;
}

// ---------------------------------------------------------------- curvature and spectrum

double toy_weighted_scal(const RadialPotential& phi, const ToyModel& model, std::size_t i) {
    const double scal = -phi.d2S(i);
    if (!model.has_field()) return scal;
    const double p = model.p;
    const double f = model.f(phi.mu(i));
    return f * f * scal + 2.0 * (p - 1.0) * f * phi.dS(i) - p * (p - 1.0) * phi.S(i);
}

double c_top(const RadialPotential& phi, const ToyModel& model) {
    const auto& g = phi.grid();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double m = g.rule.weights[i] * phi.density(i) * std::pow(model.f(phi.mu(i)), -(model.p + 1.0));
        num += m * toy_weighted_scal(phi, model, i);
        den += m;
    }
    return num / den;
}

std::vector<double> lattice_eigenvalues(int k, const ToyModel& model) {
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be at least 1");
    std::vector<double> out;
    for (int j = 0; j <= k; ++j) out.push_back(model.has_field() ? *model.b0 + static_cast<double>(j) / k : 1.0);
    return out;
}

SpectrumData eigenvalues(int k, const ToyModel& model) {
    const auto lattice = lattice_eigenvalues(k, model);
    SpectrumData sp;
    sp.k = k;
    sp.c = c_top(RadialPotential::round(default_grid()), model);
    const double p = model.p;
    for (int j = 0; j <= k; ++j) {
        const double lam = lattice[j];
        const double lp = std::pow(lam, 1.0 - p) - sp.c / (4.0 * k) * std::pow(lam, -(p + 1.0));
        // zero up to roundoff counts as zero
        if (!(lp > 1e-12 * std::pow(lam, 1.0 - p)))
            throw Error(ErrorCode::WeightSignError,
                        "lambda(p) <= 0 at j = " + std::to_string(j) + ", k = " + std::to_string(k));
        sp.lambda.push_back(lam);
        sp.lambda_p.push_back(lp);
        sp.trace_p += lp;
    }
    return sp;
}

double weighted_volume(int k, const ToyModel& model, const MomentumGrid& grid) {
    double v = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        v += grid.rule.weights[i] * std::pow(model.f(grid.rule.nodes[i]), 1.0 - model.p);
    return kTwoPi * k * v;
}

double C_k(int k, const ToyModel& model, const MomentumGrid& grid) {
    return eigenvalues(k, model).trace_p / weighted_volume(k, model, grid);
}

double integrate_vol(const RadialPotential& phi, int k, const std::vector<double>& values) {
    const auto& g = phi.grid();
    double v = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) v += g.rule.weights[i] * values[i] * phi.density(i);
    return kTwoPi * k * v;
}

// ---------------------------------------------------------------- quantization maps

namespace {

// int |w^j|^2 Psi(f) vol_{k omega} for every j
std::vector<double> monomial_norms(const RadialPotential& phi, int k, const ToyModel& model,
                                   const std::function<double(double)>& Psi) {
    const auto& g = phi.grid();
    std::vector<double> base(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        base[i] = kTwoPi * k * g.rule.weights[i] * phi.density(i) * Psi(model.f(phi.mu(i)));
    std::vector<double> n(k + 1, 0.0);
    for (int j = 0; j <= k; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += base[i] * std::exp(log_monomial(g, phi, k, j, i));
        if (!(acc > 0.0) || !std::isfinite(acc))
            throw Error(ErrorCode::NonFiniteIntegrand, "monomial norm not positive at j = " + std::to_string(j));
        n[j] = acc;
    }
    return n;
}

// Psi(f_i) sum_j coef_j |w^j|^2_i
std::vector<double> density_sum(const RadialPotential& phi, int k, const ToyModel& model,
                                const std::function<double(double)>& Psi, const std::vector<double>& coef) {
    const auto& g = phi.grid();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) acc += coef[j] * std::exp(log_monomial(g, phi, k, j, i));
        out[i] = Psi(model.f(phi.mu(i))) * acc;
    }
    return out;
}

std::function<double(double)> weight_fn(const ToyModel& model) {
    const double e = 1.0 - model.p;
    return [e](double f) { return std::pow(f, e); };
}

}  // namespace

HermitianNorms hilb(const RadialPotential& phi, int k, const ToyModel& model) {
    const auto sp = eigenvalues(k, model);
    auto n = monomial_norms(phi, k, model, weight_fn(model));
    for (int j = 0; j <= k; ++j) n[j] /= sp.lambda_p[j];
    return {k, std::move(n)};
}

RadialPotential fs(const HermitianNorms& H, const ToyModel& model, const GridPtr& grid) {
    const int k = H.k;
    if (static_cast<int>(H.h.size()) != k + 1) throw Error(ErrorCode::InvalidConfig, "norm count != k+1");
    for (double h : H.h)
        if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::NotAdmissible, "norms must be positive");
    const double logC = std::log(C_k(k, model, *grid));
    const std::size_t n = grid->size();
    std::vector<double> phi(n);
    std::array<std::vector<double>, 4> d;
    for (auto& v : d) v.resize(n);
    std::vector<double> a(k + 1), q(k + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j <= k; ++j) a[j] = j * grid->log_s[i] + (k - j) * grid->log_1ms[i] - std::log(H.h[j]);
        const double lse = log_sum_exp(a);
        double mean = 0.0;
        for (int j = 0; j <= k; ++j) {
            q[j] = std::exp(a[j] - lse);
            mean += q[j] * j;
        }
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (int j = 0; j <= k; ++j) {
            const double x = j - mean;
            m2 += q[j] * x * x;
            m3 += q[j] * x * x * x;
            m4 += q[j] * x * x * x * x;
        }
        // psi^{(n)} = 2^{n-1} kappa_n / k with kappa_n the cumulants of q
        phi[i] = (lse - logC) / (2.0 * k);
        d[0][i] = mean / k;
        d[1][i] = 2.0 * m2 / k;
        d[2][i] = 4.0 * m3 / k;
        d[3][i] = 8.0 * (m4 - 3.0 * m2 * m2) / k;
    }
    return RadialPotential(grid, std::move(phi), std::move(d));
}

std::vector<double> bergman_density(const RadialPotential& phi, int k, const ToyModel& model,
                                    const std::function<double(double)>& Psi,
                                    const std::function<double(double)>& Phi) {
    const auto sp = eigenvalues(k, model);
    const auto n = monomial_norms(phi, k, model, Psi);
    std::vector<double> coef(k + 1);
    for (int j = 0; j <= k; ++j) coef[j] = Phi(sp.lambda[j]) / n[j];
    return density_sum(phi, k, model, Psi, coef);
}

std::vector<double> rho_p(const RadialPotential& phi, int k, const ToyModel& model) {
    const auto H = hilb(phi, k, model);
    std::vector<double> coef(k + 1);
    for (int j = 0; j <= k; ++j) coef[j] = 1.0 / H.h[j];
    return density_sum(phi, k, model, weight_fn(model), coef);
}

ExpansionReport expansion_check(const RadialPotential& phi, const ToyModel& model,
                                const std::vector<int>& k_list) {
    if (k_list.size() < 2) throw Error(ErrorCode::InvalidConfig, "expansion check needs two or more k");
    ExpansionReport rep;
    const double c = eigenvalues(k_list.front(), model).c;
    const auto& g = phi.grid();
    std::vector<double> kd;
    for (int k : k_list) {
        const auto rho = rho_p(phi, k, model);
        double r = 0.0, lead = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double f = model.f(phi.mu(i));
            const double l = kTwoPi * rho[i] - std::pow(f, 1.0 - model.p);
            const double corr = std::pow(f, -(model.p + 1.0)) * (toy_weighted_scal(phi, model, i) - c) / (4.0 * k);
            r = std::max(r, std::abs(l - corr));
            lead = std::max(lead, std::abs(l));
        }
        rep.k.push_back(k);
        rep.residual_sup.push_back(r);
        rep.leading_sup.push_back(lead);
        kd.push_back(k);
        const std::size_t m = rep.k.size();
        rep.slope_running.push_back(
            m < 2 ? std::numeric_limits<double>::quiet_NaN()
                  : std::log(rep.residual_sup[m - 1] / rep.residual_sup[m - 2]) / std::log(kd[m - 1] / kd[m - 2]));
    }
    rep.slope = loglog_slope(kd, rep.residual_sup);
    rep.leading_slope = loglog_slope(kd, rep.leading_sup);
    return rep;
}

// ---------------------------------------------------------------- balanced metrics

BalancedResult balanced_iterate(const RadialPotential& phi0, int k, const ToyModel& model,
                                int max_iter, double tol, double relaxation) {
    if (max_iter < 1) throw Error(ErrorCode::InvalidConfig, "max_iter must be positive");
    if (!(relaxation > 0.0)) throw Error(ErrorCode::InvalidConfig, "relaxation must be positive");
    const auto& grid = phi0.grid_ptr();
    BalancedResult res;
    res.H = hilb(phi0, k, model);
    for (int it = 1; it <= max_iter; ++it) {
        const auto phi = fs(res.H, model, grid);
        // the momentum image must stay [0, 1]; failure means the grid lost the metric
        double mass = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) mass += grid->rule.weights[i] * phi.density(i);
        if (!(std::abs(mass - 1.0) < 1e-8))
            throw Error(ErrorCode::NoConvergence,
                        "iterate escaped the momentum grid after " + std::to_string(it) +
                            " steps (finite Futaki number " + fmt::format("{:.6g}", finite_futaki(k, model, grid)) + ")");
        const auto next = hilb(phi, k, model);
        double d = 0.0;
        for (int j = 0; j <= k; ++j) d = std::max(d, std::abs(std::log(next.h[j] / res.H.h[j])));
        res.history.push_back(d);
        res.iterations = it;
        if (d < tol) {
            res.H = next;
            res.phi = fs(res.H, model, grid);
            res.converged = true;
            return res;
        }
        for (int j = 0; j <= k; ++j)
            res.H.h[j] *= std::pow(next.h[j] / res.H.h[j], relaxation);
    }
    throw Error(ErrorCode::NoConvergence,
                "no fixed point within " + std::to_string(max_iter) + " iterations (last step " +
                    fmt::format("{:.6g}", res.history.back()) + ", finite Futaki number " +
                    fmt::format("{:.6g}", finite_futaki(k, model, grid)) + ")");
}

double balanced_residual(const HermitianNorms& H, const ToyModel& model, const GridPtr& grid) {
    const auto phi = fs(H, model, grid);
    const auto rho = rho_p(phi, H.k, model);
    const double C = C_k(H.k, model, *grid);
    double r = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        r = std::max(r, std::abs(rho[i] - C * std::pow(model.f(phi.mu(i)), 1.0 - model.p)));
    return r;
}

double finite_futaki(int k, const ToyModel& model, const GridPtr& grid) {
    const auto sp = eigenvalues(k, model);
    const auto H = hilb(RadialPotential::round(grid), k, model);
    const auto T = hilb(fs(H, model, grid), k, model);
    double F = 0.0;
    for (int j = 0; j <= k; ++j) F += (static_cast<double>(j) / k) * sp.lambda_p[j] * (1.0 - T.h[j] / H.h[j]);
    return F;
}

// ---------------------------------------------------------------- functionals

double functional_I(const HermitianNorms& H, const SpectrumData& spec) {
    if (H.h.size() != spec.lambda_p.size()) throw Error(ErrorCode::InvalidConfig, "spectrum size mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < H.h.size(); ++j) s += spec.lambda_p[j] * std::log(H.h[j]);
    return s;
}

double functional_I(const std::vector<Eigen::MatrixXcd>& blocks, const std::vector<double>& lambda_p) {
    if (blocks.size() != lambda_p.size()) throw Error(ErrorCode::InvalidConfig, "block count mismatch");
    double s = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        Eigen::LLT<Eigen::MatrixXcd> llt(blocks[b]);
        if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotAdmissible, "block not positive definite");
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < blocks[b].rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
        s += lambda_p[b] * logdet;
    }
    return s;
}

double aubin_I_segment(const RadialPotential& a, const RadialPotential& b, int k, const ToyModel& model,
                       int path_order) {
    const auto& g = a.grid();
    const double C = C_k(k, model, g);
    const auto tr = gauss_legendre(path_order, 0.0, 1.0);
    double total = 0.0;
    for (std::size_t m = 0; m < tr.size(); ++m) {
        const auto pt = RadialPotential::lerp(a, b, tr.nodes[m]);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(pt.S(i) > 0.0)) throw Error(ErrorCode::NotAdmissible, "path leaves the admissible set");
            acc += g.rule.weights[i] * (b.phi()[i] - a.phi()[i]) *
                   std::pow(model.f(pt.mu(i)), 1.0 - model.p) * pt.density(i);
        }
        total += tr.weights[m] * kTwoPi * k * acc;
    }
    return 2.0 * k * C * total;
}

double aubin_I(const RadialPotential& phi, int k, const ToyModel& model, int path_order) {
    return aubin_I_segment(RadialPotential::round(phi.grid_ptr()), phi, k, model, path_order);
}

double functional_L(const RadialPotential& phi, int k, const ToyModel& model) {
    return functional_I(hilb(phi, k, model), eigenvalues(k, model)) + aubin_I(phi, k, model);
}

double functional_Z(const HermitianNorms& H, const ToyModel& model, const GridPtr& grid) {
    return aubin_I(fs(H, model, grid), H.k, model) + functional_I(H, eigenvalues(H.k, model));
}

HermitianNorms geodesic(const HermitianNorms& H0, const std::vector<double>& A, double t,
                        const ToyModel& model) {
    if (A.size() != H0.h.size()) throw Error(ErrorCode::InvalidConfig, "direction size mismatch");
    double scale = 0.0, trace = 0.0;
    for (double a : A) {
        scale = std::max(scale, std::abs(a));
        trace += a;
    }
    const double tol = 1e-12 * std::max(1.0, scale);
    if (model.has_field()) {
        // distinct eigenvalues: every block is one-dimensional
        for (double a : A)
            if (std::abs(a) > tol) throw Error(ErrorCode::NotTraceless, "nonzero trace on a one-dimensional block");
    } else if (std::abs(trace) > tol * A.size()) {
        throw Error(ErrorCode::NotTraceless, "direction has nonzero trace");
    }
    HermitianNorms H = H0;
    for (std::size_t j = 0; j < A.size(); ++j) H.h[j] *= std::exp(t * A[j]);
    return H;
}

double geodesic_slope(const HermitianNorms& H, const std::vector<double>& A, const ToyModel& model,
                      const GridPtr& grid) {
    if (A.size() != H.h.size()) throw Error(ErrorCode::InvalidConfig, "direction size mismatch");
    const int k = H.k;
    const auto sp = eigenvalues(k, model);
    const auto phi = fs(H, model, grid);
    const auto n = monomial_norms(phi, k, model, weight_fn(model));
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += A[j] * (sp.lambda_p[j] - n[j] / H.h[j]);
    return s;
}

double toy_mabuchi(const RadialPotential& phi, const ToyModel& model, int path_order) {
    const auto& grid = phi.grid_ptr();
    const auto ref = RadialPotential::round(grid);
    const double c = c_top(ref, model);
    const auto tr = gauss_legendre(path_order, 0.0, 1.0);
    double total = 0.0;
    for (std::size_t m = 0; m < tr.size(); ++m) {
        const auto pt = RadialPotential::lerp(ref, phi, tr.nodes[m]);
        double acc = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
            if (!(pt.S(i) > 0.0)) throw Error(ErrorCode::NotAdmissible, "path leaves the admissible set");
            const double f = model.f(pt.mu(i));
            acc += grid->rule.weights[i] * phi.phi()[i] * (toy_weighted_scal(pt, model, i) - c) *
                   std::pow(f, -(model.p + 1.0)) * pt.density(i);
        }
        total -= tr.weights[m] * kTwoPi * acc;
    }
    return total;
}

AlmostBalancedReport almost_balanced_check(const RadialPotential& phi_star, const RadialPotential& phi,
                                           const ToyModel& model, const std::vector<int>& k_list) {
    AlmostBalancedReport rep;
    const auto& grid = phi.grid_ptr();
    for (int k : k_list) {
        const double zs = functional_Z(hilb(phi_star, k, model), model, grid);
        const double zp = functional_Z(hilb(phi, k, model), model, grid);
        rep.k.push_back(k);
        rep.eps_hat.push_back(std::max(0.0, zs - zp) / k);
    }
    return rep;
}

}  // namespace kahler
