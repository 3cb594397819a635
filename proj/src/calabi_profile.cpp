#include "kahler/calabi_profile.hpp"

#include "kahler/error.hpp"

#include <cmath>
#include <string>

namespace kahler {

RuledSurfaceData RuledSurfaceData::make(int genus, int degree, double kappa) {
    if (genus < 2) throw Error(ErrorCode::InvalidConfig, "genus must be at least 2");
    if (degree < 1) throw Error(ErrorCode::InvalidConfig, "degree must be positive");
    if (!(kappa > 1.0) || !std::isfinite(kappa))
        throw Error(ErrorCode::OutOfDomain, "kappa must exceed 1");
    RuledSurfaceData X;
    X.genus = genus;
    X.degree = degree;
    X.kappa = kappa;
    X.base_scal = 4.0 * (1.0 - genus) / degree;
    return X;
}

namespace {

Jet2 legendre_series(const std::vector<double>& a, double x) {
    // P_n with first and second derivatives by the three-term recurrence
    Jet2 sum = Jet2::constant(a[0]);
    if (a.size() == 1) return sum;
    Jet2 prev{1.0, 0.0, 0.0};
    Jet2 cur{x, 1.0, 0.0};
    sum = sum + a[1] * cur;
    for (std::size_t n = 1; n + 1 < a.size(); ++n) {
        const double dn = static_cast<double>(n);
        Jet2 next;
        next.v = ((2 * dn + 1) * x * cur.v - dn * prev.v) / (dn + 1);
        next.d1 = prev.d1 + (2 * dn + 1) * cur.v;
        next.d2 = prev.d2 + (2 * dn + 1) * cur.d1;
        sum = sum + a[n + 1] * next;
        prev = cur;
        cur = next;
    }
    return sum;
}

}  // namespace

Profile Profile::polynomial(Polynomial P, double kappa) {
    Profile out;
    out.kind_ = ProfileKind::Polynomial;
    out.kappa_ = kappa;
    auto poly = std::make_shared<const Polynomial>(std::move(P));
    auto d1 = std::make_shared<const Polynomial>(poly->derivative());
    auto d2 = std::make_shared<const Polynomial>(d1->derivative());
    out.poly_ = poly;
    out.eval_ = [poly, d1, d2, kappa](double z) {
        const Jet2 num{(*poly)(z), (*d1)(z), (*d2)(z)};
        return num / Jet2{z + kappa, 1.0, 0.0};
    };
    return out;
}

Profile Profile::canonical(double kappa) {
    return polynomial(Polynomial{kappa, 1.0} * Polynomial{1.0, 0.0, -1.0}, kappa);
}

Profile Profile::grid(const QuadratureRule& rule, std::vector<double> theta, double kappa) {
    const auto n = static_cast<Eigen::Index>(rule.size());
    if (static_cast<std::size_t>(n) != theta.size() || n < 2)
        throw Error(ErrorCode::InvalidConfig, "grid profile needs one value per node");
    Eigen::MatrixXd V(n, n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = rule.nodes[i];
        double pm = 1.0, pc = x;
        V(i, 0) = 1.0;
        if (n > 1) V(i, 1) = x;
        for (Eigen::Index k = 1; k + 1 < n; ++k) {
            const double pn = ((2.0 * k + 1) * x * pc - k * pm) / (k + 1.0);
            V(i, k + 1) = pn;
            pm = pc;
            pc = pn;
        }
        y(i) = theta[i];
    }
    Eigen::VectorXd a = V.colPivHouseholderQr().solve(y);
    auto coeffs = std::make_shared<const std::vector<double>>(a.data(), a.data() + n);

    Profile out;
    out.kind_ = ProfileKind::Grid;
    out.kappa_ = kappa;
    out.nodes_ = std::make_shared<const std::vector<double>>(rule.nodes);
    out.values_ = std::make_shared<const std::vector<double>>(std::move(theta));
    out.eval_ = [coeffs](double z) { return legendre_series(*coeffs, z); };
    return out;
}

Profile Profile::derived(std::function<Jet2(double)> jet, double kappa) {
    Profile out;
    out.kind_ = ProfileKind::Derived;
    out.kappa_ = kappa;
    out.eval_ = std::move(jet);
    return out;
}

const Polynomial& Profile::numerator() const {
    if (!poly_) throw Error(ErrorCode::InvalidConfig, "profile is not polynomial");
    return *poly_;
}

const std::vector<double>& Profile::grid_nodes() const {
    if (!nodes_) throw Error(ErrorCode::InvalidConfig, "profile is not a grid");
    return *nodes_;
}

const std::vector<double>& Profile::grid_values() const {
    if (!values_) throw Error(ErrorCode::InvalidConfig, "profile is not a grid");
    return *values_;
}

nlohmann::json Profile::to_json() const {
    nlohmann::json j;
    j["kappa"] = kappa_;
    switch (kind_) {
        case ProfileKind::Polynomial:
            j["kind"] = "polynomial";
            j["data"] = {{"P", poly_->coefficients()}};
            break;
        case ProfileKind::Grid:
            j["kind"] = "grid";
            j["data"] = {{"nodes", *nodes_}, {"theta", *values_}};
            break;
        case ProfileKind::Derived: {
            // sampled onto a 64-point Gauss grid
            const auto rule = gauss_legendre(64);
            std::vector<double> th(rule.size());
            for (std::size_t i = 0; i < rule.size(); ++i) th[i] = (*this)(rule.nodes[i]);
            j["kind"] = "grid";
            j["data"] = {{"nodes", rule.nodes}, {"theta", th}};
            break;
        }
    }
    return j;
}

Profile Profile::from_json(const nlohmann::json& j) {
    const double kappa = j.at("kappa").get<double>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "polynomial")
        return polynomial(Polynomial(j.at("data").at("P").get<std::vector<double>>()), kappa);
    if (kind == "grid") {
        QuadratureRule rule;
        rule.nodes = j.at("data").at("nodes").get<std::vector<double>>();
        rule.weights.assign(rule.nodes.size(), 0.0);
        return grid(rule, j.at("data").at("theta").get<std::vector<double>>(), kappa);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown profile kind '" + kind + "'");
}

BoundaryReport check_boundary(const Profile& theta, double tol) {
    const Jet2 l = theta.jet(-1.0);
    const Jet2 r = theta.jet(1.0);
    BoundaryReport rep;
    rep.defects = {l.v, r.v, l.d1 - 2.0, r.d1 + 2.0};
    rep.ok = true;
    for (double d : rep.defects)
        if (!(std::abs(d) < tol)) rep.ok = false;
    return rep;
}

namespace {

struct ProfileDerivs {
    double theta, p1, p2;  // Theta, P', P''
};

ProfileDerivs derivs(const Profile& theta, double z) {
    const Jet2 t = theta.jet(z);
    const double zk = z + theta.kappa();
    return {t.v, t.v + zk * t.d1, 2.0 * t.d1 + zk * t.d2};
}

void require_finite(double v, double z) {
    if (!std::isfinite(v))
        throw Error(ErrorCode::NonFiniteCurvature, "curvature not finite at z = " + std::to_string(z));
}

}  // namespace

double ansatz_scalar_curvature(const Profile& theta, const RuledSurfaceData& X, double z) {
    const auto d = derivs(theta, z);
    const double s = (X.base_scal - d.p2) / (z + X.kappa);
    require_finite(s, z);
    return s;
}

double momentum_laplacian(const Profile& theta, double z) {
    const auto d = derivs(theta, z);
    const double v = -d.p1 / (z + theta.kappa());
    require_finite(v, z);
    return v;
}

double weighted_scalar_curvature(const Profile& theta, const RuledSurfaceData& X,
                                 const WeightData& w, double z) {
    const auto d = derivs(theta, z);
    const double zk = z + X.kappa;
    const double f = z + w.b;
    const double scal = (X.base_scal - d.p2) / zk;
    const double lap = -d.p1 / zk;
    const double v = f * f * scal - 2.0 * (w.p - 1.0) * f * lap - w.p * (w.p - 1.0) * d.theta;
    require_finite(v, z);
    return v;
}

double weighted_average_c(const Profile& theta, const RuledSurfaceData& X, const WeightData& w,
                          const QuadratureRule& rule) {
    if (!(w.b > 1.0)) throw Error(ErrorCode::OutOfDomain, "weight z + b must be positive on [-1, 1]");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double z = rule.nodes[i];
        const double m = std::pow(z + w.b, -(w.p + 1.0)) * (z + X.kappa) * rule.weights[i];
        num += weighted_scalar_curvature(theta, X, w, z) * m;
        den += m;
    }
    return num / den;
}

SymplecticPotential to_symplectic(const Profile& theta, const QuadratureRule& rule) {
    std::vector<double> upp(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double t = theta(rule.nodes[i]);
        if (!(t > 0.0))
            throw Error(ErrorCode::NotAdmissible,
                        "profile not positive at z = " + std::to_string(rule.nodes[i]));
        upp[i] = 1.0 / t;
    }
    return SymplecticPotential(rule, std::move(upp), theta.kappa());
}

Profile to_profile(const SymplecticPotential& u) {
    std::vector<double> th(u.upp().size());
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = 1.0 / u.upp()[i];
    return Profile::grid(u.rule(), std::move(th), u.kappa());
}

Profile random_profile(std::mt19937_64& rng, double kappa, double amp) {
    std::uniform_real_distribution<double> u(-amp, amp);
    const double q0 = u(rng), q1 = u(rng), q2 = u(rng);
    const Polynomial q{q0, q1, q2};
    const Polynomial one_m{1.0, 0.0, -1.0};
    const Polynomial theta = one_m * (Polynomial{1.0} + one_m * q);
    return Profile::polynomial(Polynomial{kappa, 1.0} * theta, kappa);
}

}  // namespace kahler
