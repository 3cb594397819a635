#include "kahler/error.hpp"
#include "kahler/quantization.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace kahler;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr grid() { return MomentumGrid::make(); }

double beta(int a, int b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

// c for the round metric from the explicit profile S = 2mu(1-mu), on its own rule
double round_c(const ToyModel& m) {
    const auto r = gauss_legendre(60, 0.0, 1.0);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double mu = r.nodes[i], f = m.f(mu), w = r.weights[i] * std::pow(f, -(m.p + 1));
        const double S = 2 * mu * (1 - mu), dS = 2 - 4 * mu;
        const double W = m.has_field() ? f * f * 4 + 2 * (m.p - 1) * f * dS - m.p * (m.p - 1) * S : 4.0;
        num += w * W;
        den += w;
    }
    return num / den;
}

// Closed-form weighted energy in momentum coordinates for phi = g(s):
// 2pi [ -int f^{1-p} log(u''/u0'') + 2 a0^{1-p} v(0) + 2 a1^{1-p} v(1) - c int v f^{-p-1} ],
// v = u - u0 from the Legendre transform, v(0) = -g(0), v(1) = -g(1).
double mabuchi_oracle(const Polynomial& g, const ToyModel& m) {
    const Polynomial D{0.0, 2.0, -2.0};
    const Polynomial mu = Polynomial{0.0, 1.0} + D * g.derivative();
    const Polynomial dmu = mu.derivative();
    const double c = round_c(m);
    const auto r = gauss_legendre(300, 0.0, 1.0);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double s = r.nodes[i], M = mu(s), dm = dmu(s);
        const double S = 2 * s * (1 - s) * dm, S0 = 2 * M * (1 - M), f = m.f(M);
        const double v = 0.5 * M * std::log(s / M) + 0.5 * (1 - M) * std::log((1 - s) / (1 - M)) - g(s);
        a += r.weights[i] * dm * std::pow(f, 1 - m.p) * std::log(S0 / S);
        b += r.weights[i] * dm * v * std::pow(f, -m.p - 1);
    }
    return 2 * kPi *
           (-a - 2 * std::pow(m.f(0.0), 1 - m.p) * g(0.0) - 2 * std::pow(m.f(1.0), 1 - m.p) * g(1.0) - c * b);
}

// gauge-invariant shape of a norm vector (removes scale and the C* action)
std::vector<double> shape(const std::vector<double>& h) {
    const int k = static_cast<int>(h.size()) - 1;
    std::vector<double> out;
    for (int j = 0; j <= k; ++j)
        out.push_back(std::log(h[j]) - ((k - j) * std::log(h[0]) + j * std::log(h[k])) / k);
    return out;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("eigenvalues sit at the peak of the Killing potential on each monomial") {
    const auto m = ToyModel::weighted(1.0, 4.0);
    for (int k : {1, 2, 5}) {
        const auto lam = lattice_eigenvalues(k, m);
        REQUIRE(lam.size() == static_cast<std::size_t>(k + 1));
        for (int j = 0; j <= k; ++j) {
            // argmax of s^j (1-s)^{k-j} on a fine grid; round metric has mu = s
            double best = -1e300, arg = 0.0;
            for (int i = 0; i <= 100000; ++i) {
                const double s = i / 100000.0;
                const double v = (j ? j * std::log(s) : 0.0) + (k - j ? (k - j) * std::log1p(-s) : 0.0);
                if (v > best) best = v, arg = s;
            }
            CHECK(std::abs(lam[j] - m.f(arg)) < 1e-5);
            CHECK(lam[j] >= 1.0);
            CHECK(lam[j] <= 2.0);
        }
    }
    CHECK(lattice_eigenvalues(1, m) == std::vector<double>{1.0, 2.0});
    CHECK(lattice_eigenvalues(2, m) == std::vector<double>{1.0, 1.5, 2.0});
    const auto flat = lattice_eigenvalues(6, ToyModel::unweighted(4.0));
    CHECK(std::all_of(flat.begin(), flat.end(), [](double l) { return l == 1.0; }));
}

TEST_CASE("lambda(p) must be positive") {
    try {
        eigenvalues(1, ToyModel::weighted(1.0, 4.0));
        FAIL("expected WeightSignError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WeightSignError);
    }
    CHECK_THROWS_AS(eigenvalues(1, ToyModel::unweighted(4.0)), Error);
    const auto sp = eigenvalues(8, ToyModel::weighted(1.0, 4.0));
    for (int j = 0; j <= 8; ++j) {
        const double l = sp.lambda[j];
        CHECK(sp.lambda_p[j] == doctest::Approx(std::pow(l, -3.0) - sp.c / 32.0 * std::pow(l, -5.0)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(ToyModel::weighted(-1.0, 4.0), Error);
    CHECK_THROWS_AS(ToyModel::weighted(1.0, NAN), Error);
}

TEST_CASE("topological constant") {
    const auto g = grid();
    const auto r = RadialPotential::round(g);
    CHECK(c_top(r, ToyModel::unweighted(4.0)) == doctest::Approx(4.0).epsilon(1e-12));
    for (double b0 : {0.5, 1.0, 3.0})
        for (double p : {1.0, 2.0, 4.0}) {
            const auto m = ToyModel::weighted(b0, p);
            CHECK(c_top(r, m) == doctest::Approx(round_c(m)).epsilon(1e-11));
        }
    // p = 1: f^2 Scal averaged against f^{-2}
    const auto m1 = ToyModel::weighted(1.0, 1.0);
    CHECK(c_top(r, m1) == doctest::Approx(4.0 / (1.0 - 0.5)).epsilon(1e-12));
    // p = 2, b0 = 1: the round metric has constant weighted curvature 8
    const auto m2 = ToyModel::weighted(1.0, 2.0);
    for (std::size_t i = 0; i < g->size(); i += 17) CHECK(toy_weighted_scal(r, m2, i) == doctest::Approx(8.0).epsilon(1e-9));

    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t) {
        const auto phi = RadialPotential::random(g, rng);
        REQUIRE(phi.admissible());
        for (const auto& m : {ToyModel::weighted(1.0, 4.0), ToyModel::weighted(0.3, 2.0), ToyModel::unweighted(4.0)})
            CHECK(std::abs(c_top(phi, m) - c_top(r, m)) < 1e-8);
    }
}

TEST_CASE("round profile and admissibility") {
    const auto g = grid();
    const auto r = RadialPotential::round(g);
    CHECK(r.admissible());
    for (std::size_t i = 0; i < g->size(); i += 31) {
        const double mu = r.mu(i);
        CHECK(mu == doctest::Approx(g->rule.nodes[i]).epsilon(1e-15));
        CHECK(r.S(i) == doctest::Approx(2 * mu * (1 - mu)).epsilon(1e-13));
        CHECK(r.dS(i) == doctest::Approx(2 - 4 * mu).epsilon(1e-9));
        CHECK(r.d2S(i) == doctest::Approx(-4.0).epsilon(1e-6));
    }
    // S -> 2S doubles the boundary slopes; psi''' = S dS/dmu scales by 4
    std::array<std::vector<double>, 4> d = r.derivatives();
    for (auto& v : d[1]) v *= 2.0;
    for (auto& v : d[2]) v *= 4.0;
    const RadialPotential doubled(g, r.phi(), d);
    CHECK(doubled.dS(0) == doctest::Approx(2.0 * r.dS(0)));
    CHECK_FALSE(doubled.admissible());
}

TEST_CASE("Hilb of the round metric gives Beta-integral norms") {
    const auto g = grid();
    const auto r = RadialPotential::round(g);
    for (double p : {1.0, 4.0})
        for (int k : {2, 5, 20, 64}) {
            const auto H = hilb(r, k, ToyModel::unweighted(p));
            for (int j = 0; j <= k; ++j) {
                const double exact = 2 * kPi * k * beta(j + 1, k - j + 1) / (1.0 - 1.0 / k);
                CHECK(H.h[j] == doctest::Approx(exact).epsilon(1e-12));
                CHECK(H.h[j] == doctest::Approx(H.h[k - j]).epsilon(1e-12));
            }
        }
}

TEST_CASE("Fubini-Study map") {
    const auto g = grid();
    const auto m = ToyModel::unweighted(4.0);
    // k = 2 against the explicit three-term sum
    const HermitianNorms H{2, {1.0, 2.0, 3.0}};
    const auto phi = fs(H, m, g);
    const double C = 3 * 0.5 / (2 * kPi * 2);
    for (std::size_t i = 0; i < g->size(); i += 7) {
        const double s = g->rule.nodes[i];
        const double q = (1 - s) * (1 - s) + s * (1 - s) / 2 + s * s / 3;
        const double dq = -2 * (1 - s) + (1 - 2 * s) / 2 + 2 * s / 3;
        CHECK(phi.phi()[i] == doctest::Approx(0.25 * std::log(q / C)).epsilon(1e-13));
        // mu = psi' = s + 2s(1-s) dphi/ds
        CHECK(phi.mu(i) == doctest::Approx(s + 2 * s * (1 - s) * 0.25 * dq / q).epsilon(1e-13));
    }
    CHECK(phi.admissible());

    // the round metric is a fixed point of FS o Hilb without a field
    const auto r = RadialPotential::round(g);
    for (int k : {2, 7, 30}) {
        const auto back = fs(hilb(r, k, m), m, g);
        CHECK(sup_diff(back.phi(), r.phi()) < 1e-12);
    }
    CHECK_THROWS_AS(fs(HermitianNorms{2, {1.0, -1.0, 1.0}}, m, g), Error);
    CHECK_THROWS_AS(fs(HermitianNorms{2, {1.0, 1.0}}, m, g), Error);
}

TEST_CASE("FS o Hilb approaches the identity at rate k^-2") {
    const auto g = grid();
    std::mt19937_64 rng(4);
    const auto phi = RadialPotential::random(g, rng);
    for (const auto& m : {ToyModel::unweighted(4.0), ToyModel::weighted(1.0, 4.0)}) {
        std::vector<double> ks, err;
        for (int k : {32, 64, 128}) {
            ks.push_back(k);
            err.push_back(sup_diff(fs(hilb(phi, k, m), m, g).phi(), phi.phi()));
        }
        CHECK(err[1] < err[0]);
        CHECK(err[2] < err[1]);
        const double tail = std::log(err[2] / err[1]) / std::log(2.0);
        CHECK(tail < -1.6);
        CHECK(tail > -2.3);
    }
}

TEST_CASE("Bergman densities") {
    const auto g = grid();
    const auto r = RadialPotential::round(g);
    const auto one = [](double) { return 1.0; };
    const auto m0 = ToyModel::unweighted(4.0);
    for (int k : {2, 9, 40}) {
        const auto B = bergman_density(r, k, m0, one, one);
        for (double b : B) CHECK(b == doctest::Approx((k + 1) / (2 * kPi * k)).epsilon(1e-12));
        CHECK(integrate_vol(r, k, B) == doctest::Approx(k + 1.0).epsilon(1e-12));
    }

    // second coefficient for Psi = t^{1-p}, Phi = t^q
    std::mt19937_64 rng(8);
    const auto phi = RadialPotential::random(g, rng, 0.2);
    for (double p : {2.0, 4.0})
        for (double q : {1.0, -2.0}) {
            const auto m = ToyModel::weighted(1.0, p);
            const auto Psi = [p](double t) { return std::pow(t, 1 - p); };
            const auto Phi = [q](double t) { return std::pow(t, q); };
            std::vector<double> lead, second;
            for (int k : {16, 32, 64, 128}) {
                const auto B = bergman_density(phi, k, m, Psi, Phi);
                double e1 = 0.0, e2 = 0.0;
                for (std::size_t i = 0; i < g->size(); ++i) {
                    const double f = m.f(phi.mu(i));
                    const double lp = (1 - p) / f, lpp = -(1 - p) / (f * f);
                    const double F0 = std::pow(f, q), F1 = q * std::pow(f, q - 1), F2 = q * (q - 1) * std::pow(f, q - 2);
                    const double lap = -phi.dS(i);
                    const double S = 0.25 * F0 * (-phi.d2S(i)) + 0.5 * F0 * lp * lap +
                                     (0.25 * F2 - 0.5 * F1 * lp - 0.5 * F0 * lpp) * phi.S(i);
                    e1 = std::max(e1, std::abs(2 * kPi * B[i] - F0));
                    e2 = std::max(e2, std::abs(k * (2 * kPi * B[i] - F0) - S));
                }
                lead.push_back(e1);
                second.push_back(e2);
            }
            for (std::size_t i = 1; i < lead.size(); ++i) {
                CHECK(lead[i] < 0.7 * lead[i - 1]);
                CHECK(second[i] < second[i - 1]);
            }
            // the fit error of the second coefficient is itself O(1/k)
            CHECK(std::log2(second[3] / second[2]) < -0.8);
        }
}

TEST_CASE("rho splits into two Bergman kernels and integrates to the weighted trace") {
    const auto g = grid();
    std::mt19937_64 rng(12);
    const auto phi = RadialPotential::random(g, rng);
    for (double p : {2.0, 4.0})
        for (int k : {8, 24}) {
            const auto m = ToyModel::weighted(1.0, p);
            const auto sp = eigenvalues(k, m);
            const auto rho = rho_p(phi, k, m);
            const auto Psi = [p](double t) { return std::pow(t, 1 - p); };
            const auto B1 = bergman_density(phi, k, m, Psi, Psi);
            const auto B2 = bergman_density(phi, k, m, Psi, [p](double t) { return std::pow(t, -(p + 1)); });
            for (std::size_t i = 0; i < g->size(); ++i) {
                const double rhs = B1[i] - sp.c / (4.0 * k) * B2[i];
                CHECK(std::abs(rho[i] - rhs) <= 1e-12 * std::abs(rho[i]));
            }
            CHECK(integrate_vol(phi, k, rho) == doctest::Approx(sp.trace_p).epsilon(1e-12));
        }
    // without a field, p = 1: every section carries 1 - 1/k
    const auto r = RadialPotential::round(g);
    for (int k : {3, 10})
        CHECK(integrate_vol(r, k, rho_p(r, k, ToyModel::unweighted(1.0))) ==
              doctest::Approx((k * k - 1.0) / k).epsilon(1e-12));
}

TEST_CASE("(2 pi) C_k tends to 1 at rate k^-2") {
    const auto g = grid();
    for (const auto& m : {ToyModel::weighted(1.0, 4.0), ToyModel::weighted(1.0, 2.0), ToyModel::unweighted(4.0)}) {
        std::vector<double> ks, e;
        for (int k : {8, 16, 32, 64, 128}) {
            ks.push_back(k);
            e.push_back(std::abs(2 * kPi * C_k(k, m, *g) - 1.0));
        }
        if (!m.has_field()) {
            // sum of 1 - 1/k over k+1 sections against volume 2 pi k
            for (std::size_t i = 0; i < ks.size(); ++i) CHECK(e[i] == doctest::Approx(1.0 / (ks[i] * ks[i])).epsilon(1e-12));
        }
        const double s = loglog_slope(ks, e);
        CHECK(s < -1.9);
        CHECK(s > -2.1);
    }
}

TEST_CASE("expansion residual is second order") {
    const auto g = grid();
    const auto r = RadialPotential::round(g);
    for (double p : {2.0, 4.0}) {
        const auto m = ToyModel::weighted(1.0, p);
        const auto rep = expansion_check(r, m, {8, 16, 32, 64});
        CHECK(rep.slope <= -1.7);
        CHECK(rep.slope >= -2.3);
        CHECK(std::isnan(rep.slope_running[0]));
        // leading term alone: k * error approaches A = sup |f^{-(p+1)} (W - c)| / 4
        const double c = round_c(m);
        double A = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double mu = i / 2000.0, f = m.f(mu);
            const double W = f * f * 4 + 2 * (p - 1) * f * (2 - 4 * mu) - p * (p - 1) * 2 * mu * (1 - mu);
            A = std::max(A, std::abs(std::pow(f, -(p + 1)) * (W - c)) / 4);
        }
        for (std::size_t i = 1; i < rep.k.size(); ++i) {
            const double now = std::abs(rep.k[i] * rep.leading_sup[i] - A);
            const double before = std::abs(rep.k[i - 1] * rep.leading_sup[i - 1] - A);
            CHECK(now < before);
        }
    }
}

TEST_CASE("balanced metrics without a field are the round metric") {
    const auto g = grid();
    const auto m = ToyModel::unweighted(4.0);
    const auto r = RadialPotential::round(g);
    for (int k : {2, 8, 32}) {
        const auto res = balanced_iterate(r, k, m);
        CHECK(res.converged);
        CHECK(res.iterations == 1);
        CHECK(balanced_residual(res.H, m, g) < 1e-8);
        CHECK(std::abs(finite_futaki(k, m, g)) < 1e-12);
    }
    // every start on a lattice of shapes flows to the round shape for small k
    for (int k : {2, 3, 4}) {
        const auto target = shape(hilb(r, k, m).h);
        const std::vector<double> offsets{-1.0, 0.0, 1.0};
        std::vector<int> idx(k - 1, 0);
        int runs = 0;
        while (true) {
            HermitianNorms H{k, hilb(r, k, m).h};
            for (int j = 1; j < k; ++j) H.h[j] *= std::exp(offsets[idx[j - 1]]);
            const auto res = balanced_iterate(fs(H, m, g), k, m, 5000);
            CHECK(res.converged);
            CHECK(sup_diff(shape(res.H.h), target) < 1e-8);
            ++runs;
            int pos = 0;
            while (pos < k - 1 && ++idx[pos] == 3) idx[pos++] = 0;
            if (pos == k - 1) break;
        }
        CHECK(runs == static_cast<int>(std::pow(3, k - 1)));
    }
    // over-relaxation reaches the same point
    std::mt19937_64 rng(2);
    const auto start = RadialPotential::random(g, rng, 0.05);
    const auto plain = balanced_iterate(start, 4, m, 5000);
    const auto fast = balanced_iterate(start, 4, m, 5000, 1e-10, 1.5);
    CHECK(sup_diff(shape(plain.H.h), shape(fast.H.h)) < 1e-8);
    CHECK_THROWS_AS(balanced_iterate(start, 16, m, 20), Error);
}

TEST_CASE("a field with nonzero finite Futaki number obstructs balanced metrics") {
    const auto g = grid();
    std::mt19937_64 rng(6);
    for (double p : {2.0, 4.0}) {
        const auto m = ToyModel::weighted(1.0, p);
        for (int k : {8, 16}) {
            const double F = finite_futaki(k, m, g);
            CHECK(std::abs(F) > 1e-3);
            // same number from an arbitrary starting metric
            const auto sp = eigenvalues(k, m);
            const auto H = hilb(RadialPotential::random(g, rng), k, m);
            const auto T = hilb(fs(H, m, g), k, m);
            double F2 = 0.0;
            for (int j = 0; j <= k; ++j) F2 += (double(j) / k) * sp.lambda_p[j] * (1.0 - T.h[j] / H.h[j]);
            CHECK(F2 == doctest::Approx(F).epsilon(1e-9));
        }
        try {
            balanced_iterate(RadialPotential::round(g), 8, m);
            FAIL("expected NoConvergence");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoConvergence);
        }
    }
}

TEST_CASE("functional I") {
    const auto m = ToyModel::weighted(1.0, 4.0);
    const auto sp = eigenvalues(10, m);
    const HermitianNorms ones{10, std::vector<double>(11, 1.0)};
    CHECK(functional_I(ones, sp) == 0.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    HermitianNorms H{10, {}};
    for (int j = 0; j <= 10; ++j) H.h.push_back(u(rng));
    HermitianNorms Hs = H;
    for (auto& h : Hs.h) h *= std::exp(0.7);
    CHECK(functional_I(Hs, sp) - functional_I(H, sp) == doctest::Approx(0.7 * sp.trace_p).epsilon(1e-12));
    // first variation sum lambda(p) hdot / h
    std::vector<double> hdot;
    for (int j = 0; j <= 10; ++j) hdot.push_back(u(rng) - 1.0);
    double analytic = 0.0;
    for (int j = 0; j <= 10; ++j) analytic += sp.lambda_p[j] * hdot[j] / H.h[j];
    const double e = 1e-6;
    HermitianNorms Hp = H, Hm = H;
    for (int j = 0; j <= 10; ++j) Hp.h[j] += e * hdot[j], Hm.h[j] -= e * hdot[j];
    CHECK((functional_I(Hp, sp) - functional_I(Hm, sp)) / (2 * e) == doctest::Approx(analytic).epsilon(1e-8));
}

TEST_CASE("functionals do not depend on the choice of orthonormal frame in a block") {
    const auto g = grid();
    const auto m = ToyModel::unweighted(4.0);
    const int k = 5;
    const auto sp = eigenvalues(k, m);
    std::mt19937_64 rng(31);
    const auto H = hilb(RadialPotential::random(g, rng), k, m);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd Z(k + 1, k + 1);
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b) Z(a, b) = {n(rng), n(rng)};
    const Eigen::MatrixXcd U = Eigen::HouseholderQR<Eigen::MatrixXcd>(Z).householderQ();
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(k + 1, k + 1);
    for (int j = 0; j <= k; ++j) D(j, j) = H.h[j];
    const Eigen::MatrixXcd rotated = U.adjoint() * D * U;
    CHECK(functional_I({rotated}, {sp.lambda_p[0]}) == doctest::Approx(functional_I(H, sp)).epsilon(1e-12));

    // sum of |e_i|^2 over the rotated frame e_i = sum_j U_ij w^j / sqrt(h_j)
    std::uniform_real_distribution<double> u(0.05, 0.95), th(0.0, 2 * kPi);
    for (int t = 0; t < 10; ++t) {
        const double s = u(rng);
        const std::complex<double> w = std::polar(std::sqrt(s / (1 - s)), th(rng));
        Eigen::VectorXcd v(k + 1);
        double direct = 0.0;
        for (int j = 0; j <= k; ++j) {
            v(j) = std::pow(w, j) / std::sqrt(H.h[j]);
            direct += std::norm(v(j));
        }
        CHECK((U * v).squaredNorm() == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("Aubin functional is well defined") {
    const auto g = grid();
    const auto m = ToyModel::weighted(1.0, 4.0);
    const int k = 12;
    const auto r = RadialPotential::round(g);
    CHECK(aubin_I(r, k, m) == 0.0);
    std::mt19937_64 rng(15);
    const auto a = RadialPotential::random(g, rng), b = RadialPotential::random(g, rng);
    const double loop = aubin_I_segment(r, a, k, m) + aubin_I_segment(a, b, k, m) + aubin_I_segment(b, r, k, m);
    CHECK(std::abs(loop) < 1e-8);
    const double s = 0.37;
    const double expected = 2 * k * C_k(k, m, *g) * s * weighted_volume(k, m, *g);
    CHECK(aubin_I(a.shifted(s), k, m) - aubin_I(a, k, m) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("Z along geodesics") {
    const auto g = grid();
    const auto m = ToyModel::unweighted(4.0);
    const int k = 6;
    const auto Hb = hilb(RadialPotential::round(g), k, m);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 0.5);
    auto traceless = [&] {
        std::vector<double> A(k + 1);
        double mean = 0.0;
        for (auto& a : A) mean += (a = n(rng));
        mean /= A.size();
        for (auto& a : A) a -= mean;
        return A;
    };
    const auto A = traceless();
    CHECK(geodesic(Hb, A, 0.0, m).h == Hb.h);
    auto bad = A;
    bad[0] += 0.1;
    CHECK_THROWS_AS(geodesic(Hb, bad, 1.0, m), Error);
    CHECK_THROWS_AS(geodesic(Hb, A, 1.0, ToyModel::weighted(1.0, 4.0)), Error);

    // analytic slope against finite differences away from the balanced point
    const auto H1 = geodesic(Hb, A, 0.8, m);
    const auto B = traceless();
    const double h = 1e-4;
    const double fd = (functional_Z(geodesic(H1, B, h, m), m, g) - functional_Z(geodesic(H1, B, -h, m), m, g)) / (2 * h);
    CHECK(geodesic_slope(H1, B, m, g) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(std::abs(geodesic_slope(Hb, B, m, g)) < 1e-9);

    for (int trial = 0; trial < 5; ++trial) {
        const auto C = traceless();
        std::vector<double> z;
        for (int i = -5; i <= 5; ++i) z.push_back(functional_Z(geodesic(Hb, C, 0.2 * i, m), m, g));
        for (std::size_t i = 1; i + 1 < z.size(); ++i) CHECK(z[i - 1] - 2 * z[i] + z[i + 1] >= -1e-9);
        for (double v : z) CHECK(v >= z[5] - 1e-9);
    }
}

TEST_CASE("weighted Mabuchi energy on the toy") {
    const auto g = grid();
    const Polynomial q{0.0, 0.1, -0.05, 0.08, -0.04};
    const auto phi = RadialPotential::perturbed(g, q);
    for (const auto& m : {ToyModel::unweighted(4.0), ToyModel::weighted(1.0, 4.0), ToyModel::weighted(0.5, 2.0)})
        CHECK(std::abs(toy_mabuchi(phi, m) - mabuchi_oracle(q, m)) < 1e-9);
    const auto m0 = ToyModel::unweighted(4.0);
    CHECK(toy_mabuchi(RadialPotential::round(g), m0) == 0.0);
    std::mt19937_64 rng(40);
    for (int t = 0; t < 10; ++t) CHECK(toy_mabuchi(RadialPotential::random(g, rng), m0) > 0.0);
}

TEST_CASE("quantized functionals approach the Mabuchi energy") {
    const auto g = grid();
    const auto m = ToyModel::weighted(1.0, 4.0);
    const auto r = RadialPotential::round(g);
    const Polynomial q{0.0, 0.1, -0.05, 0.08, -0.04};
    const auto phi = RadialPotential::perturbed(g, q);
    const double M = toy_mabuchi(phi, m) / (2 * kPi);
    std::vector<double> ks, err, zl;
    for (int k : {8, 16, 32, 64}) {
        ks.push_back(k);
        err.push_back(std::abs(2.0 / k * (functional_L(phi, k, m) - functional_L(r, k, m)) - M));
        zl.push_back(std::abs(functional_L(phi, k, m) - functional_Z(hilb(phi, k, m), m, g)) / k);
    }
    CHECK(loglog_slope(ks, err) <= -0.8);
    for (std::size_t i = 1; i < zl.size(); ++i) CHECK(zl[i] < zl[i - 1]);

    const auto m0 = ToyModel::unweighted(4.0);
    const auto rep = almost_balanced_check(r, phi, m0, {8, 16});
    for (double e : rep.eps_hat) CHECK(e == 0.0);
    const auto self = almost_balanced_check(r, r, m0, {8});
    CHECK(self.eps_hat[0] == 0.0);
}
