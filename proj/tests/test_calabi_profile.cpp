#include "kahler/calabi_profile.hpp"
#include "kahler/ckem_solver.hpp"
#include "kahler/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kahler;

namespace {

// Theta'' etc. by central differences, independent of the jet arithmetic.
struct Fd {
    double v, d1, d2;
};
Fd fd(const Profile& th, double z, double h = 1e-4) {
    const double a = th(z - h), b = th(z), c = th(z + h);
    return {b, (c - a) / (2 * h), (c - 2 * b + a) / (h * h)};
}

}  // namespace

TEST_CASE("canonical profile satisfies the boundary conditions") {
    CHECK(check_boundary(Profile::canonical(2.0)).ok);
    const auto quartic = Profile::polynomial(Polynomial{2.0, 1.0} * Polynomial{1.0, 0, 0, 0, -1.0}, 2.0);
    const auto rep = check_boundary(quartic);
    CHECK_FALSE(rep.ok);
    CHECK(rep.defects[3] == doctest::Approx(-2.0));
}

TEST_CASE("scalar curvature of the canonical profile") {
    for (double kappa : {1.5, 2.0, 7.0}) {
        const auto X = RuledSurfaceData::make(2, 1, kappa);
        const auto th = Profile::canonical(kappa);
        CHECK(ansatz_scalar_curvature(th, X, 0.0) == doctest::Approx((2 * kappa - 4) / kappa).epsilon(1e-14));
        CHECK(momentum_laplacian(th, 0.0) == doctest::Approx(-1.0 / kappa).epsilon(1e-14));
        for (double z : {-0.7, 0.3}) {
            // ((z+k)(1-z^2))'' = -6z - 2k
            CHECK(ansatz_scalar_curvature(th, X, z) ==
                  doctest::Approx((X.base_scal + 6 * z + 2 * kappa) / (z + kappa)).epsilon(1e-13));
        }
    }
}

TEST_CASE("cohomological and divergence identities hold for random profiles") {
    std::mt19937_64 rng(11);
    const auto rule = gauss_legendre(64);
    for (int n = 0; n < 6; ++n) {
        const double kappa = 1.3 + n;
        const auto X = RuledSurfaceData::make(2 + n % 2, 1 + n % 3, kappa);
        const auto th = random_profile(rng, kappa);
        REQUIRE(check_boundary(th).ok);
        const double total = integrate(rule, [&](double z) {
            return ansatz_scalar_curvature(th, X, z) * (z + kappa);
        });
        CHECK(total == doctest::Approx(2 * X.base_scal + 4 * kappa).epsilon(1e-12));
        const double div = integrate(rule, [&](double z) { return momentum_laplacian(th, z) * (z + kappa); });
        CHECK(std::abs(div) < 1e-12);
    }
}

TEST_CASE("weighted curvature agrees with a term-by-term finite-difference evaluation") {
    std::mt19937_64 rng(3);
    const double kappa = 2.5;
    const auto X = RuledSurfaceData::make(2, 1, kappa);
    const auto th = random_profile(rng, kappa);
    const WeightData w{3.0, 4.0};
    for (double z = -0.9; z < 0.95; z += 0.15) {
        const auto d = fd(th, z);
        const double zk = z + kappa, f = z + w.b;
        const double P2 = 2 * d.d1 + zk * d.d2;
        const double scal = (X.base_scal - P2) / zk;
        const double lap_f = -d.d1 - d.v / zk;
        const double expect = f * f * scal - 2 * (w.p - 1) * f * lap_f - w.p * (w.p - 1) * d.v;
        CHECK(weighted_scalar_curvature(th, X, w, z) == doctest::Approx(expect).epsilon(1e-6));
    }
    // p = 1 leaves f^2 Scal
    const WeightData w1{3.0, 1.0};
    for (double z : {-0.5, 0.1, 0.8}) {
        const double a = weighted_scalar_curvature(th, X, w1, z);
        const double b = std::pow(z + 3.0, 2) * ansatz_scalar_curvature(th, X, z);
        CHECK(std::abs(a - b) < 1e-13 * (1 + std::abs(b)));
    }
}

TEST_CASE("weighted average is independent of the profile") {
    std::mt19937_64 rng(5);
    const auto rule = gauss_legendre(128);
    for (double kappa : {1.25, 2.0, 4.0}) {
        const auto X = RuledSurfaceData::make(2, 1, kappa);
        const WeightData w{b_kappa(kappa), 4.0};
        const double c0 = weighted_average_c(Profile::canonical(kappa), X, w, rule);
        for (int n = 0; n < 5; ++n)
            CHECK(std::abs(weighted_average_c(random_profile(rng, kappa), X, w, rule) - c0) < 1e-8);
        // equals the constant of the extremal solution
        CHECK(std::abs(solve_P(X).c - c0) < 1e-8);
    }
    // p = 1 numerator is the cohomological constant
    const auto X = RuledSurfaceData::make(2, 1, 2.0);
    const WeightData w1{2.5, 1.0};
    double den = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
        den += rule.weights[i] * (rule.nodes[i] + 2.0) / std::pow(rule.nodes[i] + 2.5, 2);
    CHECK(weighted_average_c(Profile::canonical(2.0), X, w1, rule) ==
          doctest::Approx((2 * X.base_scal + 8.0) / den).epsilon(1e-12));
}

TEST_CASE("symplectic potential round trip") {
    const auto rule = gauss_legendre(128);
    const auto u = to_symplectic(Profile::canonical(2.0), rule);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double z = rule.nodes[i];
        CHECK(u.upp()[i] == doctest::Approx(1.0 / (1 - z * z)).epsilon(1e-11));
    }
    const auto th = to_profile(u);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double z = rule.nodes[i];
        CHECK(std::abs(th.grid_values()[i] - (1 - z * z)) < 1e-13);
        CHECK(std::abs(th(z) - (1 - z * z)) < 1e-10);
    }
    // kappa below threshold gives a profile negative somewhere
    const auto X = RuledSurfaceData::make(2, 1, 1.005);
    try {
        to_symplectic(solve_P(X).profile(), rule);
        FAIL("expected NotAdmissible");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotAdmissible);
    }
}

TEST_CASE("profile JSON round trip") {
    const auto th = Profile::canonical(3.0);
    const auto back = Profile::from_json(th.to_json());
    CHECK(back.kind() == ProfileKind::Polynomial);
    CHECK(back(0.3) == doctest::Approx(th(0.3)));
    CHECK(th.to_json()["kind"] == "polynomial");

    const auto rule = gauss_legendre(32);
    const auto g = to_profile(to_symplectic(th, rule));
    const auto gj = g.to_json();
    CHECK(gj["kind"] == "grid");
    CHECK(Profile::from_json(gj)(0.3) == doctest::Approx(0.91).epsilon(1e-10));
    CHECK_THROWS_AS(Profile::from_json({{"kind", "spline"}, {"kappa", 2.0}, {"data", {}}}), Error);
}
