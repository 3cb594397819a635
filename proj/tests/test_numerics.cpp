#include "kahler/error.hpp"
#include "kahler/numerics.hpp"
#include "kahler/polynomial.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace kahler;

TEST_CASE("three-point rule matches the closed form") {
    const auto r = gauss_legendre(3);
    CHECK(r.nodes[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
    CHECK(r.nodes[1] == doctest::Approx(0.0));
    CHECK(r.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
    CHECK(r.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("Gauss-Legendre rules are exact to degree 2n-1") {
    for (int n : {4, 17, 64, 200}) {
        const auto r = gauss_legendre(n, 0.0, 2.0);
        for (std::size_t i = 1; i < r.size(); ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
        CHECK(std::accumulate(r.weights.begin(), r.weights.end(), 0.0) ==
              doctest::Approx(2.0).epsilon(1e-13));
        const int d = 2 * n - 1;
        const double exact = std::pow(2.0, d + 1) / (d + 1);
        const double got = integrate(r, [d](double x) { return std::pow(x, d); });
        CHECK(std::abs(got - exact) / exact < 1e-12);
    }
}

TEST_CASE("composite rule integrates across breakpoints") {
    const auto r = composite_rule({-1.0, -0.2, 0.5, 1.0}, 20);
    CHECK(r.size() == 60u);
    const double got = integrate(r, [](double x) { return std::abs(x - 0.5) + std::exp(x); });
    const double exact = (1.5 * 1.5) / 2 + 0.25 / 2 + std::exp(1.0) - std::exp(-1.0);
    CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    CHECK_THROWS_AS(composite_rule({0.0, 0.0}, 4), Error);
}

TEST_CASE("non-finite integrand is reported") {
    const auto r = gauss_legendre(8);
    try {
        integrate(r, [](double x) { return x > 0.5 ? NAN : 1.0; });
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteIntegrand);
    }
}

TEST_CASE("Brent finds the Dottie number") {
    const auto r = brent_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
    CHECK(std::abs(r.root - 0.73908513321516064) < 1e-12);
    CHECK(r.residual < 1e-14);
    try {
        brent_root([](double x) { return x * x + 1; }, -1.0, 1.0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoBracket);
    }
}

TEST_CASE("least squares recovers a consistent solution and flags rank loss") {
    Eigen::MatrixXd A(4, 2);
    A << 1, 0, 1, 1, 1, 2, 1, 3;
    Eigen::VectorXd y(4);
    y << 1, 3, 5, 7;
    const auto ls = solve_least_squares(A, y);
    CHECK(ls.x(0) == doctest::Approx(1.0));
    CHECK(ls.x(1) == doctest::Approx(2.0));
    CHECK(ls.residual < 1e-13);

    Eigen::MatrixXd B(3, 2);
    B << 1, 2, 2, 4, 3, 6;
    try {
        solve_least_squares(B, Eigen::VectorXd::Ones(3));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
    }
}

TEST_CASE("log-log slope of a power law") {
    std::vector<double> x{8, 16, 32, 64}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
    CHECK(loglog_slope(x, y) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("polynomial arithmetic and division") {
    const Polynomial p = Polynomial::shifted_power(2.0, 3);  // (x+2)^3
    CHECK(p(1.0) == doctest::Approx(27.0));
    CHECK(p.derivative()(1.0) == doctest::Approx(27.0));
    const auto [q, r] = p.divmod(Polynomial{2.0, 1.0});
    CHECK(q(3.0) == doctest::Approx(25.0));
    CHECK(std::abs(r(0.0)) < 1e-14);
}
