#include "kahler/error.hpp"
#include "kahler/mabuchi.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace kahler;

namespace {

const PKappaSolution& sol_at(double kappa) {
    static std::map<double, PKappaSolution> cache;
    auto it = cache.find(kappa);
    if (it == cache.end()) it = cache.emplace(kappa, solve_P(RuledSurfaceData::make(2, 1, kappa))).first;
    return it->second;
}

std::vector<double> sample(const QuadratureRule& rule, const BumpDirection& v) {
    std::vector<double> out(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) out[i] = v(rule.nodes[i]);
    return out;
}

SymplecticPotential plus(const SymplecticPotential& u, const std::vector<double>& v, double h) {
    auto upp = u.upp();
    for (std::size_t i = 0; i < upp.size(); ++i) upp[i] += h * v[i];
    return SymplecticPotential(u.rule(), upp, u.kappa());
}

BumpDirection random_bump(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-0.6, 0.6), r(0.1, 0.35), a(-1.0, 1.0);
    return BumpDirection::make(c(rng), r(rng), a(rng));
}

}  // namespace

TEST_CASE("energy vanishes at the canonical potential") {
    const auto& sol = sol_at(2.0);
    const auto rule = gauss_legendre(128);
    CHECK(std::abs(mabuchi_energy_amt(SymplecticPotential::canonical(rule, 2.0), sol)) < 1e-15);
}

TEST_CASE("doubling u'' matches the two closed-form pieces") {
    const double kappa = 2.0;
    const auto& sol = sol_at(kappa);
    const auto rule = gauss_legendre(128);
    std::vector<double> upp(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) upp[i] = 2.0 / (1.0 - rule.nodes[i] * rule.nodes[i]);
    // boundary limit is 2, so skip the admissibility check
    const SymplecticPotential u(rule, upp, kappa, 10.0);
    // P / (1 - z^2) is a cubic; integrate each piece with an independent rule
    const Polynomial one_m{1.0, 0.0, -1.0};
    const auto [q, r] = sol.P.divmod(one_m);
    CHECK(r.degree() <= 1);
    const auto ref = gauss_legendre(40);
    const double first = integrate(ref, [&](double z) { return q(z) / std::pow(z + sol.b, 3); });
    const double b = sol.b;
    // int (z + kappa)/(z + b)^3 dz in closed form
    auto F = [&](double z) { return -1.0 / (z + b) + (b - kappa) / (2.0 * (z + b) * (z + b)); };
    const double second = F(1.0) - F(-1.0);
    CHECK(mabuchi_energy_amt(u, sol) == doctest::Approx(first - std::log(2.0) * second).epsilon(1e-12));
}

TEST_CASE("non-positive u'' is rejected") {
    const auto rule = gauss_legendre(16);
    auto upp = SymplecticPotential::canonical(rule, 2.0).upp();
    upp[5] = -1.0;
    CHECK_THROWS_AS(SymplecticPotential(rule, upp, 2.0), Error);
}

TEST_CASE("gradient agrees with central differences") {
    std::mt19937_64 rng(17);
    const auto rule = gauss_legendre(128);
    for (double kappa : {1.5, 3.0}) {
        const auto& sol = sol_at(kappa);
        for (int trial = 0; trial < 5; ++trial) {
            const auto u = to_symplectic(random_profile(rng, kappa), rule);
            const auto v = sample(rule, random_bump(rng));
            const double g = mabuchi_gradient_amt(u, sol, v);
            const double h = 1e-5;
            const double fd = (mabuchi_energy_amt(plus(u, v, h), sol) - mabuchi_energy_amt(plus(u, v, -h), sol)) / (2 * h);
            CHECK(std::abs(g - fd) < 1e-7 * (1 + std::abs(g)));
        }
        const std::vector<double> zero(rule.size(), 0.0);
        CHECK(mabuchi_gradient_amt(SymplecticPotential::canonical(rule, kappa), sol, zero) == 0.0);
    }
}

TEST_CASE("the cKEM potential is a critical point") {
    std::mt19937_64 rng(23);
    const auto rule = gauss_legendre(128);
    for (double kappa : {1.5, 2.0, 4.0}) {
        const auto& sol = sol_at(kappa);
        const auto ustar = to_symplectic(sol.profile(), rule);
        for (int i = 0; i < 10; ++i) {
            const auto v = sample(rule, random_bump(rng));
            CHECK(std::abs(mabuchi_gradient_amt(ustar, sol, v)) < 1e-7);
        }
        // and it lowers the energy relative to u_kappa (convexity)
        CHECK(mabuchi_energy_amt(ustar, sol) < 0.0);
    }
}

TEST_CASE("bumps with support outside (-1, 1) are rejected") {
    CHECK_THROWS_AS(BumpDirection::make(0.8, 0.3, 1.0), Error);
    CHECK_THROWS_AS(BumpDirection::make(0.0, -0.1, 1.0), Error);
    const auto b = BumpDirection::make(0.1, 0.2, 3.0);
    CHECK(b(0.1) == doctest::Approx(3.0 * std::exp(-1.0)));
    CHECK(b(0.3) == 0.0);
    CHECK(b(-0.2) == 0.0);
}

TEST_CASE("energies along a bump in the negative region diverge linearly") {
    const double k0 = kappa_zero(2, 1);
    const double kappa = 0.5 * (1.0 + k0);
    const auto sol = solve_P(RuledSurfaceData::make(2, 1, kappa));
    REQUIRE(classify(sol) == CkemLabel::NegativeSomewhere);
    const auto bump = auto_bump(sol);
    CHECK(bump_slope(sol, bump) == doctest::Approx(-2.0).epsilon(1e-12));
    const std::vector<double> ks{0, 1, 2, 4, 8, 16, 32, 64};
    const auto res = unboundedness_probe(sol, bump, ks);
    CHECK(std::abs(res.energy[0]) < 1e-15);
    CHECK(res.strictly_decreasing);
    CHECK(res.diverges);
    CHECK(res.energy.back() < res.energy[1] - 100.0);
    CHECK(std::abs(res.fitted_slope / res.predicted_slope - 1.0) < 0.02);

    // a bump reaching into P > 0 is refused
    const auto wide = BumpDirection::make(0.0, 0.95, 1.0);
    CHECK_THROWS_AS(unboundedness_probe(sol, wide, ks), Error);
    // above the threshold there is no negative region to probe
    CHECK_THROWS_AS(auto_bump(sol_at(2.0)), Error);
}

TEST_CASE("affine-log fit recovers exact coefficients") {
    std::vector<double> k, e;
    for (double x : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        k.push_back(x);
        e.push_back(3.0 - 1.5 * x + 0.25 * std::log(x));
    }
    CHECK(affine_log_slope(k, e) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("path integral is closed and proportional to the closed form") {
    const double kappa = 2.0;
    const auto& sol = sol_at(kappa);
    const auto base = Profile::canonical(kappa);
    std::mt19937_64 rng(29);

    CHECK(mabuchi_path_integral(straight_path(base, base), sol) == 0.0);

    const auto p1 = random_profile(rng, kappa);
    const auto p2 = random_profile(rng, kappa);
    const double loop = mabuchi_path_integral(straight_path(base, p1), sol) +
                        mabuchi_path_integral(straight_path(p1, p2), sol) +
                        mabuchi_path_integral(straight_path(p2, base), sol);
    CHECK(std::abs(loop) < 1e-8);

    std::vector<double> lambdas;
    for (int i = 0; i < 10; ++i) lambdas.push_back(calibrate_amt_constant(sol, random_profile(rng, kappa)));
    const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
    CHECK(*lo > 0.0);
    CHECK((*hi - *lo) / *lo < 1e-5);
    CHECK(lambdas[0] == doctest::Approx(1.0).epsilon(1e-5));
}
