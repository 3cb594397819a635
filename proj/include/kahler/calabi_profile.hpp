#pragma once

#include "kahler/jet.hpp"
#include "kahler/numerics.hpp"
#include "kahler/polynomial.hpp"
#include "kahler/symplectic_potential.hpp"

#include <json.hpp>

#include <array>
#include <functional>
#include <memory>
#include <random>

namespace kahler {

/// Ruled surface over a curve of genus g >= 2 with a degree-l line bundle.
struct RuledSurfaceData {
    int genus = 2;
    int degree = 1;
    double kappa = 2.0;
    double base_scal = -4.0;  // 4(1 - g) / l

    static RuledSurfaceData make(int genus, int degree, double kappa);
};

/// Weight f = z + b raised to the power p.
struct WeightData {
    double b = 2.0;
    double p = 4.0;
};

enum class ProfileKind { Polynomial, Grid, Derived };

/// Momentum profile Theta(z) on [-1, 1].
class Profile {
public:
    /// Theta = P / (z + kappa).
    static Profile polynomial(Polynomial P, double kappa);
    /// Theta = 1 - z^2.
    static Profile canonical(double kappa);
    /// Node samples of Theta; evaluated through the interpolating Legendre series.
    static Profile grid(const QuadratureRule& rule, std::vector<double> theta, double kappa);
    /// Anything else with exact jets, e.g. points along a path.
    static Profile derived(std::function<Jet2(double)> jet, double kappa);

    ProfileKind kind() const { return kind_; }
    double kappa() const { return kappa_; }

    Jet2 jet(double z) const { return eval_(z); }
    double operator()(double z) const { return eval_(z).v; }

    const Polynomial& numerator() const;               // polynomial kind only
    const std::vector<double>& grid_nodes() const;     // grid kind only
    const std::vector<double>& grid_values() const;    // grid kind only

    nlohmann::json to_json() const;
    static Profile from_json(const nlohmann::json& j);

private:
    ProfileKind kind_ = ProfileKind::Derived;
    double kappa_ = 2.0;
    std::function<Jet2(double)> eval_;
    std::shared_ptr<const Polynomial> poly_;
    std::shared_ptr<const std::vector<double>> nodes_;
    std::shared_ptr<const std::vector<double>> values_;
};

struct BoundaryReport {
    // Theta(-1), Theta(1), Theta'(-1) - 2, Theta'(1) + 2
    std::array<double, 4> defects{};
    bool ok = false;
};

BoundaryReport check_boundary(const Profile& theta, double tol = default_config().boundary_tol);

/// (s_C - P'') / (z + kappa) with P = (z + kappa) Theta.
double ansatz_scalar_curvature(const Profile& theta, const RuledSurfaceData& X, double z);

/// Laplacian of the moment map z; equals -P' / (z + kappa).
double momentum_laplacian(const Profile& theta, double z);

/// f^2 Scal - 2(p-1) f Lap(f) - p(p-1)|df|^2 with f = z + b.
double weighted_scalar_curvature(const Profile& theta, const RuledSurfaceData& X,
                                 const WeightData& w, double z);

/// Average of the weighted curvature against f^{-(p+1)} (z + kappa) dz.
double weighted_average_c(const Profile& theta, const RuledSurfaceData& X, const WeightData& w,
                          const QuadratureRule& rule);

SymplecticPotential to_symplectic(const Profile& theta, const QuadratureRule& rule);
Profile to_profile(const SymplecticPotential& u);

/// Theta = (1 - z^2)(1 + (1 - z^2) q) with quadratic q, coefficients uniform in [-amp, amp].
/// Admissible for amp < 1/3.
Profile random_profile(std::mt19937_64& rng, double kappa, double amp = 0.3);

}  // namespace kahler
