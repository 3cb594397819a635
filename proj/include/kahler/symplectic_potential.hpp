#pragma once

#include "kahler/numerics.hpp"

#include <vector>

namespace kahler {

/// Symplectic potential u on [-1, 1], stored through u'' at the nodes of a rule.
/// Admissible: u'' > 0 and (1 - z^2) u'' -> 1 at both ends.
class SymplecticPotential {
public:
    SymplecticPotential(QuadratureRule rule, std::vector<double> upp, double kappa,
                        double boundary_tol = default_config().admissible_boundary_tol);

    /// u_kappa'' = 1 / (1 - z^2)
    static SymplecticPotential canonical(QuadratureRule rule, double kappa);

    const QuadratureRule& rule() const { return rule_; }
    const std::vector<double>& upp() const { return upp_; }
    double kappa() const { return kappa_; }

    /// Extrapolated limits of (1 - z^2) u'' at z = -1 and z = +1.
    std::pair<double, double> boundary_limits() const;

private:
    QuadratureRule rule_;
    std::vector<double> upp_;
    double kappa_;
};

}  // namespace kahler
