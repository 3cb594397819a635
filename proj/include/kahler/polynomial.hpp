#pragma once

#include <initializer_list>
#include <vector>

namespace kahler {

/// Dense real polynomial, coefficients in ascending degree.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> c) : c_(c) {}
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) {}

    static Polynomial constant(double a) { return Polynomial{a}; }
    /// (x + shift)^n expanded
    static Polynomial shifted_power(double shift, int n);

    const std::vector<double>& coefficients() const { return c_; }
    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }

    double operator()(double x) const;
    Polynomial derivative() const;

    /// Quotient and remainder of division by a monic-or-not divisor.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double s, const Polynomial& a);

private:
    std::vector<double> c_;
};

}  // namespace kahler
