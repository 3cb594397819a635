#include "kahler/polynomial.hpp"

#include "kahler/error.hpp"

#include <algorithm>
#include <cmath>

namespace kahler {

Polynomial Polynomial::shifted_power(double shift, int n) {
    Polynomial out{1.0};
    const Polynomial lin{shift, 1.0};
    for (int i = 0; i < n; ++i) out = out * lin;
    return out;
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial{0.0};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
    return Polynomial(std::move(d));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
    auto d = divisor.c_;
    while (!d.empty() && d.back() == 0.0) d.pop_back();
    if (d.empty()) throw Error(ErrorCode::OutOfDomain, "division by zero polynomial");
    std::vector<double> rem = c_;
    if (rem.size() < d.size()) return {Polynomial{0.0}, *this};
    std::vector<double> quo(rem.size() - d.size() + 1, 0.0);
    for (std::size_t i = quo.size(); i-- > 0;) {
        const double q = rem[i + d.size() - 1] / d.back();
        quo[i] = q;
        for (std::size_t j = 0; j < d.size(); ++j) rem[i + j] -= q * d[j];
    }
    rem.resize(d.size() - 1);
    if (rem.empty()) rem.push_back(0.0);
    return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return Polynomial{0.0};
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& a) {
    auto c = a.c_;
    for (auto& v : c) v *= s;
    return Polynomial(std::move(c));
}

}  // namespace kahler
