#pragma once
// Reference routes that share no code with the library: Boost special functions and tanh-sinh quadrature.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/jacobi.hpp>
#include <cmath>
#include <numbers>

namespace oracle {

constexpr double pi = std::numbers::pi;

inline double density(double th, double a, double b) {
    return std::pow(std::sin(0.5 * th), 2 * a + 1) * std::pow(std::cos(0.5 * th), 2 * b + 1);
}

// Density from the distances to 0 and to pi, each exact near its own endpoint.
inline double density_edges(double left, double right, double a, double b) {
    return std::pow(std::sin(0.5 * left), 2 * a + 1) * std::pow(std::sin(0.5 * right), 2 * b + 1);
}

// ||P_n^{(a,b)}||^2 against (1-x)^a (1+x)^b dx, converted to the theta measure.
inline double norm_constant(int n, double a, double b) {
    using boost::math::lgamma;
    // a + b + 1 = 0 with n = 0: the (2n+a+b+1) Gamma(n+a+b+1) product tends to 1
    if (n == 0 && std::abs(a + b + 1) < 1e-14)
        return std::sqrt(1.0 / (std::tgamma(a + 1) * std::tgamma(b + 1)));
    const double log_h = (a + b + 1) * std::log(2.0) + lgamma(n + a + 1) + lgamma(n + b + 1) -
                         std::log(std::abs(2.0 * n + a + b + 1)) - lgamma(n + 1.0) - lgamma(n + a + b + 1);
    return std::sqrt(std::pow(2.0, a + b + 1) / std::exp(log_h));
}

inline double poly(int n, double a, double b, double th) {
    return norm_constant(n, a, b) * boost::math::jacobi(static_cast<unsigned>(n), a, b, std::cos(th));
}

// Integral over (lo, hi) of f, tanh-sinh handles the endpoint singularities.
template <class F>
double integrate(F f, double lo, double hi, double tol = 1e-13) {
    static boost::math::quadrature::tanh_sinh<double> ts(12);
    return ts.integrate(f, lo, hi, tol);
}

// f(x, left, right) with left = x - lo and right = hi - x, both exact near their endpoint.
template <class F>
double integrate_edges(F f, double lo, double hi, double tol = 1e-13) {
    static boost::math::quadrature::tanh_sinh<double> ts(12);
    // tanh-sinh passes xc = lo - x on the left half and hi - x on the right half
    return ts.integrate(
        [&](double x, double xc) {
            const double left = xc < 0 ? -xc : x - lo, right = xc < 0 ? hi - x : xc;
            return f(x, left, right);
        },
        lo, hi, tol);
}

// Substitution x = lo + s^m near each end: integrable endpoint powers become regular before rounding matters.
template <class F>
double integrate_graded(F f, double lo, double hi, int m = 10, double tol = 1e-13) {
    const double mid = 0.5 * (lo + hi), L = std::pow(mid - lo, 1.0 / m);
    auto left = [&](double s) { return m * std::pow(s, m - 1) * f(lo + std::pow(s, m)); };
    auto right = [&](double s) { return m * std::pow(s, m - 1) * f(hi - std::pow(s, m)); };
    return integrate(left, 0.0, L, tol) + integrate(right, 0.0, L, tol);
}

// Panels keep oscillatory integrands resolved; the density is evaluated from the distances to 0 and pi, so
// neither edge loses digits.
template <class F>
double integrate_mu(F f, double a, double b, double lo = 0.0, double hi = pi, int panels = 16) {
    static boost::math::quadrature::tanh_sinh<double> ts(12);
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double A = lo + (hi - lo) * k / panels, B = k + 1 == panels ? hi : lo + (hi - lo) * (k + 1) / panels;
        acc += ts.integrate(
            [&](double th, double xc) {
                const double left = A + (xc < 0 ? -xc : th - A), right = (pi - B) + (xc < 0 ? B - th : xc);
                return f(th) * density_edges(left, right, a, b);
            },
            A, B, 1e-13);
    }
    return acc;
}

}  // namespace oracle
