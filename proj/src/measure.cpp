#include "jlusin/measure.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "jlusin/error.hpp"

namespace jlusin {

namespace {

constexpr double kPi = std::numbers::pi;

double density_raw(double theta, const JacobiParams& p) {
    return std::pow(std::sin(0.5 * theta), 2.0 * p.alpha + 1.0) * std::pow(std::cos(0.5 * theta), 2.0 * p.beta + 1.0);
}

double mass_below(double theta, const JacobiParams& p) {
    if (theta <= 0.0) return 0.0;
    const double s = std::sin(0.5 * theta);
    return boost::math::beta(p.alpha + 1.0, p.beta + 1.0, s * s);
}

double mass_above(double theta, const JacobiParams& p) {
    if (theta >= kPi) return 0.0;
    const double c = std::cos(0.5 * theta);
    return boost::math::beta(p.beta + 1.0, p.alpha + 1.0, c * c);
}

double measure_by_beta(double a, double b, const JacobiParams& p) {
    constexpr double half = 0.5 * kPi;
    if (b - a <= 0.5 * std::min(a, kPi - b)) {
        const Rule r = gauss_legendre_on(24, a, b);
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * density_raw(r.x[i], p);
        return s;
    }
    if (b <= half) return mass_below(b, p) - mass_below(a, p);
    if (a >= half) return mass_above(a, p) - mass_above(b, p);
    return (mass_below(half, p) - mass_below(a, p)) + (mass_above(half, p) - mass_above(b, p));
}

}  // namespace

double density(double theta, const JacobiParams& p) {
    if (!(theta > 0.0 && theta < kPi)) throw DomainError("density: theta must lie in (0, pi)");
    return density_raw(theta, p);
}

double total_mass(const JacobiParams& p) { return boost::math::beta(p.alpha + 1.0, p.beta + 1.0); }

double measure_interval(double a, double b, const JacobiParams& p) {
    if (a > b) throw DomainError("measure_interval: requires a <= b");
    if (a < 0.0 || b > kPi) throw DomainError("measure_interval: endpoints must lie in [0, pi]");
    if (a == b) return 0.0;
    if (a == 0.0 && b == kPi) return total_mass(p);
    try {
        return std::max(0.0, measure_by_beta(a, b, p));
    } catch (const std::exception&) {
        return integrate_density([](double) { return 1.0; }, a, b, p, 1e-13);
    }
}

double measure(const Ball& ball, const JacobiParams& p) {
    if (!(ball.radius > 0.0)) throw DomainError("ball radius must be positive");
    return measure_interval(std::max(ball.center - ball.radius, 0.0), std::min(ball.center + ball.radius, kPi), p);
}

double ball_volume(double t, double theta, const JacobiParams& p) {
    if (!(t > 0.0)) throw DomainError("ball_volume: radius must be positive");
    if (!(theta > 0.0 && theta < kPi)) throw DomainError("ball_volume: center must lie in (0, pi)");
    return measure({theta, t}, p);
}

double ball_volume_surrogate(double r, double theta, const JacobiParams& p) {
    if (!(r > 0.0)) throw DomainError("surrogate radius must be positive");
    if (r >= kPi) return 1.0;
    return r * std::pow(theta + r, 2.0 * p.alpha + 1.0) * std::pow(kPi - theta + r, 2.0 * p.beta + 1.0);
}

double omega(double theta, double eta, double t, const JacobiParams& p) {
    const double psi = theta + eta;
    if (!(psi > 0.0 && psi < kPi)) return 0.0;
    return density_raw(psi, p) / ball_volume(t, theta, p);
}

Rule density_rule(double a, double b, const JacobiParams& p, int n) {
    if (!(a < b) || a < 0.0 || b > kPi) throw DomainError("density_rule: need 0 <= a < b <= pi");
    auto panel = [&](double lo, double hi, Rule& out) {
        const double elo = lo == 0.0 ? 2.0 * p.alpha + 1.0 : 0.0;
        const double ehi = hi == kPi ? 2.0 * p.beta + 1.0 : 0.0;
        const Rule r = singular_panel(n, lo, hi, elo, ehi);
        for (std::size_t i = 0; i < r.size(); ++i) {
            out.x.push_back(r.x[i]);
            out.w.push_back(r.w[i] * density_raw(r.x[i], p));
        }
    };
    Rule out;
    if (a == 0.0 && b == kPi) {
        panel(0.0, 0.5 * kPi, out);
        panel(0.5 * kPi, kPi, out);
    } else {
        panel(a, b, out);
    }
    return out;
}

Rule polynomial_density_rule(int n, const JacobiParams& p) {
    const Rule& g = gauss_jacobi(n, p.alpha, p.beta);
    const double scale = std::pow(2.0, -p.alpha - p.beta - 1.0);
    Rule r;
    for (std::size_t i = g.size(); i-- > 0;) {
        r.x.push_back(std::acos(g.x[i]));
        r.w.push_back(scale * g.w[i]);
    }
    return r;
}

double integrate_density(const std::function<double(double)>& f, double a, double b, const JacobiParams& p,
                         double tol) {
    if (a == b) return 0.0;
    auto apply = [&](int n) {
        const Rule r = density_rule(a, b, p, n);
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * f(r.x[i]);
        return s;
    };
    double prev = apply(16);
    for (int n = 32; n <= 1024; n *= 2) {
        const double cur = apply(n);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    throw ConvergenceError("integrate_density did not converge");
}

}  // namespace jlusin
