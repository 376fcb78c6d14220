#include "jlusin/upsilon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "jlusin/error.hpp"
#include "jlusin/quadrature.hpp"

namespace jlusin {

namespace {

constexpr double kPi = std::numbers::pi;

PiMeasureRule point_masses() {
    PiMeasureRule r;
    r.a = -0.5;
    r.nodes = {-1.0, 1.0};
    r.weights = {0.5, 0.5};
    r.oneMinus = {2.0, 0.0};
    return r;
}

void check_a(double a) {
    if (!(a >= -0.5)) throw DomainError("dPi_a requires a >= -1/2");
}

double log_pi_normalizer(double a) { return std::lgamma(a + 1.0) - 0.5 * std::log(kPi) - std::lgamma(a + 0.5); }

// sum over the rule pair of w_u w_v (t^2 + q)^(-(E + m/2)) for m = 0..4
std::array<double, 5> pair_sums(const PiMeasureRule& U, const PiMeasureRule& V, double base0, double S, double C,
                                double E) {
    std::array<double, 5> acc{};
    for (std::size_t i = 0; i < U.nodes.size(); ++i) {
        const double bu = base0 + U.oneMinus[i] * S;
        for (std::size_t j = 0; j < V.nodes.size(); ++j) {
            const double b = bu + V.oneMinus[j] * C;
            const double w = U.weights[i] * V.weights[j];
            double v = w * std::pow(b, -E);
            const double step = 1.0 / std::sqrt(b);
            for (int m = 0; m < 5; ++m) {
                acc[static_cast<std::size_t>(m)] += v;
                v *= step;
            }
        }
    }
    return acc;
}

PiMeasureRule rule_for(double a, double scale, double eps, int npts) {
    if (a == -0.5) return point_masses();
    if (scale > 0.0 && eps / scale < 0.5) return pi_rule_graded(a, eps / scale, npts);
    return pi_rule(a, npts);
}

}  // namespace

PiMeasureRule pi_rule(double a, int npts) {
    check_a(a);
    if (a == -0.5) return point_masses();
    if (npts < 1) throw DomainError("pi_rule: need at least one node");
    const Rule& g = gauss_jacobi(npts, a - 0.5, a - 0.5);
    PiMeasureRule r;
    r.a = a;
    r.nodes = g.x;
    r.weights = g.w;
    double total = 0.0;
    for (double w : g.w) total += w;
    for (auto& w : r.weights) w /= total;
    r.oneMinus.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) r.oneMinus[i] = 1.0 - g.x[i];
    return r;
}

PiMeasureRule pi_rule_graded(double a, double h, int npts) {
    check_a(a);
    if (a == -0.5) return point_masses();
    if (!(h > 0.0)) throw DomainError("pi_rule_graded: scale must be positive");
    const double e = a - 0.5;
    const double norm = std::exp(log_pi_normalizer(a));
    const int n = std::max(8, npts / 3);
    std::vector<double> cuts{0.0};
    for (double c = h; c < 1.0; c *= 4.0) cuts.push_back(c);
    cuts.push_back(2.0);
    PiMeasureRule r;
    r.a = a;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        const Rule pr = singular_panel(n, lo, hi, lo == 0.0 ? e : 0.0, hi == 2.0 ? e : 0.0);
        for (std::size_t i = 0; i < pr.size(); ++i) {
            const double w = pr.x[i];
            r.oneMinus.push_back(w);
            r.nodes.push_back(1.0 - w);
            r.weights.push_back(pr.w[i] * norm * std::pow(w * (2.0 - w), e));
        }
    }
    return r;
}

double q_fn(double theta, double phi, double u, double v) {
    const double sd = std::sin(0.25 * (theta - phi));
    const double q = 2.0 * sd * sd + (1.0 - u) * std::sin(0.5 * theta) * std::sin(0.5 * phi) +
                     (1.0 - v) * std::cos(0.5 * theta) * std::cos(0.5 * phi);
    return q < 1e-15 && q > -1e-15 ? std::max(q, 0.0) : q;
}

double q_comparable(double theta, double phi, double u, double v) {
    return (theta - phi) * (theta - phi) + (1.0 - u) * theta * phi + (1.0 - v) * (kPi - theta) * (kPi - phi);
}

double upsilon(const UpsilonSpec& spec, double t, double theta, double phi, int npts) {
    if (!(t > 0.0 && t <= kPi)) throw DomainError("upsilon: t must lie in (0, pi]");
    if (!(theta > 0.0 && theta < kPi && phi > 0.0 && phi < kPi)) throw DomainError("upsilon: angles in (0, pi)");
    const JacobiParams& p = spec.p;
    const double sd = std::sin(0.25 * (theta - phi));
    const double base0 = t * t + 2.0 * sd * sd;
    const double S = std::sin(0.5 * theta) * std::sin(0.5 * phi);
    const double C = std::cos(0.5 * theta) * std::cos(0.5 * phi);
    const double E = spec.exponent();
    const double sinsum = std::sin(0.5 * theta) + std::sin(0.5 * phi);
    const double cossum = std::cos(0.5 * theta) + std::cos(0.5 * phi);

    const Regime reg = spec.regime();
    if (reg == Regime::I) {
        const auto U = rule_for(p.alpha, S, base0, npts);
        const auto V = rule_for(p.beta, C, base0, npts);
        return pair_sums(U, V, base0, S, C, E)[0];
    }
    // dPi^{a,K}: K = 0 gives dPi_{-1/2}, K = 1 gives dPi_{a+1}
    const bool a_split = p.alpha < -0.5, b_split = p.beta < -0.5;
    double total = 1.0;
    for (int K = 0; K <= (a_split ? 1 : 0); ++K) {
        const double au = a_split ? (K == 1 ? p.alpha + 1.0 : -0.5) : p.alpha;
        const auto U = rule_for(au, S, base0, npts);
        for (int R = 0; R <= (b_split ? 1 : 0); ++R) {
            const double bv = b_split ? (R == 1 ? p.beta + 1.0 : -0.5) : p.beta;
            const auto V = rule_for(bv, C, base0, npts);
            const auto sums = pair_sums(U, V, base0, S, C, E);
            for (int k = 0; k <= (a_split ? 2 : 0); ++k)
                for (int r = 0; r <= (b_split ? 2 : 0); ++r) {
                    const int mk = K * k, mr = R * r;
                    total += std::pow(sinsum, mk) * std::pow(cossum, mr) * sums[static_cast<std::size_t>(mk + mr)];
                }
        }
    }
    return total;
}

double upsilon_bnorm(const UpsilonSpec& spec, double theta, double phi, double Wnorm, const UpsilonNormOptions& opt) {
    const double d = std::abs(theta - phi);
    if (d < 1e-9) throw DomainError("upsilon_bnorm: theta and phi coincide");
    if (!(Wnorm >= 1.0)) throw DomainError("upsilon_bnorm: weight exponent must be at least 1");
    if (opt.panels < 1 || opt.nodes_per_panel < 1) throw DomainError("upsilon_bnorm: empty mesh");
    const double t0 = std::max(1e-6, d * 1e-3);
    const double u0 = std::log(t0), u1 = std::log(kPi);
    const double step = (u1 - u0) / opt.panels;
    const Rule& g = gauss_legendre(opt.nodes_per_panel);
    double acc = 0.0;
    for (int k = 0; k < opt.panels; ++k) {
        const double a = u0 + k * step, h = 0.5 * step;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = std::exp(a + h * (1.0 + g.x[i]));
            const double y = upsilon(spec, t, theta, phi, opt.npts);
            acc += h * g.w[i] * y * y * std::pow(t, Wnorm);
        }
    }
    // Upsilon is nonincreasing in t near zero, so Upsilon(t0) majorizes the remainder
    const double y0 = upsilon(spec, t0, theta, phi, opt.npts);
    acc += y0 * y0 * std::pow(t0, Wnorm) / Wnorm;
    return std::sqrt(acc);
}

}  // namespace jlusin
