#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "jlusin/error.hpp"
#include "jlusin/upsilon.hpp"
#include "oracles.hpp"

using namespace jlusin;

namespace {

// Integral of g against dPi_a, tanh-sinh in u; point masses at a = -1/2.
double pi_integral(double a, const std::function<double(double)>& g) {
    if (a == -0.5) return 0.5 * (g(-1.0) + g(1.0));
    const double c = std::tgamma(a + 1) / (std::sqrt(oracle::pi) * std::tgamma(a + 0.5));
    return c * oracle::integrate_edges([&](double u, double l, double r) { return std::pow(l * r, a - 0.5) * g(u); },
                                       -1.0, 1.0, 1e-11);
}

double q_direct(double th, double ph, double u, double v) {
    return 1 - u * std::sin(th / 2) * std::sin(ph / 2) - v * std::cos(th / 2) * std::cos(ph / 2);
}

double pair_integral(double au, double bv, double t, double th, double ph, double E) {
    return pi_integral(au, [&](double u) {
        return pi_integral(bv, [&](double v) { return std::pow(t * t + std::max(q_direct(th, ph, u, v), 0.0), -E); });
    });
}

// The four-regime definition written out term by term.
double upsilon_reference(double W, double s, double a, double b, double t, double th, double ph) {
    const double E = a + b + 1.5 + W / 4 + s / 2;
    const bool al = a < -0.5, bl = b < -0.5;
    if (!al && !bl) return pair_integral(a, b, t, th, ph, E);
    double acc = 1.0;
    const double ss = std::sin(th / 2) + std::sin(ph / 2), cc = std::cos(th / 2) + std::cos(ph / 2);
    for (int K = 0; K <= (al ? 1 : 0); ++K)
        for (int k = 0; k <= (al ? 2 : 0); ++k)
            for (int R = 0; R <= (bl ? 1 : 0); ++R)
                for (int r = 0; r <= (bl ? 2 : 0); ++r) {
                    const double au = al ? (K ? a + 1 : -0.5) : a;
                    const double bv = bl ? (R ? b + 1 : -0.5) : b;
                    acc += std::pow(ss, K * k) * std::pow(cc, R * r) *
                           pair_integral(au, bv, t, th, ph, E + K * k / 2.0 + R * r / 2.0);
                }
    return acc;
}

}  // namespace

TEST_SUITE("upsilon") {
    TEST_CASE("dPi rules are probability measures with the right moments") {
        for (double a : {-0.5, -0.3, 0.0, 0.5, 1.7}) {
            const auto r = pi_rule(a, 30);
            double m0 = 0, m2 = 0, m4 = 0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                m0 += r.weights[i];
                m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
                m4 += r.weights[i] * std::pow(r.nodes[i], 4);
                CHECK(r.oneMinus[i] == doctest::Approx(1 - r.nodes[i]).epsilon(1e-14).scale(1.0));
            }
            CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(m2 == doctest::Approx(pi_integral(a, [](double u) { return u * u; })).epsilon(1e-10));
            CHECK(m4 == doctest::Approx(pi_integral(a, [](double u) { return std::pow(u, 4); })).epsilon(1e-10));
            // u^2 is Beta(1/2, a + 1/2) distributed
            CHECK(m2 == doctest::Approx(0.5 / (a + 1)).epsilon(1e-12));
            CHECK(m4 == doctest::Approx(0.75 / ((a + 1) * (a + 2))).epsilon(1e-12));
        }
    }

    TEST_CASE("graded dPi rules match plain rules on smooth integrands") {
        for (double a : {-0.3, 0.5, 1.0}) {
            const auto g = pi_rule_graded(a, 1e-4, 60);
            double s0 = 0, s1 = 0;
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                s0 += g.weights[i];
                s1 += g.weights[i] * std::exp(g.nodes[i]);
            }
            CHECK(s0 == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(s1 == doctest::Approx(pi_integral(a, [](double u) { return std::exp(u); })).epsilon(1e-10));
        }
    }

    TEST_CASE("q in its cancellation-free form") {
        for (double th : {1e-3, 0.7, 2.0})
            for (double ph : {0.5, 3.1})
                for (double u : {-1.0, 0.2, 1.0})
                    for (double v : {-0.5, 1.0})
                        CHECK(q_fn(th, ph, u, v) == doctest::Approx(q_direct(th, ph, u, v)).epsilon(1e-12).scale(1.0));
        CHECK(q_fn(1.0, 1.0, 1.0, 1.0) == 0.0);
    }

    TEST_CASE("q is comparable to its polynomial surrogate") {
        double lo = 1e300, hi = 0;
        for (double th = 1e-3; th < 3.14; th *= 1.9)
            for (double ph = 2e-3; ph < 3.14; ph *= 1.7)
                for (double u : {-1.0, 0.0, 1 - 1e-6, 1.0})
                    for (double v : {-1.0, 0.5, 1 - 1e-6, 1.0}) {
                        const double c = q_comparable(th, ph, u, v);
                        if (c <= 0) continue;
                        const double r = q_fn(th, ph, u, v) / c;
                        lo = std::min(lo, r);
                        hi = std::max(hi, r);
                    }
        CHECK(lo > 0.05);
        CHECK(hi < 1.0);
    }

    TEST_CASE("all four regimes agree with the term-by-term definition") {
        const std::vector<std::pair<double, double>> ab{{0.5, 0.5}, {-0.5, 0.0}, {-0.9, 0.5}, {0.5, -0.9}, {-0.9, -0.9}};
        for (auto [a, b] : ab)
            for (double t : {0.05, 0.7, 3.0})
                for (auto [th, ph] : {std::pair{0.4, 2.2}, {1.0, 1.05}, {3.0, 0.1}}) {
                    const UpsilonSpec us{2.0, 1.0, JacobiParams{a, b}};
                    const double ref = upsilon_reference(2.0, 1.0, a, b, t, th, ph);
                    CHECK(upsilon(us, t, th, ph) == doctest::Approx(ref).epsilon(1e-7));
                }
    }

    TEST_CASE("near the diagonal with small t") {
        const UpsilonSpec us{2.0, 0.0, JacobiParams{0.5, 0.5}};
        const double ref = upsilon_reference(2.0, 0.0, 0.5, 0.5, 1e-3, 1.0, 1.0 + 1e-3);
        CHECK(upsilon(us, 1e-3, 1.0, 1.0 + 1e-3) == doctest::Approx(ref).epsilon(1e-6));
    }

    TEST_CASE("shift identity") {
        const JacobiParams p{-0.9, 0.5};
        for (double tau : {-1.0, 0.5, 2.0}) {
            const double a = upsilon({2.0, 0.5, p}, 0.3, 1.0, 2.0);
            const double b = upsilon({2.0 - 2 * tau, 0.5 + tau, p}, 0.3, 1.0, 2.0);
            CHECK(a == doctest::Approx(b).epsilon(1e-14));
        }
    }

    TEST_CASE("weighted norm of Upsilon against direct integration") {
        const UpsilonSpec us{2.0, 0.0, JacobiParams{0.5, 0.5}};
        const double th = 1.0, ph = 2.0;
        const double ref = std::sqrt(oracle::integrate(
            [&](double t) {
                const double y = upsilon(us, t, th, ph);
                return y * y * t;
            },
            1e-9, oracle::pi, 1e-10));
        CHECK(upsilon_bnorm(us, th, ph, 2.0) == doctest::Approx(ref).epsilon(1e-6));
    }

    TEST_CASE("domain errors") {
        const UpsilonSpec us{2.0, 0.0, JacobiParams{0.5, 0.5}};
        CHECK_THROWS_AS(upsilon(us, 0.0, 1.0, 2.0), DomainError);
        CHECK_THROWS_AS(upsilon(us, 4.0, 1.0, 2.0), DomainError);
        CHECK_THROWS_AS(pi_rule(-0.7, 10), DomainError);
        CHECK_THROWS_AS(upsilon_bnorm(us, 1.0, 1.0, 2.0), DomainError);
    }
}
