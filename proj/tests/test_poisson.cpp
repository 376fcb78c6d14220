#include <cmath>
#include <vector>

#include "doctest.h"
#include "jlusin/error.hpp"
#include "jlusin/jacobi.hpp"
#include "jlusin/poisson.hpp"
#include "oracles.hpp"

using namespace jlusin;

namespace {

// Classical Poisson kernel for the circle.
double circle_poisson(double r, double x) { return (1 - r * r) / (1 - 2 * r * std::cos(x) + r * r); }

double chebyshev_kernel(double t, double th, double ph) {
    const double r = std::exp(-t);
    return (circle_poisson(r, th - ph) + circle_poisson(r, th + ph)) / (2 * oracle::pi);
}

// Truncated spectral sum built from the Boost route, no series machinery.
double reference_derivative(int M, int N, int L, double t, double th, double ph, const JacobiParams& p, int nmax) {
    double acc = 0;
    for (int n = 0; n <= nmax; ++n) {
        const double s = std::abs(n + p.rho());
        const double tp = std::pow(-s, M) * std::exp(-t * s);
        const double h = 1e-3;
        auto dth = [&](double x, int order) {
            auto f = [&](double y) { return oracle::poly(n, p.alpha, p.beta, y); };
            if (order == 0) return f(x);
            if (order == 1) return (f(x + h) - f(x - h)) / (2 * h);
            return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
        };
        acc += tp * dth(th, N) * dth(ph, L);
    }
    return acc;
}

}  // namespace

TEST_SUITE("poisson") {
    TEST_CASE("Chebyshev oracle") {
        const JacobiParams p{-0.5, -0.5};
        for (double th : {0.1, 0.9, 2.0, 3.0})
            for (double ph : {0.2, 1.5, 2.9})
                for (double t : {0.05, 0.5, 2.0}) {
                    const double ref = chebyshev_kernel(t, th, ph);
                    CHECK(poisson_kernel(t, th, ph, p).value == doctest::Approx(ref).epsilon(1e-11));
                }
    }

    TEST_CASE("kernel is positive and symmetric") {
        for (const JacobiParams& p : {JacobiParams{0.5, 0.5}, JacobiParams{-0.9, 0.5}, JacobiParams{-0.9, -0.9}})
            for (double t : {0.01, 0.3, 3.0}) {
                const double a = poisson_kernel(t, 0.7, 2.1, p).value;
                CHECK(a > 0);
                CHECK(poisson_kernel(t, 2.1, 0.7, p).value == doctest::Approx(a).epsilon(1e-12));
            }
    }

    TEST_CASE("semigroup property through the kernel") {
        const JacobiParams p{0.5, -0.3};
        const double t = 0.4, s = 0.7, th = 1.1, ph = 2.3;
        const double lhs = oracle::integrate_mu(
            [&](double psi) { return poisson_kernel(t, th, psi, p).value * poisson_kernel(s, psi, ph, p).value; },
            p.alpha, p.beta);
        CHECK(lhs == doctest::Approx(poisson_kernel(t + s, th, ph, p).value).epsilon(1e-9));
    }

    TEST_CASE("kernel reproduces the semigroup on finite expansions") {
        const JacobiParams p{-0.9, 0.5};
        const std::vector<double> f{0.5, -1.0, 0.0, 0.75};
        const double t = 0.3, th = 1.9;
        const double via_kernel = oracle::integrate_mu(
            [&](double ph) {
                double fv = 0;
                for (std::size_t n = 0; n < f.size(); ++n) fv += f[n] * oracle::poly(static_cast<int>(n), p.alpha, p.beta, ph);
                return poisson_kernel(t, th, ph, p).value * fv;
            },
            p.alpha, p.beta);
        CHECK(semigroup_apply(f, t, th, p) == doctest::Approx(via_kernel).epsilon(1e-9));
    }

    TEST_CASE("derivatives match a direct spectral sum") {
        const JacobiParams p{0.5, 0.5};
        for (int M = 0; M <= 2; ++M)
            for (int N = 0; N <= 2; ++N)
                for (int L = 0; L <= 1; ++L) {
                    if (M + N + L == 0) continue;
                    const DerivativeSpec d{M, N, Flavor::Delta, L, 0};
                    const double t = 0.6, th = 0.8, ph = 2.2;
                    const double ref = reference_derivative(M, N, L, t, th, ph, p, 80);
                    CHECK(kernel_derivative(d, t, th, ph, p).value == doctest::Approx(ref).epsilon(1e-5).scale(1e-3));
                }
    }

    TEST_CASE("interlaced flavor equals the binomial expansion") {
        for (const JacobiParams& p : {JacobiParams{0.5, 0.5}, JacobiParams{-0.9, 0.5}})
            for (int N = 0; N <= 4; ++N)
                for (int M = 0; M <= 2; ++M) {
                    const DerivativeSpec d{M, N, Flavor::D, 0, 0};
                    const auto tr = SpectralTruncation::for_spec(d);
                    for (double t : {0.2, 1.5}) {
                        const double a = kernel_derivative(d, t, 1.0, 2.0, p, tr).value;
                        const double b = iden1_expansion(d, t, 1.0, 2.0, p, tr).value;
                        CHECK(a == doctest::Approx(b).epsilon(1e-8).scale(1e-12));
                    }
                }
    }

    TEST_CASE("D^2 acts as d_t^2 - lambda_0") {
        const JacobiParams p{0.3, -0.4};
        const double lam0 = eigenvalue(0, p);
        const double t = 0.5, th = 0.7, ph = 1.9;
        const double d2 = kernel_derivative({0, 2, Flavor::D, 0, 0}, t, th, ph, p).value;
        const double tt = kernel_derivative({2, 0, Flavor::Delta, 0, 0}, t, th, ph, p).value;
        const double h = poisson_kernel(t, th, ph, p).value;
        CHECK(d2 == doctest::Approx(tt - lam0 * h).epsilon(1e-9));
    }

    TEST_CASE("flavors coincide at N = 0 and N = 1") {
        const JacobiParams p{0.5, -0.9};
        for (int N : {0, 1}) {
            const double a = kernel_derivative({1, N, Flavor::Delta, 0, 0}, 0.4, 1.2, 2.0, p).value;
            const double b = kernel_derivative({1, N, Flavor::D, 0, 0}, 0.4, 1.2, 2.0, p).value;
            CHECK(a == doctest::Approx(b).epsilon(1e-13));
        }
    }

    TEST_CASE("binomial coefficients of the interlaced identity") {
        const auto c = binomial_expansion_coefficients(4);
        REQUIRE(c.size() == 3);
        CHECK(c[0] == 1.0);
        CHECK(c[1] == -2.0);
        CHECK(c[2] == 1.0);
        for (int n = 0; n < 6; ++n) {
            const JacobiParams p{0.5, 0.5};
            const DerivativeSpec d{1, 4, Flavor::D, 0, 0};
            CHECK(mode_multiplier(n, d, p) == doctest::Approx(mode_multiplier_binomial(n, d, p)).epsilon(1e-12));
        }
    }

    TEST_CASE("truncation reports its tail") {
        const KernelValue v = poisson_kernel(0.01, 1.0, 1.2, {0.5, 0.5});
        CHECK(v.termsUsed > 100);
        CHECK(v.tailBound < 1e-10 * std::abs(v.value));
    }

    TEST_CASE("domain errors") {
        const JacobiParams p{0.5, 0.5};
        CHECK_THROWS(poisson_kernel(-1.0, 1.0, 2.0, p));
        CHECK_THROWS_AS(DerivativeSpec({-1, 0, Flavor::Delta, 0, 0}).validate(), ConfigError);
        CHECK(parse_flavor("D") == Flavor::D);
        CHECK_THROWS(parse_flavor("x"));
    }
}
