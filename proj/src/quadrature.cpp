#include "jlusin/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "jlusin/error.hpp"
#include "jlusin/jacobi.hpp"

namespace jlusin {

namespace {

Rule golub_welsch(int n, double a, double b) {
    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        diag[k] = k == 0 ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        double v;
        if (k == 1)
            v = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
        else
            v = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
        sub[k - 1] = std::sqrt(v);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)), Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw ConvergenceError("Golub-Welsch eigensolver failed");
    const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(a + b + 2.0));
    Rule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        r.x[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        r.w[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return r;
}

void polish(Rule& r, int n, double a, double b) {
    const double logG = (a + b + 1.0) * std::log(2.0) + std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                        std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        double x = r.x[i];
        double d[2];
        for (int it = 0; it < 3; ++it) {
            eval_jacobi_derivatives(n, a, b, x, 1, d);
            const double nx = x - d[0] / d[1];
            if (!(std::abs(nx) < 1.0)) break;
            x = nx;
        }
        eval_jacobi_derivatives(n, a, b, x, 1, d);
        r.x[i] = x;
        r.w[i] = std::exp(logG) / ((1.0 - x) * (1.0 + x) * d[1] * d[1]);
    }
}

}  // namespace

const Rule& gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw DomainError("quadrature size must be positive");
    if (!(a > -1.0) || !(b > -1.0)) throw DomainError("Gauss-Jacobi exponents must exceed -1");
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, Rule> cache;
    std::lock_guard lock(mu);
    const auto key = std::make_tuple(n, a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Rule r = golub_welsch(n, a, b);
    polish(r, n, a, b);
    return cache.emplace(key, std::move(r)).first->second;
}

Rule gauss_legendre_on(int n, double lo, double hi) {
    const Rule& g = gauss_legendre(n);
    Rule r;
    const double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
    r.x.resize(g.size());
    r.w.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        r.x[i] = m + h * g.x[i];
        r.w[i] = h * g.w[i];
    }
    return r;
}

Rule singular_panel(int n, double lo, double hi, double e_lo, double e_hi) {
    if (e_lo == 0.0 && e_hi == 0.0) return gauss_legendre_on(n, lo, hi);
    // Reference weight (1-y)^e_hi (1+y)^e_lo on [-1,1].
    const Rule& g = gauss_jacobi(n, e_hi, e_lo);
    const double h = 0.5 * (hi - lo);
    Rule r;
    r.x.resize(g.size());
    r.w.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = g.x[i];
        const double x = lo + h * (1.0 + y);
        r.x[i] = x;
        // (x-lo) = h(1+y), (hi-x) = h(1-y); divide the weight factor back out.
        r.w[i] = h * g.w[i] / (std::pow(1.0 + y, e_lo) * std::pow(1.0 - y, e_hi));
    }
    return r;
}

namespace {

double gl_panel(const std::function<double(double)>& f, double lo, double hi, const Rule& g) {
    const double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.w[i] * f(m + h * g.x[i]);
    return h * s;
}

double adapt(const std::function<double(double)>& f, double lo, double hi, double whole, double tol, int depth,
             const Rule& g) {
    const double mid = 0.5 * (lo + hi);
    const double left = gl_panel(f, lo, mid, g), right = gl_panel(f, mid, hi, g);
    if (depth <= 0) throw ConvergenceError("adaptive quadrature exceeded its depth budget");
    if (std::abs(left + right - whole) <= tol) return left + right;
    return adapt(f, lo, mid, left, 0.5 * tol, depth - 1, g) + adapt(f, mid, hi, right, 0.5 * tol, depth - 1, g);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double tol, int max_depth) {
    if (hi == lo) return 0.0;
    const Rule& g = gauss_legendre(10);
    return adapt(f, lo, hi, gl_panel(f, lo, hi, g), tol, max_depth, g);
}

}  // namespace jlusin
