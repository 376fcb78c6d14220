#pragma once

#include <functional>
#include <vector>

namespace jlusin {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// n-point Gauss rule for (1-x)^a (1+x)^b on [-1,1]; Golub-Welsch followed by Newton polishing.
// Rules are cached; the returned reference stays valid for the life of the program.
const Rule& gauss_jacobi(int n, double a, double b);
inline const Rule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

// Legendre rule mapped to [lo, hi].
Rule gauss_legendre_on(int n, double lo, double hi);

// Rule on [lo, hi] for integrands carrying (x-lo)^e_lo (hi-x)^e_hi endpoint behaviour.
// Weights are divided by that factor, so sum w_i h(x_i) approximates the plain integral of h.
Rule singular_panel(int n, double lo, double hi, double e_lo, double e_hi);

// Adaptive bisection with a 10-point Gauss-Legendre pair.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double tol,
                          int max_depth = 40);

}  // namespace jlusin
