#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace jlusin {

enum class Regime { I, II, III, IV };

const char* regime_name(Regime r);

struct JacobiParams {
    double alpha = -0.5;
    double beta = -0.5;

    JacobiParams() = default;
    JacobiParams(double a, double b);

    // (alpha + beta + 1) / 2, so that sqrt(lambda_n) = |n + rho|.
    double rho() const { return 0.5 * (alpha + beta + 1.0); }
    Regime regime() const;
    JacobiParams swapped() const { return {beta, alpha}; }
};

// Classical P_n^{(a,b)}(x). Shifted families (a+j, b+j) are allowed, so only a,b > -1 is required.
double eval_jacobi(int n, double a, double b, double x);
double eval_jacobi(int n, const JacobiParams& p, double x);

// d^j/dx^j P_n^{(a,b)}(x) for j = 0..order, written to out[0..order].
void eval_jacobi_derivatives(int n, double a, double b, double x, int order, double* out);

// c_n > 0 with the normalized polynomial c_n P_n(cos theta) of unit norm in L^2(dmu).
double normalizing_constant(int n, const JacobiParams& p);
double eigenvalue(int n, const JacobiParams& p);
double sqrt_eigenvalue(int n, const JacobiParams& p);
double normalized_poly(int n, const JacobiParams& p, double theta);

// coeff * sin^sinPow(theta) * cos^cosPow(theta) * P_n^{(a,b)}(cos theta)
struct TrigTerm {
    double coeff = 1.0;
    int sinPow = 0;
    int cosPow = 0;
    int n = 0;
    double a = 0.0;
    double b = 0.0;
};

std::vector<TrigTerm> delta_term(const TrigTerm& t);
// Applies d/dtheta to a sum of terms and merges like terms.
std::vector<TrigTerm> delta_terms(const std::vector<TrigTerm>& terms);
double eval_terms(const std::vector<TrigTerm>& terms, double theta);
// Term expansion of delta^order applied to the normalized polynomial of degree n.
std::vector<TrigTerm> normalized_derivative_terms(int n, const JacobiParams& p, int order);

struct GridFunction {
    std::vector<double> nodes;
    std::vector<double> values;
};

inline constexpr double kEndpointMargin = 1e-6;

// delta^* by finite differences on a nonuniform interior grid.
GridFunction delta_star(const GridFunction& f, const JacobiParams& p);
// delta^* of sum_n coeffs[n] * normalized_poly(n, .) at theta, derivative by the term algebra.
double delta_star_expansion(std::span<const double> coeffs, const JacobiParams& p, double theta);

// Index-free form of delta^r acting on c_n P_n^{(a,b)}(cos psi):
//   delta^r [P_n(cos psi)] = sum_j tau_j(psi) * (d/dx)^j P_n(cos psi),
// where each tau_j is an integer combination of sin^p cos^q.
class DerivativeStencil {
public:
    struct Mono {
        int m;
        int p;
        int q;
    };

    explicit DerivativeStencil(int order);

    int order() const { return order_; }
    const std::vector<Mono>& monomials(int j) const { return tau_[static_cast<std::size_t>(j)]; }
    // tau[0..order] at psi.
    void eval(double psi, double* tau) const;

private:
    int order_;
    std::vector<std::vector<Mono>> tau_;
};

// Recurrence coefficients, normalizing constants and sqrt-eigenvalues up to some degree.
// Tables are immutable once built; acquire() serves them from a shared cache.
class JacobiTable {
public:
    JacobiTable(const JacobiParams& p, int nmax);

    static std::shared_ptr<const JacobiTable> acquire(const JacobiParams& p, int nmax);

    const JacobiParams& params() const { return p_; }
    int nmax() const { return static_cast<int>(c_.size()) - 1; }
    // P_n = (A_n x + B_n) P_{n-1} - C_n P_{n-2}, n >= 1.
    double A(int n) const { return A_[static_cast<std::size_t>(n)]; }
    double B(int n) const { return B_[static_cast<std::size_t>(n)]; }
    double C(int n) const { return C_[static_cast<std::size_t>(n)]; }
    double c(int n) const { return c_[static_cast<std::size_t>(n)]; }
    double s(int n) const { return s_[static_cast<std::size_t>(n)]; }
    const double* Adata() const { return A_.data(); }
    const double* Bdata() const { return B_.data(); }
    const double* Cdata() const { return C_.data(); }
    const double* cdata() const { return c_.data(); }
    const double* sdata() const { return s_.data(); }

private:
    JacobiParams p_;
    std::vector<double> A_, B_, C_, c_, s_;
};

// delta^order of the normalized polynomials at psi for n = 0..nmax (out has nmax+1 slots).
void basis_values(const JacobiTable& tab, const DerivativeStencil& st, double psi, int nmax, double* out);

}  // namespace jlusin
