#pragma once

#include <span>
#include <vector>

#include "jlusin/jacobi.hpp"
#include "jlusin/poisson.hpp"
#include "jlusin/quadrature.hpp"

namespace jlusin {

struct ConeGrid {
    enum class TailMode { Truncate, AnalyticBound };

    double t_min = 1e-3;      // absolute lower cut for the t-integral
    double t_min_rel = 0.05;  // for kernel norms: cut at min(t_min, t_min_rel * |theta - phi|)
    double T_max = 3.141592653589793;
    int panels_per_decade = 4;
    int t_nodes = 6;  // Gauss-Legendre nodes per log-t panel
    int eta_per_level = 20;
    double aperture = 1.0;
    TailMode tail_mode = TailMode::AnalyticBound;

    void validate() const;
    ConeGrid refined() const;
    // Log-spaced composite rule on [lo, hi], split at the given breakpoints.
    Rule t_levels(double lo, double hi, std::span<const double> breaks = {}) const;
};

// Quadrature plan for the eta-integral at one vertex and one t: J(t) ~ sum_j w_j F(psi_j, t)^2,
// the weights carrying the density and 1/V_t(theta).
struct EtaPlan {
    std::vector<double> psi;
    std::vector<double> w;
};
EtaPlan eta_plan(double theta, double t, const JacobiParams& p, const ConeGrid& cg, double volume);

struct ConeNorm {
    double value = 0.0;       // square root of the total below
    double main = 0.0;        // integral over [t_lo, T]
    double small_tail = 0.0;  // extrapolated (0, t_lo)
    double large_tail = 0.0;  // exact (T, infinity) contribution when tail_mode = AnalyticBound
    double t_lo = 0.0;
    double T = 0.0;
};

// Squared-norm pieces of the cone integral at vertex theta for the series ev, weight t^k.
ConeNorm cone_norm(double theta, const SeriesEvaluator& ev, int k, const ConeGrid& cg, double t_lo,
                   std::span<const double> t_breaks = {});
// Norm of the vertex difference: the same series seen from theta_a and theta_b.
ConeNorm cone_norm_difference(double theta_a, double theta_b, const SeriesEvaluator& ev, int k, const ConeGrid& cg,
                              double t_lo, double T, std::span<const double> t_breaks = {});

// int_T^infinity t^k exp(-c t) dt
double exp_moment_tail(int k, double c, double T);

// Gram matrix <delta^r P_n, delta^r P_m> for n, m < size.
std::vector<double> derivative_gram(const JacobiParams& p, int r, int size);

double s_kernel(const DerivativeSpec& d, double eta, double t, double theta, double phi, const JacobiParams& p,
                const SpectralTruncation& tr);
ConeNorm b_norm_detail(const DerivativeSpec& d, double theta, double phi, const JacobiParams& p, const ConeGrid& cg,
                       const SpectralTruncation& tr);
double b_norm(const DerivativeSpec& d, double theta, double phi, const JacobiParams& p, const ConeGrid& cg,
              const SpectralTruncation& tr);
double b_norm(const DerivativeSpec& d, double theta, double phi, const JacobiParams& p, const ConeGrid& cg = {});

// Coefficients of d^M/dt^M D^N (or delta^N) H_t f in the delta^r P_n basis (before exp(-t s_n)).
std::vector<double> area_coefficients(std::span<const double> f, const DerivativeSpec& d, const JacobiParams& p);
double area_integral(std::span<const double> f, const DerivativeSpec& d, double theta, const JacobiParams& p,
                     const ConeGrid& cg = {});
double g_function(std::span<const double> f, const DerivativeSpec& d, double theta, const JacobiParams& p);

// ||S f||^2_{L^2(dmu)} = f^T G f for every f with at most `modes` coefficients; theta by a density rule.
class AreaQuadraticForm {
public:
    AreaQuadraticForm(const DerivativeSpec& d, const JacobiParams& p, int modes, const ConeGrid& cg, int theta_nodes);
    double norm_sq(std::span<const double> f) const;
    int modes() const { return modes_; }
    const std::vector<double>& matrix() const { return G_; }

private:
    int modes_;
    std::vector<double> G_;
};

double area_l2_norm(std::span<const double> f, const DerivativeSpec& d, const JacobiParams& p, const ConeGrid& cg = {},
                    int theta_nodes = 48);
double g_function_l2_norm(std::span<const double> f, const DerivativeSpec& d, const JacobiParams& p);

}  // namespace jlusin
