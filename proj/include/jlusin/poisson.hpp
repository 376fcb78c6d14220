#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "jlusin/jacobi.hpp"

namespace jlusin {

enum class Flavor { Delta, D };

const char* flavor_name(Flavor f);
Flavor parse_flavor(const std::string& s);

struct DerivativeSpec {
    int M = 0;
    int N = 0;
    Flavor flavor = Flavor::Delta;
    int L = 0;
    int P = 0;

    void validate() const;
    void require_area() const;  // M + N > 0
    // Order of the delta-derivative that lands on the theta side of each summand.
    int theta_order() const;
    // Power of (lambda_n - lambda_0) contributed by the interlaced flavor.
    int d_power() const { return flavor == Flavor::D ? N / 2 : 0; }
};

struct SpectralTruncation {
    enum class Mode { Fixed, Adaptive };
    Mode mode = Mode::Adaptive;
    int n_max = 200000;
    double tail_eps = 1e-12;
    double t_floor = 1e-4;

    static SpectralTruncation for_spec(const DerivativeSpec& d);
    void validate() const;
};

struct KernelValue {
    double value = 0.0;
    int termsUsed = 0;
    double tailBound = 0.0;
};

// Per-mode multiplier of d^M/dt^M and the D-flavor: (-s_n)^M (lambda_n - lambda_0)^k.
double mode_multiplier(int n, const DerivativeSpec& d, const JacobiParams& p);
// The same multiplier assembled from the binomial expansion.
double mode_multiplier_binomial(int n, const DerivativeSpec& d, const JacobiParams& p);
// c_j for j = 0..floor(N/2): (-1)^(k-j) binom(k, j).
std::vector<double> binomial_expansion_coefficients(int N);

struct SeriesStats {
    int terms = 0;
    double tail = 0.0;
};

// Evaluates F(psi, t) = sum_n exp(-t s_n) g_n delta^r P_n(psi) for batches of psi.
// g is either a finite coefficient list or the phi-side factor of a derivative kernel
// (a signed combination over several phi for kernel differences).
class SeriesEvaluator {
public:
    static SeriesEvaluator finite(const JacobiParams& p, int order, std::vector<double> g);
    static SeriesEvaluator kernel(const JacobiParams& p, const DerivativeSpec& d, std::span<const double> phis,
                                  std::span<const double> phi_weights, double t_lo, const SpectralTruncation& tr);

    void eval(double t, std::span<const double> psi, double* out, SeriesStats* stats = nullptr) const;
    double eval(double t, double psi, SeriesStats* stats = nullptr) const;

    const JacobiParams& params() const { return p_; }
    int order() const { return order_; }
    bool is_finite() const { return finite_; }
    // g_n without the normalizing constant of the psi side.
    const std::vector<double>& coefficients() const { return g_; }
    // Smallest decay rate s_n among modes with nonzero coefficient.
    double smallest_rate() const;
    double t_lo() const { return t_lo_; }

private:
    SeriesEvaluator(const JacobiParams& p, int order);
    void eval_chunk(double t, const double* psi, int nb, double* out, SeriesStats* stats) const;

    JacobiParams p_;
    int order_;
    bool finite_ = true;
    double envelope_power_ = 0.0;
    double t_lo_ = 0.0;
    SpectralTruncation tr_;
    DerivativeStencil stencil_;
    std::shared_ptr<const JacobiTable> tab_;
    std::vector<double> g_;
};

// Smallest n >= 8 at which the envelope tail sum_{m>=n} exp(-t s_m)(1+s_m)^power falls below eps.
int envelope_cutoff(double t, double power, double rho, double eps);
double envelope_tail(int n, double t, double power, double rho);

KernelValue poisson_kernel(double t, double theta, double phi, const JacobiParams& p,
                           const SpectralTruncation& tr = {});
KernelValue kernel_derivative(const DerivativeSpec& d, double t, double theta, double phi, const JacobiParams& p,
                              const SpectralTruncation& tr);
KernelValue kernel_derivative(const DerivativeSpec& d, double t, double theta, double phi, const JacobiParams& p);
KernelValue iden1_expansion(const DerivativeSpec& d, double t, double theta, double phi, const JacobiParams& p,
                            const SpectralTruncation& tr);

double semigroup_apply(std::span<const double> coeffs, double t, double theta, const JacobiParams& p);
std::vector<double> semigroup_coeffs(std::span<const double> coeffs, double t, const JacobiParams& p);

}  // namespace jlusin
