#include "jlusin/poisson.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "jlusin/error.hpp"

namespace jlusin {

namespace {

constexpr int kChunk = 64;
constexpr int kMaxR = 12;

double binom(int k, int j) {
    double r = 1.0;
    for (int i = 1; i <= j; ++i) r = r * (k - j + i) / i;
    return r;
}

}  // namespace

const char* flavor_name(Flavor f) { return f == Flavor::Delta ? "delta" : "D"; }

Flavor parse_flavor(const std::string& s) {
    if (s == "delta") return Flavor::Delta;
    if (s == "D") return Flavor::D;
    throw ConfigError("flavor must be 'delta' or 'D'");
}

void DerivativeSpec::validate() const {
    if (M < 0 || N < 0) throw ConfigError("M and N must be nonnegative");
    if (L < 0 || L > 1 || P < 0 || P > 1) throw ConfigError("L and P must be 0 or 1");
    if (N + P > 10 || M > 10) throw ConfigError("derivative orders above 10 are not supported");
}

void DerivativeSpec::require_area() const {
    validate();
    if (M + N <= 0) throw ConfigError("area integrals require M + N > 0");
}

int DerivativeSpec::theta_order() const { return (flavor == Flavor::D ? N % 2 : N) + P; }

SpectralTruncation SpectralTruncation::for_spec(const DerivativeSpec& d) {
    SpectralTruncation tr;
    if (d.M + d.N >= 4) tr.tail_eps = 1e-10;
    return tr;
}

void SpectralTruncation::validate() const {
    if (n_max < 8) throw ConfigError("n_max must be at least 8");
    if (!(tail_eps > 0.0)) throw ConfigError("tail_eps must be positive");
    if (!(t_floor > 0.0)) throw ConfigError("t_floor must be positive");
}

double mode_multiplier(int n, const DerivativeSpec& d, const JacobiParams& p) {
    const double s = sqrt_eigenvalue(n, p);
    double m = std::pow(-s, d.M);
    const int k = d.d_power();
    if (k > 0) m *= std::pow(n * (n + p.alpha + p.beta + 1.0), k);
    return m;
}

std::vector<double> binomial_expansion_coefficients(int N) {
    const int k = N / 2;
    std::vector<double> c(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) c[static_cast<std::size_t>(j)] = ((k - j) % 2 ? -1.0 : 1.0) * binom(k, j);
    return c;
}

double mode_multiplier_binomial(int n, const DerivativeSpec& d, const JacobiParams& p) {
    const double s = sqrt_eigenvalue(n, p);
    const double lam0 = eigenvalue(0, p);
    const int k = d.flavor == Flavor::D ? d.N / 2 : 0;
    const auto c = binomial_expansion_coefficients(d.flavor == Flavor::D ? d.N : 0);
    double m = 0.0;
    for (int j = 0; j <= k; ++j)
        m += c[static_cast<std::size_t>(j)] * std::pow(lam0, k - j) * std::pow(-s, d.M + 2 * j);
    return m;
}

double envelope_tail(int n, double t, double power, double rho) {
    const double s = n + rho;
    const double e = std::exp(-t * s + power * std::log1p(s));
    const double ratio = std::exp(-t + power * std::log1p(1.0 / (1.0 + s)));
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    return e / (1.0 - ratio);
}

int envelope_cutoff(double t, double power, double rho, double eps) {
    auto ok = [&](long n) { return envelope_tail(static_cast<int>(n), t, power, rho) < eps; };
    long lo = std::max<long>(8, static_cast<long>(std::ceil(power / t)));
    if (ok(lo)) return static_cast<int>(lo);
    long hi = lo;
    while (!ok(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > (1L << 30)) throw ConvergenceError("envelope cutoff overflow");
    }
    while (hi - lo > 1) {
        const long mid = (lo + hi) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return static_cast<int>(hi);
}

SeriesEvaluator::SeriesEvaluator(const JacobiParams& p, int order) : p_(p), order_(order), stencil_(order) {}

SeriesEvaluator SeriesEvaluator::finite(const JacobiParams& p, int order, std::vector<double> g) {
    SeriesEvaluator ev(p, order);
    ev.finite_ = true;
    if (g.empty()) g.push_back(0.0);
    ev.g_ = std::move(g);
    ev.tab_ = JacobiTable::acquire(p, static_cast<int>(ev.g_.size()));
    return ev;
}

SeriesEvaluator SeriesEvaluator::kernel(const JacobiParams& p, const DerivativeSpec& d, std::span<const double> phis,
                                        std::span<const double> phi_weights, double t_lo,
                                        const SpectralTruncation& tr) {
    d.validate();
    tr.validate();
    if (phis.size() != phi_weights.size() || phis.empty()) throw DomainError("kernel: phi lists mismatch");
    if (!(t_lo >= tr.t_floor)) throw DomainError("t below the small-t floor (" + std::to_string(tr.t_floor) + ")");
    SeriesEvaluator ev(p, d.theta_order());
    ev.finite_ = false;
    ev.tr_ = tr;
    ev.t_lo_ = t_lo;
    const double q = std::max({p.alpha, p.beta, -0.5});
    ev.envelope_power_ = d.M + ev.order_ + d.L + 2.0 * q + 1.0 + 2.0 * d.d_power();
    int ncap;
    if (tr.mode == SpectralTruncation::Mode::Fixed) {
        ncap = tr.n_max;
    } else {
        ncap = envelope_cutoff(t_lo, ev.envelope_power_, p.rho(), tr.tail_eps) + 64;
        if (ncap > 10L * tr.n_max)
            throw ConvergenceError("series cutoff exceeds 10*n_max; t too small for the configured budget");
    }
    ev.tab_ = JacobiTable::acquire(p, ncap);
    const DerivativeStencil phi_st(d.L);
    std::vector<double> buf(static_cast<std::size_t>(ncap) + 1);
    ev.g_.assign(static_cast<std::size_t>(ncap) + 1, 0.0);
    for (std::size_t k = 0; k < phis.size(); ++k) {
        basis_values(*ev.tab_, phi_st, phis[k], ncap, buf.data());
        for (std::size_t n = 0; n < buf.size(); ++n) ev.g_[n] += phi_weights[k] * buf[n];
    }
    for (std::size_t n = 0; n < ev.g_.size(); ++n) ev.g_[n] *= mode_multiplier(static_cast<int>(n), d, p);
    return ev;
}

double SeriesEvaluator::smallest_rate() const {
    for (std::size_t n = 0; n < g_.size(); ++n) {
        if (g_[n] == 0.0) continue;
        // delta^r with r >= 1 annihilates the constant mode.
        if (n == 0 && order_ > 0) continue;
        return tab_->s(static_cast<int>(n));
    }
    return std::numeric_limits<double>::infinity();
}

void SeriesEvaluator::eval(double t, std::span<const double> psi, double* out, SeriesStats* stats) const {
    if (!(t > 0.0)) throw DomainError("t must be positive");
    if (!finite_ && t < t_lo_) throw DomainError("t below the evaluator's lower limit");
    if (stats) *stats = {};
    for (std::size_t i = 0; i < psi.size(); i += kChunk) {
        const int nb = static_cast<int>(std::min<std::size_t>(kChunk, psi.size() - i));
        SeriesStats st;
        eval_chunk(t, psi.data() + i, nb, out + i, &st);
        if (stats) {
            stats->terms = std::max(stats->terms, st.terms);
            stats->tail = std::max(stats->tail, st.tail);
        }
    }
}

double SeriesEvaluator::eval(double t, double psi, SeriesStats* stats) const {
    double out;
    eval(t, std::span<const double>(&psi, 1), &out, stats);
    return out;
}

void SeriesEvaluator::eval_chunk(double t, const double* psi, int nb, double* out, SeriesStats* stats) const {
    const int r = order_;
    alignas(64) double x[kChunk], sum[kChunk], v[kChunk];
    alignas(64) double tau[kMaxR + 1][kChunk];
    alignas(64) double qa[kMaxR + 1][kChunk], qb[kMaxR + 1][kChunk], qc[kMaxR + 1][kChunk];
    alignas(64) double peak[kChunk];
    {
        double tb[kMaxR + 1];
        for (int b = 0; b < nb; ++b) {
            x[b] = std::cos(psi[b]);
            stencil_.eval(psi[b], tb);
            for (int j = 0; j <= r; ++j) tau[j][b] = tb[j];
        }
    }
    double (*q0)[kChunk] = qa;
    double (*q1)[kChunk] = qb;
    double (*q2)[kChunk] = qc;
    for (int j = 0; j <= r; ++j)
        for (int b = 0; b < nb; ++b) q0[j][b] = q1[j][b] = 0.0;

    const int last = static_cast<int>(g_.size()) - 1;
    const bool adaptive = !finite_ && tr_.mode == SpectralTruncation::Mode::Adaptive;
    const double eps = tr_.tail_eps;
    const double* A = tab_->Adata();
    const double* Bc = tab_->Bdata();
    const double* C = tab_->Cdata();
    const double* cn = tab_->cdata();
    const double rho = p_.rho();
    const double decay = std::exp(-t);

    // n = 0
    const double w0 = std::exp(-t * std::abs(rho));
    {
        const double gw = g_[0] * cn[0] * w0;
        for (int b = 0; b < nb; ++b) {
            q1[0][b] = 1.0;
            const double term = gw * tau[0][b];
            sum[b] = term;
            peak[b] = std::abs(term);
        }
    }
    double w = std::exp(-t * (1.0 + rho));
    int n = 1;
    int used = 1;
    double tail = 0.0;
    for (; n <= last; ++n) {
        if ((n & 255) == 0) w = std::exp(-t * (n + rho));
        const double An = A[n], Bn = Bc[n], Cn = C[n];
        if (r == 0) {
            const double gw = g_[static_cast<std::size_t>(n)] * cn[n] * w;
            double* __restrict p0 = q0[0];
            double* __restrict p1 = q1[0];
            double* __restrict p2 = q2[0];
            for (int b = 0; b < nb; ++b) {
                p2[b] = (An * x[b] + Bn) * p1[b] - Cn * p0[b];
                const double term = gw * tau[0][b] * p2[b];
                sum[b] += term;
                peak[b] = std::max(peak[b], std::abs(term));
            }
        } else {
            for (int b = 0; b < nb; ++b) {
                const double lin = An * x[b] + Bn;
                q2[0][b] = lin * q1[0][b] - Cn * q0[0][b];
                v[b] = tau[0][b] * q2[0][b];
            }
            for (int j = 1; j <= r; ++j) {
                const double jA = j * An;
                for (int b = 0; b < nb; ++b) {
                    const double lin = An * x[b] + Bn;
                    q2[j][b] = lin * q1[j][b] + jA * q1[j - 1][b] - Cn * q0[j][b];
                    v[b] += tau[j][b] * q2[j][b];
                }
            }
            const double gw = g_[static_cast<std::size_t>(n)] * cn[n] * w;
            for (int b = 0; b < nb; ++b) {
                const double term = gw * v[b];
                sum[b] += term;
                peak[b] = std::max(peak[b], std::abs(term));
            }
        }
        w *= decay;
        double (*tmp)[kChunk] = q0;
        q0 = q1;
        q1 = q2;
        q2 = tmp;
        used = n + 1;
        // every point's last eight terms are small before the envelope is consulted
        if (adaptive && (n & 7) == 0) {
            bool settled = n >= 8;
            double floor_sum = std::numeric_limits<double>::infinity(), block = 0.0;
            for (int b = 0; b < nb; ++b) {
                const double scale = std::max(1.0, std::abs(sum[b]));
                settled = settled && peak[b] < eps * scale;
                floor_sum = std::min(floor_sum, scale);
                block = std::max(block, peak[b] / scale);
                peak[b] = 0.0;
            }
            if (settled) {
                // the envelope's constant is unknown: rescale it by the terms actually seen in this block
                const double s = n + rho;
                const double env_n = std::exp(-t * s + envelope_power_ * std::log1p(s));
                const double env_tail = envelope_tail(n + 1, t, envelope_power_, rho);
                tail = std::max(env_tail / floor_sum, block / env_n * env_tail);
                if (tail < eps) break;
            }
        }
        if (adaptive && n == last) throw ConvergenceError("spectral series did not settle within the precomputed range");
    }
    if (!finite_ && !adaptive) tail = envelope_tail(last + 1, t, envelope_power_, rho);
    for (int b = 0; b < nb; ++b) out[b] = sum[b];
    stats->terms = used;
    stats->tail = tail;
}

KernelValue kernel_derivative(const DerivativeSpec& d, double t, double theta, double phi, const JacobiParams& p,
                              const SpectralTruncation& tr) {
    const double one = 1.0;
    const auto ev = SeriesEvaluator::kernel(p, d, std::span<const double>(&phi, 1), std::span<const double>(&one, 1),
                                            t, tr);
    SeriesStats st;
    const double v = ev.eval(t, theta, &st);
    return {v, st.terms, st.tail};
}

KernelValue kernel_derivative(const DerivativeSpec& d, double t, double theta, double phi, const JacobiParams& p) {
    return kernel_derivative(d, t, theta, phi, p, SpectralTruncation::for_spec(d));
}

KernelValue poisson_kernel(double t, double theta, double phi, const JacobiParams& p, const SpectralTruncation& tr) {
    return kernel_derivative(DerivativeSpec{}, t, theta, phi, p, tr);
}

KernelValue iden1_expansion(const DerivativeSpec& d, double t, double theta, double phi, const JacobiParams& p,
                            const SpectralTruncation& tr) {
    if (d.flavor != Flavor::D) throw ConfigError("iden1_expansion requires the interlaced (D) flavor");
    const int k = d.N / 2;
    const auto c = binomial_expansion_coefficients(d.N);
    const double lam0 = eigenvalue(0, p);
    KernelValue out;
    for (int j = 0; j <= k; ++j) {
        DerivativeSpec dj{d.M + 2 * j, d.N % 2, Flavor::Delta, d.L, d.P};
        const auto kv = kernel_derivative(dj, t, theta, phi, p, tr);
        const double coef = c[static_cast<std::size_t>(j)] * std::pow(lam0, k - j);
        out.value += coef * kv.value;
        out.termsUsed = std::max(out.termsUsed, kv.termsUsed);
        out.tailBound += std::abs(coef) * kv.tailBound;
    }
    return out;
}

double semigroup_apply(std::span<const double> coeffs, double t, double theta, const JacobiParams& p) {
    if (!(t >= 0.0)) throw DomainError("semigroup time must be nonnegative");
    double s = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        if (coeffs[n] == 0.0) continue;
        const int k = static_cast<int>(n);
        s += std::exp(-t * sqrt_eigenvalue(k, p)) * coeffs[n] * normalized_poly(k, p, theta);
    }
    return s;
}

std::vector<double> semigroup_coeffs(std::span<const double> coeffs, double t, const JacobiParams& p) {
    std::vector<double> out(coeffs.begin(), coeffs.end());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] *= std::exp(-t * sqrt_eigenvalue(static_cast<int>(n), p));
    return out;
}

}  // namespace jlusin
