#include "jlusin/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "jlusin/error.hpp"

namespace jlusin {

namespace {

constexpr int kMaxOrder = 12;

void check_ab(double a, double b) {
    if (!(a > -1.0) || !(b > -1.0))
        throw DomainError("Jacobi parameters must satisfy alpha > -1 and beta > -1");
}

// Recurrence coefficients of P_n^{(a,b)}; n >= 1.
void recurrence(int n, double a, double b, double& A, double& B, double& C) {
    if (n == 1) {
        A = 0.5 * (a + b + 2.0);
        B = 0.5 * (a - b);
        C = 0.0;
        return;
    }
    const double nn = n;
    const double s = 2.0 * nn + a + b;
    const double den = 2.0 * nn * (nn + a + b) * (s - 2.0);
    A = (s - 1.0) * s * (s - 2.0) / den;
    B = (s - 1.0) * (a * a - b * b) / den;
    C = 2.0 * (nn + a - 1.0) * (nn + b - 1.0) * s / den;
}

double log_sq_norm(int n, double a, double b) {
    if (n == 0) return std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0);
    const double nn = n;
    return std::lgamma(nn + a + 1.0) + std::lgamma(nn + b + 1.0) - std::log(2.0 * nn + a + b + 1.0) -
           std::lgamma(nn + a + b + 1.0) - std::lgamma(nn + 1.0);
}

}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::I: return "i";
        case Regime::II: return "ii";
        case Regime::III: return "iii";
        case Regime::IV: return "iv";
    }
    return "?";
}

JacobiParams::JacobiParams(double a, double b) : alpha(a), beta(b) { check_ab(a, b); }

Regime JacobiParams::regime() const {
    const bool a_low = alpha < -0.5;
    const bool b_low = beta < -0.5;
    if (!a_low && !b_low) return Regime::I;
    if (a_low && !b_low) return Regime::II;
    if (!a_low && b_low) return Regime::III;
    return Regime::IV;
}

double eval_jacobi(int n, double a, double b, double x) {
    check_ab(a, b);
    if (n < 0) throw DomainError("Jacobi degree must be nonnegative");
    if (!(std::abs(x) <= 1.0)) throw DomainError("Jacobi argument must lie in [-1,1]");
    double p0 = 1.0;
    if (n == 0) return p0;
    double A, B, C;
    recurrence(1, a, b, A, B, C);
    double p1 = A * x + B;
    for (int k = 2; k <= n; ++k) {
        recurrence(k, a, b, A, B, C);
        const double p2 = (A * x + B) * p1 - C * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double eval_jacobi(int n, const JacobiParams& p, double x) { return eval_jacobi(n, p.alpha, p.beta, x); }

void eval_jacobi_derivatives(int n, double a, double b, double x, int order, double* out) {
    check_ab(a, b);
    if (n < 0 || order < 0 || order > kMaxOrder) throw DomainError("bad degree or derivative order");
    std::array<double, kMaxOrder + 1> q0{}, q1{}, q2{};
    q0[0] = 1.0;
    if (n == 0) {
        std::copy_n(q0.begin(), order + 1, out);
        return;
    }
    double A, B, C;
    recurrence(1, a, b, A, B, C);
    q1[0] = A * x + B;
    if (order >= 1) q1[1] = A;
    for (int k = 2; k <= n; ++k) {
        recurrence(k, a, b, A, B, C);
        const double lin = A * x + B;
        q2[0] = lin * q1[0] - C * q0[0];
        for (int j = 1; j <= order; ++j) q2[j] = lin * q1[j] + j * A * q1[j - 1] - C * q0[j];
        q0 = q1;
        q1 = q2;
    }
    std::copy_n(q1.begin(), order + 1, out);
}

double normalizing_constant(int n, const JacobiParams& p) {
    if (n < 0) throw DomainError("degree must be nonnegative");
    return std::exp(-0.5 * log_sq_norm(n, p.alpha, p.beta));
}

double eigenvalue(int n, const JacobiParams& p) {
    const double v = n + p.rho();
    return v * v;
}

double sqrt_eigenvalue(int n, const JacobiParams& p) { return std::abs(n + p.rho()); }

double normalized_poly(int n, const JacobiParams& p, double theta) {
    return normalizing_constant(n, p) * eval_jacobi(n, p, std::cos(theta));
}

std::vector<TrigTerm> delta_term(const TrigTerm& t) {
    std::vector<TrigTerm> out;
    if (t.coeff == 0.0) return out;
    if (t.sinPow > 0) out.push_back({t.coeff * t.sinPow, t.sinPow - 1, t.cosPow + 1, t.n, t.a, t.b});
    if (t.cosPow > 0) out.push_back({-t.coeff * t.cosPow, t.sinPow + 1, t.cosPow - 1, t.n, t.a, t.b});
    if (t.n > 0) {
        const double f = 0.5 * (t.n + t.a + t.b + 1.0);
        out.push_back({-t.coeff * f, t.sinPow + 1, t.cosPow, t.n - 1, t.a + 1.0, t.b + 1.0});
    }
    return out;
}

std::vector<TrigTerm> delta_terms(const std::vector<TrigTerm>& terms) {
    std::vector<TrigTerm> out;
    for (const auto& t : terms) {
        for (const auto& d : delta_term(t)) {
            auto it = std::find_if(out.begin(), out.end(), [&](const TrigTerm& o) {
                return o.sinPow == d.sinPow && o.cosPow == d.cosPow && o.n == d.n && o.a == d.a && o.b == d.b;
            });
            if (it == out.end())
                out.push_back(d);
            else
                it->coeff += d.coeff;
        }
    }
    std::erase_if(out, [](const TrigTerm& t) { return t.coeff == 0.0; });
    return out;
}

double eval_terms(const std::vector<TrigTerm>& terms, double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    double x = std::clamp(c, -1.0, 1.0);
    double sum = 0.0;
    for (const auto& t : terms)
        sum += t.coeff * std::pow(s, t.sinPow) * std::pow(c, t.cosPow) * eval_jacobi(t.n, t.a, t.b, x);
    return sum;
}

std::vector<TrigTerm> normalized_derivative_terms(int n, const JacobiParams& p, int order) {
    std::vector<TrigTerm> terms{{normalizing_constant(n, p), 0, 0, n, p.alpha, p.beta}};
    for (int i = 0; i < order; ++i) terms = delta_terms(terms);
    return terms;
}

namespace {

// Fornberg weights for the first derivative at x0 from nodes xs.
std::vector<double> fd_weights(double x0, std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
    double c1 = 1.0, c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min<std::size_t>(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

double star_potential(const JacobiParams& p, double theta) {
    return -(p.alpha + 0.5) / std::tan(0.5 * theta) + (p.beta + 0.5) * std::tan(0.5 * theta);
}

}  // namespace

GridFunction delta_star(const GridFunction& f, const JacobiParams& p) {
    const std::size_t n = f.nodes.size();
    if (n != f.values.size()) throw DomainError("grid function nodes and values differ in length");
    if (n < 2) throw DomainError("grid function needs at least two nodes");
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f.nodes[i];
        if (x < kEndpointMargin || x > std::numbers::pi - kEndpointMargin)
            throw DomainError("delta_star: sample within endpoint margin of 0 or pi");
        if (i > 0 && !(x > f.nodes[i - 1])) throw DomainError("grid nodes must be strictly increasing");
    }
    GridFunction out{f.nodes, std::vector<double>(n)};
    const std::size_t width = std::min<std::size_t>(5, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i >= width / 2 ? i - width / 2 : 0;
        lo = std::min(lo, n - width);
        std::span<const double> xs(f.nodes.data() + lo, width);
        const auto w = fd_weights(f.nodes[i], xs);
        double d = 0.0;
        for (std::size_t k = 0; k < width; ++k) d += w[k] * f.values[lo + k];
        out.values[i] = -d + star_potential(p, f.nodes[i]) * f.values[i];
    }
    return out;
}

double delta_star_expansion(std::span<const double> coeffs, const JacobiParams& p, double theta) {
    if (theta < kEndpointMargin || theta > std::numbers::pi - kEndpointMargin)
        throw DomainError("delta_star: point within endpoint margin of 0 or pi");
    double f = 0.0, df = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        if (coeffs[n] == 0.0) continue;
        const int deg = static_cast<int>(n);
        f += coeffs[n] * normalized_poly(deg, p, theta);
        df += coeffs[n] * eval_terms(normalized_derivative_terms(deg, p, 1), theta);
    }
    return -df + star_potential(p, theta) * f;
}

DerivativeStencil::DerivativeStencil(int order) : order_(order) {
    if (order < 0 || order > kMaxOrder) throw DomainError("derivative order out of range");
    struct T {
        int m, p, q, j;
    };
    std::vector<T> cur{{1, 0, 0, 0}};
    for (int r = 0; r < order; ++r) {
        std::vector<T> next;
        auto add = [&](T t) {
            for (auto& o : next)
                if (o.p == t.p && o.q == t.q && o.j == t.j) {
                    o.m += t.m;
                    return;
                }
            next.push_back(t);
        };
        for (const auto& t : cur) {
            if (t.p > 0) add({t.m * t.p, t.p - 1, t.q + 1, t.j});
            if (t.q > 0) add({-t.m * t.q, t.p + 1, t.q - 1, t.j});
            add({-t.m, t.p + 1, t.q, t.j + 1});
        }
        std::erase_if(next, [](const T& t) { return t.m == 0; });
        cur = std::move(next);
    }
    tau_.assign(static_cast<std::size_t>(order) + 1, {});
    for (const auto& t : cur) tau_[static_cast<std::size_t>(t.j)].push_back({t.m, t.p, t.q});
}

void DerivativeStencil::eval(double psi, double* tau) const {
    std::array<double, kMaxOrder + 2> sp{}, cp{};
    const double s = std::sin(psi), c = std::cos(psi);
    sp[0] = cp[0] = 1.0;
    for (int i = 1; i <= order_ + 1; ++i) {
        sp[i] = sp[i - 1] * s;
        cp[i] = cp[i - 1] * c;
    }
    for (int j = 0; j <= order_; ++j) {
        double v = 0.0;
        for (const auto& mono : tau_[static_cast<std::size_t>(j)]) v += mono.m * sp[mono.p] * cp[mono.q];
        tau[j] = v;
    }
}

JacobiTable::JacobiTable(const JacobiParams& p, int nmax) : p_(p) {
    if (nmax < 0) throw DomainError("table size must be nonnegative");
    const auto sz = static_cast<std::size_t>(nmax) + 1;
    A_.assign(sz, 0.0);
    B_.assign(sz, 0.0);
    C_.assign(sz, 0.0);
    c_.assign(sz, 0.0);
    s_.assign(sz, 0.0);
    const double a = p.alpha, b = p.beta;
    double logm = 0.0;
    for (int n = 0; n <= nmax; ++n) {
        const auto k = static_cast<std::size_t>(n);
        if (n >= 1) recurrence(n, a, b, A_[k], B_[k], C_[k]);
        if (n <= 1 || n % 1024 == 0) {
            logm = log_sq_norm(n, a, b);
        } else {
            const double nn = n;
            logm += std::log((nn + a) * (nn + b) * (2.0 * nn + a + b - 1.0) /
                             ((2.0 * nn + a + b + 1.0) * (nn + a + b) * nn));
        }
        c_[k] = std::exp(-0.5 * logm);
        s_[k] = std::abs(n + p.rho());
    }
}

std::shared_ptr<const JacobiTable> JacobiTable::acquire(const JacobiParams& p, int nmax) {
    static std::mutex mu;
    static std::map<std::pair<double, double>, std::shared_ptr<const JacobiTable>> cache;
    std::lock_guard lock(mu);
    const auto key = std::make_pair(p.alpha, p.beta);
    auto it = cache.find(key);
    if (it != cache.end() && it->second->nmax() >= nmax) return it->second;
    int size = std::max(nmax, 256);
    if (it != cache.end()) size = std::max(size, 2 * it->second->nmax());
    if (cache.size() > 64) cache.clear();
    auto tab = std::make_shared<const JacobiTable>(p, size);
    cache[key] = tab;
    return tab;
}

void basis_values(const JacobiTable& tab, const DerivativeStencil& st, double psi, int nmax, double* out) {
    if (nmax > tab.nmax()) throw DomainError("basis_values: table too small");
    const int r = st.order();
    std::array<double, kMaxOrder + 1> tau{}, q0{}, q1{}, q2{};
    st.eval(psi, tau.data());
    const double x = std::cos(psi);
    q1[0] = 1.0;
    out[0] = tab.c(0) * tau[0];
    for (int n = 1; n <= nmax; ++n) {
        const double A = tab.A(n), lin = A * x + tab.B(n), C = tab.C(n);
        q2[0] = lin * q1[0] - C * q0[0];
        for (int j = 1; j <= r; ++j) q2[j] = lin * q1[j] + j * A * q1[j - 1] - C * q0[j];
        double v = 0.0;
        for (int j = 0; j <= r; ++j) v += tau[j] * q2[j];
        out[n] = tab.c(n) * v;
        q0 = q1;
        q1 = q2;
    }
}

}  // namespace jlusin
