#include "jlusin/area.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "jlusin/error.hpp"
#include "jlusin/measure.hpp"

namespace jlusin {

namespace {

constexpr double kPi = std::numbers::pi;

double density_raw(double psi, const JacobiParams& p) {
    return std::pow(std::sin(0.5 * psi), 2.0 * p.alpha + 1.0) * std::pow(std::cos(0.5 * psi), 2.0 * p.beta + 1.0);
}

std::vector<double> sorted_cuts(double lo, double hi, std::span<const double> extra) {
    std::vector<double> pts{lo, hi};
    for (double b : extra)
        if (b > lo && b < hi) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double x : pts)
        if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, std::abs(x))) out.push_back(x);
    if (out.back() != hi) out.back() = hi;
    return out;
}

double small_tail(double J1, double J2, double t_lo, int k, bool power_fit) {
    if (!(J1 > 0.0)) return 0.0;
    double pw = 0.0;
    if (power_fit && J2 > 0.0) pw = std::clamp(std::log(J2 / J1) / std::log(2.0), -k - 0.5, 40.0);
    return J1 * std::pow(t_lo, k + 1) / (k + 1 + pw);
}

double single_J(double theta, double t, const SeriesEvaluator& ev, const ConeGrid& cg, std::vector<double>& vals) {
    const JacobiParams& p = ev.params();
    const EtaPlan plan = eta_plan(theta, t, p, cg, ball_volume(t, theta, p));
    vals.resize(plan.psi.size());
    ev.eval(t, plan.psi, vals.data());
    double J = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j) J += plan.w[j] * vals[j] * vals[j];
    return J;
}

double gram_tail(const SeriesEvaluator& ev, int k, double T) {
    const JacobiParams& p = ev.params();
    const auto& g = ev.coefficients();
    const int size = static_cast<int>(std::min<std::size_t>(g.size(), 24));
    const auto G = derivative_gram(p, ev.order(), size);
    double acc = 0.0;
    for (int n = 0; n < size; ++n) {
        const double gn = g[static_cast<std::size_t>(n)];
        if (gn == 0.0) continue;
        for (int m = 0; m < size; ++m) {
            const double gm = g[static_cast<std::size_t>(m)];
            const double Gnm = G[static_cast<std::size_t>(n * size + m)];
            if (gm == 0.0 || Gnm == 0.0) continue;
            acc += gn * gm * Gnm * exp_moment_tail(k, sqrt_eigenvalue(n, p) + sqrt_eigenvalue(m, p), T);
        }
    }
    return acc / total_mass(p);
}

}  // namespace

void ConeGrid::validate() const {
    if (!(t_min > 0.0) || !(t_min_rel > 0.0)) throw ConfigError("cone grid: t_min must be positive");
    if (!(T_max > t_min)) throw ConfigError("cone grid: T_max must exceed t_min");
    if (tail_mode == TailMode::AnalyticBound && T_max < kPi - 1e-12)
        throw ConfigError("cone grid: analytic-bound tail requires T_max >= pi");
    if (panels_per_decade < 1 || t_nodes < 1 || eta_per_level < 2) throw ConfigError("cone grid: sizes too small");
    if (!(aperture > 0.0)) throw ConfigError("cone grid: aperture must be positive");
}

ConeGrid ConeGrid::refined() const {
    ConeGrid g = *this;
    g.panels_per_decade *= 2;
    g.eta_per_level *= 2;
    return g;
}

Rule ConeGrid::t_levels(double lo, double hi, std::span<const double> breaks) const {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("t_levels: need 0 < lo < hi");
    const auto cuts = sorted_cuts(lo, hi, breaks);
    const Rule& g = gauss_legendre(t_nodes);
    Rule r;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double u = std::log(cuts[s]), v = std::log(cuts[s + 1]);
        const int npan = std::max(1, static_cast<int>(std::ceil((v - u) / std::log(10.0) * panels_per_decade - 1e-9)));
        const double step = (v - u) / npan;
        for (int k = 0; k < npan; ++k) {
            const double a = u + k * step, h = 0.5 * step;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double t = std::exp(a + h * (1.0 + g.x[i]));
                r.x.push_back(t);
                r.w.push_back(h * g.w[i] * t);
            }
        }
    }
    return r;
}

EtaPlan eta_plan(double theta, double t, const JacobiParams& p, const ConeGrid& cg, double volume) {
    const double reach = cg.aperture * t;
    const bool lo_edge = theta <= reach, hi_edge = kPi - theta <= reach;
    const double lo = lo_edge ? -theta : -reach;
    const double hi = hi_edge ? kPi - theta : reach;
    const Rule r = singular_panel(cg.eta_per_level, lo, hi, lo_edge ? 2.0 * p.alpha + 1.0 : 0.0,
                                  hi_edge ? 2.0 * p.beta + 1.0 : 0.0);
    EtaPlan plan;
    plan.psi.resize(r.size());
    plan.w.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double psi = std::clamp(theta + r.x[i], 0.0, kPi);
        plan.psi[i] = psi;
        plan.w[i] = r.w[i] * density_raw(psi, p) / volume;
    }
    return plan;
}

double exp_moment_tail(int k, double c, double T) {
    if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
    // e^{-cT} sum_j k!/j! T^j / c^{k-j+1}
    double term = 1.0 / c;  // j = k
    for (int i = 0; i < k; ++i) term /= c;
    double fact_ratio = 1.0;  // k!/j!
    double sum = 0.0;
    double Tj = 1.0;
    for (int j = 0; j <= k; ++j) {
        fact_ratio = 1.0;
        for (int i = j + 1; i <= k; ++i) fact_ratio *= i;
        sum += fact_ratio * Tj * std::pow(c, -(k - j + 1));
        Tj *= T;
    }
    (void)term;
    return std::exp(-c * T) * sum;
}

std::vector<double> derivative_gram(const JacobiParams& p, int r, int size) {
    const Rule rule = polynomial_density_rule(size + r + 2, p);
    const auto tab = JacobiTable::acquire(p, size);
    const DerivativeStencil st(r);
    std::vector<double> G(static_cast<std::size_t>(size * size), 0.0), b(static_cast<std::size_t>(size));
    for (std::size_t i = 0; i < rule.size(); ++i) {
        basis_values(*tab, st, rule.x[i], size - 1, b.data());
        for (int n = 0; n < size; ++n)
            for (int m = 0; m < size; ++m)
                G[static_cast<std::size_t>(n * size + m)] +=
                    rule.w[i] * b[static_cast<std::size_t>(n)] * b[static_cast<std::size_t>(m)];
    }
    return G;
}

ConeNorm cone_norm(double theta, const SeriesEvaluator& ev, int k, const ConeGrid& cg, double t_lo,
                   std::span<const double> t_breaks) {
    cg.validate();
    if (!(theta > 0.0 && theta < kPi)) throw DomainError("cone vertex must lie in (0, pi)");
    ConeNorm out;
    out.t_lo = t_lo;
    out.T = cg.T_max;
    std::vector<double> breaks(t_breaks.begin(), t_breaks.end());
    breaks.push_back(theta / cg.aperture);
    breaks.push_back((kPi - theta) / cg.aperture);
    const Rule tr = cg.t_levels(t_lo, cg.T_max, breaks);
    std::vector<double> vals;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.x[i];
        out.main += tr.w[i] * std::pow(t, k) * single_J(theta, t, ev, cg, vals);
    }
    const double J1 = single_J(theta, t_lo, ev, cg, vals);
    const double J2 = single_J(theta, 2.0 * t_lo, ev, cg, vals);
    out.small_tail = small_tail(J1, J2, t_lo, k, !ev.is_finite());
    if (cg.tail_mode == ConeGrid::TailMode::AnalyticBound) out.large_tail = gram_tail(ev, k, cg.T_max);
    out.value = std::sqrt(std::max(0.0, out.main + out.small_tail + out.large_tail));
    return out;
}

namespace {

struct PairItem {
    int ia;  // index into values for vertex a (or -1)
    int ib;  // index into values for vertex b (or -1)
    double w;
    bool square_of_difference;
};

// Cut points of [u, v] graded geometrically towards the flagged ends with smallest piece h.
std::vector<double> graded(double u, double v, double h, bool left, bool right) {
    std::vector<double> pts{u, v};
    const double L = v - u;
    if (h > 0.0 && h < 0.25 * L) {
        if (left)
            for (double d = h; d < 0.5 * L; d *= 2.0) pts.push_back(u + d);
        if (right)
            for (double d = h; d < 0.5 * L; d *= 2.0) pts.push_back(v - d);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double pair_J(double ta, double tb, double t, const SeriesEvaluator& ev, const ConeGrid& cg,
              std::vector<double>& psi, std::vector<double>& vals) {
    const JacobiParams& p = ev.params();
    const double reach = cg.aperture * t;
    const double th[2] = {ta, tb};
    const double sign[2] = {1.0, -1.0};
    double vol[2], lo[2], hi[2];
    for (int i = 0; i < 2; ++i) {
        vol[i] = ball_volume(t, th[i], p);
        lo[i] = std::max(-reach, -th[i]);
        hi[i] = std::min(reach, kPi - th[i]);
    }
    const double h = std::abs(ta - tb);
    const double ea = p.alpha + 0.5, eb = p.beta + 0.5;
    std::vector<double> ends{lo[0], hi[0], lo[1], hi[1]};
    const auto cuts = sorted_cuts(std::min(lo[0], lo[1]), std::max(hi[0], hi[1]), ends);
    auto is_boundary = [&](double x) {
        for (int i = 0; i < 2; ++i)
            if ((x == -th[i] && th[i] <= reach) || (x == kPi - th[i] && kPi - th[i] <= reach)) return true;
        return false;
    };
    psi.clear();
    std::vector<double> fac;
    std::vector<PairItem> items;
    auto add_node = [&](int i, double eta) {
        const double ps = std::clamp(th[i] + eta, 0.0, kPi);
        psi.push_back(ps);
        fac.push_back(std::sqrt(density_raw(ps, p) / vol[i]));
        return static_cast<int>(psi.size()) - 1;
    };
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double u = cuts[s], v = cuts[s + 1];
        bool active[2];
        for (int i = 0; i < 2; ++i) active[i] = lo[i] <= u + 1e-15 && v <= hi[i] + 1e-15;
        const auto sub = graded(u, v, h, is_boundary(u), is_boundary(v));
        for (std::size_t q = 0; q + 1 < sub.size(); ++q) {
            const double x0 = sub[q], x1 = sub[q + 1];
            double el[2] = {0.0, 0.0}, er[2] = {0.0, 0.0};
            for (int i = 0; i < 2; ++i) {
                if (!active[i]) continue;
                if (q == 0 && lo[i] == -th[i] && u == lo[i]) el[i] = ea;
                if (q + 2 == sub.size() && hi[i] == kPi - th[i] && v == hi[i]) er[i] = eb;
            }
            const bool big = (x1 - x0) > 0.3 * (v - u);
            const int n = big ? cg.eta_per_level : std::max(8, cg.eta_per_level / 2);
            const bool smooth = el[0] == 0.0 && el[1] == 0.0 && er[0] == 0.0 && er[1] == 0.0;
            if (smooth) {
                const Rule r = gauss_legendre_on(n, x0, x1);
                for (std::size_t j = 0; j < r.size(); ++j) {
                    const int ia = active[0] ? add_node(0, r.x[j]) : -1;
                    const int ib = active[1] ? add_node(1, r.x[j]) : -1;
                    items.push_back({ia, ib, r.w[j], true});
                }
                continue;
            }
            for (int i = 0; i < 2; ++i) {
                if (!active[i]) continue;
                for (int k = i; k < 2; ++k) {
                    if (!active[k]) continue;
                    const Rule r = singular_panel(n, x0, x1, el[i] + el[k], er[i] + er[k]);
                    const double mult = (i == k ? 1.0 : 2.0) * sign[i] * sign[k];
                    for (std::size_t j = 0; j < r.size(); ++j) {
                        const int a = add_node(i, r.x[j]);
                        const int b = i == k ? a : add_node(k, r.x[j]);
                        items.push_back({a, b, mult * r.w[j], false});
                    }
                }
            }
        }
    }
    vals.resize(psi.size());
    ev.eval(t, psi, vals.data());
    double J = 0.0;
    for (const auto& it : items) {
        if (it.square_of_difference) {
            double d = 0.0;
            if (it.ia >= 0) d += vals[static_cast<std::size_t>(it.ia)] * fac[static_cast<std::size_t>(it.ia)];
            if (it.ib >= 0) d -= vals[static_cast<std::size_t>(it.ib)] * fac[static_cast<std::size_t>(it.ib)];
            J += it.w * d * d;
        } else {
            const auto a = static_cast<std::size_t>(it.ia), b = static_cast<std::size_t>(it.ib);
            J += it.w * vals[a] * fac[a] * vals[b] * fac[b];
        }
    }
    return J;
}

}  // namespace

ConeNorm cone_norm_difference(double theta_a, double theta_b, const SeriesEvaluator& ev, int k, const ConeGrid& cg,
                              double t_lo, double T, std::span<const double> t_breaks) {
    cg.validate();
    ConeNorm out;
    out.t_lo = t_lo;
    out.T = T;
    if (theta_a == theta_b) return out;
    std::vector<double> breaks(t_breaks.begin(), t_breaks.end());
    for (double th : {theta_a, theta_b}) {
        breaks.push_back(th / cg.aperture);
        breaks.push_back((kPi - th) / cg.aperture);
    }
    const Rule tr = cg.t_levels(t_lo, T, breaks);
    std::vector<double> psi, vals;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.x[i];
        out.main += tr.w[i] * std::pow(t, k) * pair_J(theta_a, theta_b, t, ev, cg, psi, vals);
    }
    const double J1 = pair_J(theta_a, theta_b, t_lo, ev, cg, psi, vals);
    const double J2 = pair_J(theta_a, theta_b, 2.0 * t_lo, ev, cg, psi, vals);
    out.small_tail = small_tail(J1, J2, t_lo, k, true);
    out.value = std::sqrt(std::max(0.0, out.main + out.small_tail));
    return out;
}

double s_kernel(const DerivativeSpec& d, double eta, double t, double theta, double phi, const JacobiParams& p,
                const SpectralTruncation& tr) {
    const double psi = theta + eta;
    if (!(psi > 0.0 && psi < kPi)) return 0.0;
    if (!(std::abs(eta) < t)) return 0.0;
    const double F = kernel_derivative(d, t, psi, phi, p, tr).value;
    return F * std::sqrt(omega(theta, eta, t, p));
}

ConeNorm b_norm_detail(const DerivativeSpec& d, double theta, double phi, const JacobiParams& p, const ConeGrid& cg,
                       const SpectralTruncation& tr) {
    d.require_area();
    const double dist = std::abs(theta - phi);
    if (dist < 1e-9) throw DomainError("b_norm: theta and phi coincide");
    const double t_lo = std::max(tr.t_floor, std::min(cg.t_min, cg.t_min_rel * dist));
    const double one = 1.0;
    const auto ev =
        SeriesEvaluator::kernel(p, d, std::span<const double>(&phi, 1), std::span<const double>(&one, 1), t_lo, tr);
    const double breaks[1] = {dist / cg.aperture};
    return cone_norm(theta, ev, 2 * d.M + 2 * d.N - 1, cg, t_lo, breaks);
}

double b_norm(const DerivativeSpec& d, double theta, double phi, const JacobiParams& p, const ConeGrid& cg,
              const SpectralTruncation& tr) {
    return b_norm_detail(d, theta, phi, p, cg, tr).value;
}

double b_norm(const DerivativeSpec& d, double theta, double phi, const JacobiParams& p, const ConeGrid& cg) {
    return b_norm(d, theta, phi, p, cg, SpectralTruncation::for_spec(d));
}

std::vector<double> area_coefficients(std::span<const double> f, const DerivativeSpec& d, const JacobiParams& p) {
    std::vector<double> g(f.begin(), f.end());
    for (std::size_t n = 0; n < g.size(); ++n) g[n] *= mode_multiplier(static_cast<int>(n), d, p);
    return g;
}

double area_integral(std::span<const double> f, const DerivativeSpec& d, double theta, const JacobiParams& p,
                     const ConeGrid& cg) {
    d.require_area();
    const auto ev = SeriesEvaluator::finite(p, d.theta_order(), area_coefficients(f, d, p));
    return cone_norm(theta, ev, 2 * d.M + 2 * d.N - 1, cg, cg.t_min).value;
}

double g_function(std::span<const double> f, const DerivativeSpec& d, double theta, const JacobiParams& p) {
    d.require_area();
    const auto g = area_coefficients(f, d, p);
    const int size = static_cast<int>(g.size());
    if (size == 0) return 0.0;
    const int k = 2 * d.M + 2 * d.N - 1;
    const auto tab = JacobiTable::acquire(p, size);
    std::vector<double> b(static_cast<std::size_t>(size));
    basis_values(*tab, DerivativeStencil(d.theta_order()), theta, size - 1, b.data());
    for (int n = 0; n < size; ++n) b[static_cast<std::size_t>(n)] *= g[static_cast<std::size_t>(n)];
    const double kfact = std::tgamma(k + 1.0);
    double acc = 0.0;
    for (int n = 0; n < size; ++n)
        for (int m = 0; m < size; ++m) {
            const double bb = b[static_cast<std::size_t>(n)] * b[static_cast<std::size_t>(m)];
            if (bb == 0.0) continue;
            const double c = sqrt_eigenvalue(n, p) + sqrt_eigenvalue(m, p);
            if (!(c > 0.0)) throw DomainError("g_function: constant mode is not square integrable in t");
            acc += bb * kfact / std::pow(c, k + 1);
        }
    return std::sqrt(std::max(0.0, acc));
}

double g_function_l2_norm(std::span<const double> f, const DerivativeSpec& d, const JacobiParams& p) {
    d.require_area();
    const auto g = area_coefficients(f, d, p);
    const int size = static_cast<int>(g.size());
    if (size == 0) return 0.0;
    const int k = 2 * d.M + 2 * d.N - 1;
    const auto G = derivative_gram(p, d.theta_order(), size);
    const double kfact = std::tgamma(k + 1.0);
    double acc = 0.0;
    for (int n = 0; n < size; ++n)
        for (int m = 0; m < size; ++m) {
            const double v = g[static_cast<std::size_t>(n)] * g[static_cast<std::size_t>(m)] *
                             G[static_cast<std::size_t>(n * size + m)];
            if (v == 0.0) continue;
            acc += v * kfact / std::pow(sqrt_eigenvalue(n, p) + sqrt_eigenvalue(m, p), k + 1);
        }
    return std::sqrt(std::max(0.0, acc));
}

AreaQuadraticForm::AreaQuadraticForm(const DerivativeSpec& d, const JacobiParams& p, int modes, const ConeGrid& cg,
                                     int theta_nodes)
    : modes_(modes), G_(static_cast<std::size_t>(modes * modes), 0.0) {
    d.require_area();
    cg.validate();
    if (modes < 1) throw ConfigError("quadratic form needs at least one mode");
    const int k = 2 * d.M + 2 * d.N - 1;
    const int r = d.theta_order();
    const auto tab = JacobiTable::acquire(p, modes);
    const DerivativeStencil st(r);
    std::vector<double> mult(static_cast<std::size_t>(modes)), s(static_cast<std::size_t>(modes));
    for (int n = 0; n < modes; ++n) {
        mult[static_cast<std::size_t>(n)] = mode_multiplier(n, d, p);
        s[static_cast<std::size_t>(n)] = sqrt_eigenvalue(n, p);
    }
    const Rule th = density_rule(0.0, kPi, p, std::max(2, theta_nodes / 2));
    std::vector<double> b(static_cast<std::size_t>(modes)), row(static_cast<std::size_t>(modes));
    auto accumulate = [&](double weight, double t, const EtaPlan& plan) {
        for (std::size_t j = 0; j < plan.psi.size(); ++j) {
            basis_values(*tab, st, plan.psi[j], modes - 1, b.data());
            const double w = weight * plan.w[j];
            for (int n = 0; n < modes; ++n) {
                const auto nn = static_cast<std::size_t>(n);
                row[nn] = std::exp(-t * s[nn]) * mult[nn] * b[nn];
            }
            for (int n = 0; n < modes; ++n)
                for (int m = 0; m < modes; ++m)
                    G_[static_cast<std::size_t>(n * modes + m)] +=
                        w * row[static_cast<std::size_t>(n)] * row[static_cast<std::size_t>(m)];
        }
    };
    double mass = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
        const double theta = th.x[i], wth = th.w[i];
        mass += wth;
        const double breaks[2] = {theta / cg.aperture, (kPi - theta) / cg.aperture};
        const Rule tr = cg.t_levels(cg.t_min, cg.T_max, breaks);
        for (std::size_t q = 0; q < tr.size(); ++q) {
            const double t = tr.x[q];
            accumulate(wth * tr.w[q] * std::pow(t, k), t, eta_plan(theta, t, p, cg, ball_volume(t, theta, p)));
        }
        const double t0 = cg.t_min;
        accumulate(wth * std::pow(t0, k + 1) / (k + 1), t0, eta_plan(theta, t0, p, cg, ball_volume(t0, theta, p)));
    }
    if (cg.tail_mode == ConeGrid::TailMode::AnalyticBound) {
        const auto Gr = derivative_gram(p, r, modes);
        const double scale = mass / total_mass(p);
        for (int n = 0; n < modes; ++n)
            for (int m = 0; m < modes; ++m) {
                const auto idx = static_cast<std::size_t>(n * modes + m);
                const double v = mult[static_cast<std::size_t>(n)] * mult[static_cast<std::size_t>(m)] * Gr[idx];
                if (v == 0.0) continue;
                G_[idx] += scale * v *
                           exp_moment_tail(k, s[static_cast<std::size_t>(n)] + s[static_cast<std::size_t>(m)],
                                           cg.T_max);
            }
    }
}

double AreaQuadraticForm::norm_sq(std::span<const double> f) const {
    if (static_cast<int>(f.size()) > modes_) throw DomainError("coefficient list longer than the quadratic form");
    double acc = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n)
        for (std::size_t m = 0; m < f.size(); ++m) acc += f[n] * G_[n * static_cast<std::size_t>(modes_) + m] * f[m];
    return std::max(0.0, acc);
}

double area_l2_norm(std::span<const double> f, const DerivativeSpec& d, const JacobiParams& p, const ConeGrid& cg,
                    int theta_nodes) {
    if (f.empty()) return 0.0;
    return std::sqrt(AreaQuadraticForm(d, p, static_cast<int>(f.size()), cg, theta_nodes).norm_sq(f));
}

}  // namespace jlusin
