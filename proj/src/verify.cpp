#include "jlusin/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/random/sobol.hpp>

#include "jlusin/error.hpp"
#include "jlusin/measure.hpp"
#include "jlusin/parallel.hpp"
#include "jlusin/upsilon.hpp"

namespace jlusin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent stream per (seed, tag, index), so sample i does not depend on how many samples are drawn.
struct Rng {
    std::mt19937_64 eng;
    Rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32)};
        eng.seed(seq);
    }
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    bool coin() { return (eng() >> 63) != 0; }
};

std::uint64_t tag_of(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
    return h;
}

// Rotated Sobol points in [0, 1)^dim. A run of n points is a prefix of any longer run with the same seed and tag.
std::vector<std::vector<double>> qmc_points(std::uint64_t seed, const std::string& tag, int dim, std::size_t n) {
    boost::random::sobol gen(static_cast<std::size_t>(dim));
    Rng rng(seed, tag_of(tag), ~0ull);
    std::vector<double> shift(static_cast<std::size_t>(dim));
    for (auto& x : shift) x = rng.uniform();
    const double scale = 0x1.0p-64;
    std::vector<std::vector<double>> out(n, std::vector<double>(static_cast<std::size_t>(dim)));
    for (auto& pt : out)
        for (std::size_t k = 0; k < pt.size(); ++k) {
            const double x = static_cast<double>(gen()) * scale + shift[k];
            pt[k] = x - std::floor(x);
        }
    return out;
}

double lerp(double lo, double hi, double a) { return lo + (hi - lo) * a; }
double log_lerp(double lo, double hi, double a) { return lo * std::pow(hi / lo, a); }

// Stratum s of the angle-pair sample space, (a, b) in [0, 1]^2:
// 0 / 1 near the endpoints 0 / pi, 2 near the diagonal, 3 bulk.
std::pair<double, double> pair_in_stratum(int s, double a, double b) {
    double th = 0.0, ph = 0.0;
    switch (s) {
        case 0:
        case 1:
            th = log_lerp(1e-3, 0.3, a);
            ph = log_lerp(2e-3, 1.5, b);
            if (s == 1) {
                th = kPi - th;
                ph = kPi - ph;
            }
            break;
        case 2: {
            th = lerp(0.05, kPi - 0.05, a);
            const double d = log_lerp(1e-3, 5e-2, b);
            ph = th < 0.5 * kPi ? th + d : th - d;
            break;
        }
        default:
            th = lerp(0.1, kPi - 0.1, a);
            ph = 0.1 + std::fmod(th - 0.1 + lerp(0.3, kPi - 0.5, b), kPi - 0.2);
            break;
    }
    return {th, ph};
}

// u[0] picks the stratum (a quarter of the points each), u[0] and u[1] place the pair inside it.
std::pair<double, double> pair_from(const std::vector<double>& u) {
    const int s = std::min(3, static_cast<int>(4.0 * u[0]));
    return pair_in_stratum(s, 4.0 * u[0] - s, u[1]);
}

// nested grid sizes: level l has (n - 1) 2^l + 1 points and contains the coarser grid
int nested(int n, int level) { return ((n - 1) << level) + 1; }

// One pass of a suite at a given resolution level.
struct Pass {
    std::vector<double> values;  // per-sample measured quantity (NaN = failed evaluation)
    int skipped = 0;
    bool violated = false;
    std::string note;
    std::map<std::string, double> extra;
};

struct SupInf {
    double sup = 0.0;
    double inf = std::numeric_limits<double>::infinity();
    int ok = 0;
    int failed = 0;
};

SupInf sup_inf(const std::vector<double>& v) {
    SupInf r;
    for (double x : v) {
        if (!std::isfinite(x)) {
            ++r.failed;
            continue;
        }
        ++r.ok;
        r.sup = std::max(r.sup, x);
        r.inf = std::min(r.inf, x);
    }
    return r;
}

double rel_change(double a, double b) {
    if (a == b) return 0.0;
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(b - a) / scale : 0.0;
}

template <class F>
std::vector<double> eval_samples(std::size_t n, F&& f, int threads) {
    std::vector<double> out(n, kNaN);
    parallel_for(
        n,
        [&](std::size_t i) {
            try {
                out[i] = f(i);
            } catch (const ConvergenceError&) {
                out[i] = kNaN;
            }
        },
        threads);
    return out;
}

enum class Kind { Sup, Ratio, Identity };

VerificationReport assemble(const std::string& suite, const SuiteConfig& cfg, Kind kind, const Pass& base,
                            const Pass& fine, double gamma, std::string flavor) {
    VerificationReport r;
    r.suite = suite;
    r.alpha = cfg.p.alpha;
    r.beta = cfg.p.beta;
    r.M = cfg.d.M;
    r.N = cfg.d.N;
    r.flavor = std::move(flavor);
    r.gamma = gamma;
    r.seed = cfg.seed;
    r.exploratory = cfg.exploratory;
    const SupInf a = sup_inf(base.values), b = sup_inf(fine.values);
    if (b.ok == 0) throw ConvergenceError(suite + ": every sample failed to evaluate");
    r.samples = static_cast<int>(fine.values.size());
    r.stats = fine.extra;
    if (a.failed + b.failed > 0) r.stats["failedSamples"] = a.failed + b.failed;
    if (base.skipped + fine.skipped > 0) r.stats["skippedSamples"] = base.skipped + fine.skipped;
    r.notes = fine.note.empty() ? base.note : fine.note;
    bool violated = base.violated || fine.violated;
    switch (kind) {
        case Kind::Sup:
            r.measuredC = b.sup;
            r.refinementDelta = rel_change(a.sup, b.sup);
            break;
        case Kind::Ratio:
            r.measuredC = b.sup;
            r.stats["measuredInf"] = b.inf;
            r.refinementDelta = std::max(rel_change(a.sup, b.sup), rel_change(a.inf, b.inf));
            if (!(b.inf > 0.0) || !std::isfinite(b.sup)) violated = true;
            break;
        case Kind::Identity: {
            // values are the identity's left-hand side; target 1
            double dev = 0.0, drift = 0.0;
            const std::size_t n = std::min(base.values.size(), fine.values.size());
            for (double x : fine.values) dev = std::max(dev, std::abs(x - 1.0));
            for (std::size_t i = 0; i < n; ++i) drift = std::max(drift, rel_change(base.values[i], fine.values[i]));
            r.measuredC = dev;
            r.refinementDelta = drift;
            if (!(dev < 1e-9)) violated = true;
            break;
        }
    }
    if (violated)
        r.verdict = Verdict::Violated;
    else
        r.verdict = r.refinementDelta < 0.1 ? Verdict::Stable : Verdict::Unstable;
    return r;
}

double gamma_for(const SuiteConfig& cfg, bool strict) {
    const double g = std::isnan(cfg.gamma) ? GammaChoice::default_for(cfg.p) : cfg.gamma;
    return GammaChoice::make(g, cfg.p, strict, cfg.exploratory).gamma;
}

DerivativeSpec with_flavor(DerivativeSpec d, Flavor f) {
    d.flavor = f;
    return d;
}

// Sum of both kernel families at (t, psi, phi).
double both_families(const DerivativeSpec& d, double t, double psi, double phi, const JacobiParams& p,
                     double eps_scale) {
    double acc = 0.0;
    for (Flavor f : {Flavor::Delta, Flavor::D}) {
        const DerivativeSpec df = with_flavor(d, f);
        SpectralTruncation tr = SpectralTruncation::for_spec(df);
        tr.tail_eps *= eps_scale;
        acc += std::abs(kernel_derivative(df, t, psi, phi, p, tr).value);
    }
    return acc;
}

// Integral over psi in [a, b] of f(psi) * density, graded towards 0 and pi.
double graded_density_integral(const std::function<double(double)>& f, double a, double b, const JacobiParams& p,
                               int n) {
    auto side = [&](double lo, double hi, bool toward_zero) {
        // distance to the singular end measured from the near endpoint
        const double near = toward_zero ? lo : kPi - hi;
        std::vector<std::pair<double, double>> panels;
        double e_near = 0.0;
        if (near <= 0.0) {
            e_near = toward_zero ? 2.0 * p.alpha + 1.0 : 2.0 * p.beta + 1.0;
            panels.push_back({lo, hi});
        } else {
            // cuts at distances near, 2 near, 4 near, ... from the singular end
            std::vector<double> d{near};
            const double far = toward_zero ? hi : kPi - lo;
            for (double x = 2.0 * near; x < far; x *= 2.0) d.push_back(x);
            d.push_back(far);
            for (std::size_t k = 0; k + 1 < d.size(); ++k) {
                if (toward_zero)
                    panels.push_back({d[k], d[k + 1]});
                else
                    panels.push_back({kPi - d[k + 1], kPi - d[k]});
            }
        }
        double s = 0.0;
        for (const auto& [u, v] : panels) {
            if (v <= u) continue;
            const bool sing = e_near != 0.0 && (toward_zero ? u == 0.0 : v == kPi);
            const Rule r = singular_panel(n, u, v, sing && toward_zero ? e_near : 0.0,
                                          sing && !toward_zero ? e_near : 0.0);
            for (std::size_t i = 0; i < r.size(); ++i) {
                const double x = std::clamp(r.x[i], 0.0, kPi);
                const double dens = std::pow(std::sin(0.5 * x), 2.0 * p.alpha + 1.0) *
                                    std::pow(std::cos(0.5 * x), 2.0 * p.beta + 1.0);
                s += r.w[i] * dens * f(x);
            }
        }
        return s;
    };
    constexpr double half = 0.5 * kPi;
    double total = 0.0;
    if (a < half) total += side(a, std::min(b, half), true);
    if (b > half) total += side(std::max(a, half), b, false);
    return total;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Unstable: return "unstable";
        case Verdict::Violated: return "violated";
    }
    return "?";
}

bool VerificationReport::operator==(const VerificationReport& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    if (stats.size() != o.stats.size()) return false;
    for (auto i = stats.begin(), j = o.stats.begin(); i != stats.end(); ++i, ++j)
        if (i->first != j->first || !same(i->second, j->second)) return false;
    return suite == o.suite && same(alpha, o.alpha) && same(beta, o.beta) && M == o.M && N == o.N &&
           flavor == o.flavor && same(gamma, o.gamma) && same(measuredC, o.measuredC) &&
           same(refinementDelta, o.refinementDelta) && samples == o.samples && verdict == o.verdict &&
           seed == o.seed && same(runtimeMs, o.runtimeMs) && version == o.version && exploratory == o.exploratory &&
           notes == o.notes;
}

Verdict parse_verdict(const std::string& s) {
    if (s == "stable") return Verdict::Stable;
    if (s == "unstable") return Verdict::Unstable;
    if (s == "violated") return Verdict::Violated;
    throw ConfigError("unknown verdict '" + s + "'");
}

GammaChoice GammaChoice::make(double gamma, const JacobiParams& p, bool strict, bool exploratory) {
    const double cap = std::min(p.alpha, p.beta) + 1.0;
    // alpha + 1 is inexact, so the inclusive bound allows a few ulps
    const bool ok = gamma > 0.0 && gamma <= 0.5 && (strict ? gamma < cap : gamma <= cap + 1e-12);
    if (!ok && !exploratory) {
        std::ostringstream os;
        os << "gamma = " << gamma << " outside (0, 1/2] with gamma " << (strict ? "<" : "<=")
           << " min(alpha, beta) + 1 = " << cap << " (use exploratory mode to run anyway)";
        throw ConfigError(os.str());
    }
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    return {gamma, !ok};
}

ConeGrid verifier_grid() {
    ConeGrid g;
    g.panels_per_decade = 2;
    g.t_nodes = 4;
    g.eta_per_level = 10;
    return g;
}

void SuiteConfig::validate() const {
    (void)JacobiParams(p.alpha, p.beta);
    d.validate();
    cone.validate();
    if (grid_points < 2 || ratio_samples < 1 || bound_samples < 1 || lemma_samples < 1) throw ConfigError("sample counts must be positive");
    if (pi_points < 2) throw ConfigError("pi_points must be at least 2");
    if (l2_modes < 1 || l2_modes > 32) throw ConfigError("l2 modes must lie in 1..32");
    if (l2_trials < 10) throw ConfigError("l2 check needs at least 10 trials");
    if (l2_theta_nodes < 4) throw ConfigError("l2 theta nodes must be at least 4");
}

const std::vector<std::pair<int, int>>& standard_mn_pairs() {
    static const std::vector<std::pair<int, int>> v{{1, 0}, {0, 1}, {1, 1}, {0, 2}, {2, 1}};
    return v;
}

std::vector<AnglePair> stratified_pairs(std::uint64_t seed, int per_stratum) {
    std::vector<AnglePair> out;
    for (int s = 0; s < 4; ++s) {
        for (int j = 0; j < per_stratum; ++j) {
            Rng rng(seed, 100 + static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(j));
            double th = 0.0, ph = 0.0;
            for (;;) {
                switch (s) {
                    case 0:
                    case 1: {
                        th = rng.log_uniform(1e-3, 0.3);
                        ph = rng.coin() ? rng.log_uniform(1e-3, 0.3) : rng.uniform(0.02, kPi - 0.02);
                        if (s == 1) {
                            th = kPi - th;
                            ph = kPi - ph;
                        }
                        break;
                    }
                    case 2: {
                        th = rng.uniform(0.05, kPi - 0.05);
                        const double d = j == 0 ? 1e-3 : rng.log_uniform(1e-3, 5e-2);
                        ph = rng.coin() ? th + d : th - d;
                        break;
                    }
                    default:
                        th = rng.uniform(0.1, kPi - 0.1);
                        ph = rng.uniform(0.1, kPi - 0.1);
                        break;
                }
                if (ph > 0.0 && ph < kPi && std::abs(th - ph) >= (s == 3 ? 0.05 : 1e-3) * 0.999) break;
            }
            out.push_back({th, ph, (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint64_t>(j)});
        }
    }
    return out;
}

std::vector<AnglePair> stratum_grid(int n) {
    if (n < 2) throw ConfigError("stratum grid needs at least 2 points per dimension");
    std::vector<AnglePair> out;
    auto node = [n](int i) { return static_cast<double>(i) / (n - 1); };
    for (int s = 0; s < 4; ++s)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto [th, ph] = pair_in_stratum(s, node(i), node(j));
                if (std::abs(th - ph) < 1e-4) continue;
                out.push_back({th, ph, (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint64_t>(i * n + j)});
            }
    return out;
}

double omega_mass(double theta, double t, const JacobiParams& p, int nodes) {
    const double a = std::max(0.0, theta - t), b = std::min(kPi, theta + t);
    const double num = graded_density_integral([](double) { return 1.0; }, a, b, p, nodes);
    return num / ball_volume(t, theta, p);
}

double omega_diff_integral(double theta, double theta2, double t, const JacobiParams& p, int nodes) {
    const double th[2] = {theta, theta2};
    const double lo = std::max(-t, -std::min(theta, theta2));
    const double hi = std::min(t, kPi - std::max(theta, theta2));
    if (!(hi > lo)) return 0.0;
    double vol[2], gap_lo[2], gap_hi[2], el[2], eh[2];
    for (int i = 0; i < 2; ++i) {
        vol[i] = ball_volume(t, th[i], p);
        // psi - 0 = gap_lo + s and pi - psi = gap_hi + r, exactly zero gaps at a touching edge
        gap_lo[i] = th[i] + lo;
        gap_hi[i] = (kPi - th[i]) - hi;
        el[i] = gap_lo[i] == 0.0 ? p.alpha + 0.5 : 0.0;
        eh[i] = gap_hi[i] == 0.0 ? p.beta + 0.5 : 0.0;
    }
    // s = eta - lo and r = hi - eta; each half is integrated in the offset from its own end
    auto root = [&](int i, double s, double r) {
        return std::sqrt(std::pow(std::sin(0.5 * (gap_lo[i] + s)), 2.0 * p.alpha + 1.0) *
                         std::pow(std::sin(0.5 * (gap_hi[i] + r)), 2.0 * p.beta + 1.0) / vol[i]);
    };
    const double L = hi - lo;
    constexpr int K = 20;
    std::vector<double> cuts{0.0, 0.5 * L};
    for (int k = 1; k <= K; ++k) cuts.push_back(0.5 * L * std::pow(4.0, -k));
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (int side = 0; side < 2; ++side) {
        const double* e = side == 0 ? el : eh;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double u = cuts[k], v = cuts[k + 1];
            const double a[2] = {k == 0 ? e[0] : 0.0, k == 0 ? e[1] : 0.0};
            auto at = [&](int i, double off) { return side == 0 ? root(i, off, L - off) : root(i, L - off, off); };
            if (a[0] == 0.0 && a[1] == 0.0) {
                const Rule r = gauss_legendre_on(nodes, u, v);
                for (std::size_t q = 0; q < r.size(); ++q) {
                    const double d = at(0, r.x[q]) - at(1, r.x[q]);
                    acc += r.w[q] * d * d;
                }
                continue;
            }
            for (int i = 0; i < 2; ++i)
                for (int j = i; j < 2; ++j) {
                    const Rule r = singular_panel(nodes, u, v, a[i] + a[j], 0.0);
                    for (std::size_t q = 0; q < r.size(); ++q)
                        acc += (i == j ? 1.0 : -2.0) * r.w[q] * at(i, r.x[q]) * at(j, r.x[q]);
                }
        }
    }
    return std::max(0.0, acc);
}

double omega_prime_integral(double theta, double theta2, double t, const JacobiParams& p) {
    if (theta == theta2) return 0.0;
    const double a = std::max(0.0, theta - t), b = std::min(kPi, theta + t);
    double lo, hi;
    if (theta2 < theta) {
        // theta2 + eta <= 0  <=>  psi <= theta - theta2
        lo = a;
        hi = std::min(b, theta - theta2);
    } else {
        lo = std::max(a, kPi - (theta2 - theta));
        hi = b;
    }
    if (!(hi > lo)) return 0.0;
    return measure_interval(lo, hi, p) / ball_volume(t, theta, p);
}

double growth_constant(const DerivativeSpec& d, double theta, double phi, const JacobiParams& p, const ConeGrid& cg) {
    const double dist = std::abs(theta - phi);
    return b_norm(d, theta, phi, p, cg) * measure(Ball{theta, dist}, p);
}

double sm1_norm(const DerivativeSpec& d, double theta, double theta2, double phi, const JacobiParams& p,
                const ConeGrid& cg) {
    d.require_area();
    const double dist = std::min(std::abs(theta - phi), std::abs(theta2 - phi));
    if (dist < 1e-9) throw DomainError("sm1: vertex coincides with phi");
    const auto tr = SpectralTruncation::for_spec(d);
    const double t_lo = std::max(tr.t_floor, std::min(cg.t_min, cg.t_min_rel * dist));
    const double one = 1.0;
    const auto ev =
        SeriesEvaluator::kernel(p, d, std::span<const double>(&phi, 1), std::span<const double>(&one, 1), t_lo, tr);
    const int k = 2 * d.M + 2 * d.N - 1;
    // far enough that exp(-2 s t) t^k is negligible against the kept part
    const double smin = ev.smallest_rate();
    double T = cg.T_max;
    if (std::isfinite(smin))
        for (int i = 0; i < 4; ++i) T = std::min(200.0, kPi + (21.0 + k * std::log(T / kPi)) / (2.0 * smin));
    ConeGrid g = cg;
    g.tail_mode = ConeGrid::TailMode::Truncate;
    g.T_max = std::max(T, cg.T_max);
    const double breaks[2] = {std::abs(theta - phi), std::abs(theta2 - phi)};
    return cone_norm_difference(theta, theta2, ev, k, g, t_lo, g.T_max, breaks).value;
}

double sm2_norm(const DerivativeSpec& d, double theta, double phi, double phi2, const JacobiParams& p,
                const ConeGrid& cg) {
    d.require_area();
    const double dist = std::min(std::abs(theta - phi), std::abs(theta - phi2));
    if (dist < 1e-9) throw DomainError("sm2: vertex coincides with phi");
    const auto tr = SpectralTruncation::for_spec(d);
    const double t_lo = std::max(tr.t_floor, std::min(cg.t_min, cg.t_min_rel * dist));
    const double phis[2] = {phi, phi2};
    const double w[2] = {1.0, -1.0};
    const auto ev = SeriesEvaluator::kernel(p, d, phis, w, t_lo, tr);
    const double breaks[2] = {std::abs(theta - phi), std::abs(theta - phi2)};
    return cone_norm(theta, ev, 2 * d.M + 2 * d.N - 1, cg, t_lo, breaks).value;
}

std::vector<double> l2_ratios(const DerivativeSpec& d, const JacobiParams& p, int modes, int trials,
                              std::uint64_t seed, const ConeGrid& cg, int theta_nodes) {
    const AreaQuadraticForm Q(d, p, modes, cg, theta_nodes);
    std::vector<double> out;
    std::vector<double> f(static_cast<std::size_t>(modes));
    for (int i = 0; i < trials; ++i) {
        Rng rng(seed, tag_of("l2"), static_cast<std::uint64_t>(i));
        double nn = 0.0;
        for (auto& c : f) {
            c = rng.uniform(-1.0, 1.0);
            nn += c * c;
        }
        out.push_back(std::sqrt(Q.norm_sq(f) / nn));
    }
    return out;
}

namespace {

using PassFn = std::function<Pass(int level)>;

struct SuiteDef {
    Kind kind;
    bool strict_gamma;  // meaningful when uses_gamma
    bool uses_gamma;
    bool both_flavors;  // the suite bounds the sum of both kernel families
    std::function<Pass(const SuiteConfig&, int level, double gamma)> pass;
};

int scaled(int n, int level) { return n << level; }

int grid_points(const SuiteConfig& c, int level) { return nested(c.grid_points, level); }

Pass pass_growth(const SuiteConfig& c, int level, double) {
    c.d.require_area();
    const ConeGrid cg = level ? c.cone.refined() : c.cone;
    const auto pairs = stratum_grid(grid_points(c, level));
    Pass ps;
    ps.values = eval_samples(
        pairs.size(), [&](std::size_t i) { return growth_constant(c.d, pairs[i].theta, pairs[i].phi, c.p, cg); },
        c.threads);
    for (double v : ps.values)
        if (std::isfinite(v) && !(v > 0.0)) ps.violated = true;
    if (ps.violated) ps.note = "kernel norm not strictly positive";
    return ps;
}

// Shift fraction of |theta - phi| / 2 for the smoothness triples; the hypothesis needs it below 1.
constexpr double kShiftFraction = 0.95;

struct Triple {
    double theta, phi, moved;
};

std::vector<Triple> smoothness_triples(const std::vector<AnglePair>& pairs, bool theta_side, int& skipped) {
    std::vector<Triple> out;
    for (const auto& pr : pairs) {
        const double dist = std::abs(pr.theta - pr.phi);
        const double x = theta_side ? pr.theta : pr.phi, other = theta_side ? pr.phi : pr.theta;
        const double toward = other > x ? 1.0 : -1.0;
        for (double dir : {toward, -toward}) {
            const double y = x + dir * kShiftFraction * 0.5 * dist;
            if (!(y > 0.0 && y < kPi)) {
                ++skipped;
                continue;
            }
            out.push_back({pr.theta, pr.phi, y});
        }
    }
    return out;
}

Pass pass_sm(const SuiteConfig& c, int level, double gamma, bool theta_side) {
    c.d.require_area();
    const ConeGrid cg = level ? c.cone.refined() : c.cone;
    Pass ps;
    const auto triples = smoothness_triples(stratum_grid(grid_points(c, level)), theta_side, ps.skipped);
    ps.values = eval_samples(
        triples.size(),
        [&](std::size_t i) {
            const auto& [th, ph, y] = triples[i];
            const double dist = std::abs(th - ph);
            const double shift = std::abs(y - (theta_side ? th : ph));
            const double norm = theta_side ? sm1_norm(c.d, th, y, ph, c.p, cg) : sm2_norm(c.d, th, ph, y, c.p, cg);
            return norm * std::pow(dist / shift, gamma) * measure(Ball{th, dist}, c.p);
        },
        c.threads);
    return ps;
}

// theta-tilde or phi-tilde with |theta - phi| > 2 |shift|; the fraction sits at the admissible edge a third of the time
double shifted(double x, double dist, double z_rho, double z_sign) {
    const double rho = z_rho < 1.0 / 3.0 ? kShiftFraction : log_lerp(1e-2, kShiftFraction, 1.5 * z_rho - 0.5);
    double y = x + (z_sign < 0.5 ? 1.0 : -1.0) * rho * 0.5 * dist;
    if (!(y > 0.0 && y < kPi)) y = 2.0 * x - y;
    if (!(y > 0.0 && y < kPi)) y = x + 0.5 * (std::clamp(y, 0.0, kPi) - x);
    return y;
}

// eta uniform over the admissible part of (-t, t)
double eta_from(double theta, double t, double z) {
    const double lo = std::max(-t, -theta), hi = std::min(t, kPi - theta);
    return lerp(lo, hi, z);
}

bool inside(double x) { return x > 0.0 && x < kPi; }

struct TPoint {
    double t, theta, phi, eta;
};

std::vector<TPoint> bound_points(const SuiteConfig& c, int count, const std::string& tag, bool with_eta, int& skipped) {
    std::vector<TPoint> pts;
    for (const auto& u : qmc_points(c.seed, tag, 4, static_cast<std::size_t>(count))) {
        const auto [th, ph] = pair_from(u);
        // a fifth of the points sit at t = pi, where the ratio peaks
        const double t = u[2] < 0.2 ? kPi : log_lerp(1e-2, kPi, 1.25 * u[2] - 0.25);
        TPoint q{t, th, ph, 0.0};
        if (with_eta) q.eta = eta_from(th, q.t, u[3]);
        if (!inside(q.theta + q.eta) || !inside(q.phi)) {
            ++skipped;
            continue;
        }
        pts.push_back(q);
    }
    return pts;
}

Pass pass_ht1(const SuiteConfig& c, int level, bool with_eta) {
    Pass ps;
    const auto pts = bound_points(c, scaled(c.bound_samples, level), with_eta ? "Ht1eta" : "Ht1", with_eta, ps.skipped);
    const UpsilonSpec us{2.0 * (c.d.M + c.d.N), static_cast<double>(c.d.L + c.d.P), c.p};
    const int npts = scaled(c.pi_points, level);
    const double eps_scale = level ? 1e-2 : 1.0;
    ps.values = eval_samples(
        pts.size(),
        [&](std::size_t i) {
            const auto& q = pts[i];
            const double lhs = both_families(c.d, q.t, q.theta + q.eta, q.phi, c.p, eps_scale);
            return lhs / upsilon(us, q.t, q.theta, q.phi, npts);
        },
        c.threads);
    return ps;
}

// a third uniform on [-1, 1], a third each log-clustered at +1 and -1
double unit_from(double z) {
    if (z < 1.0 / 3.0) return lerp(-1.0, 1.0, 3.0 * z);
    if (z < 2.0 / 3.0) return 1.0 - log_lerp(1e-8, 1.0, 3.0 * z - 1.0);
    return -1.0 + log_lerp(1e-8, 1.0, 3.0 * z - 2.0);
}

Pass pass_qeta(const SuiteConfig& c, int level) {
    Pass ps;
    for (const auto& u : qmc_points(c.seed, "qeta", 6, static_cast<std::size_t>(scaled(c.ratio_samples, level)))) {
        const auto [th, ph] = pair_from(u);
        const double t = log_lerp(1e-4, kPi, u[2]);
        const double eta = eta_from(th, t, u[3]);
        if (!inside(th + eta) || !inside(ph)) {
            ++ps.skipped;
            continue;
        }
        const double uu = unit_from(u[4]), vv = unit_from(u[5]);
        ps.values.push_back((t * t + q_fn(th + eta, ph, uu, vv)) / (t * t + q_fn(th, ph, uu, vv)));
    }
    return ps;
}

Pass pass_upstilde(const SuiteConfig& c, int level) {
    Pass ps;
    std::vector<std::vector<double>> pts;
    for (auto& u : qmc_points(c.seed, "upstilde", 6, static_cast<std::size_t>(scaled(c.ratio_samples, level)))) {
        const auto [th, ph] = pair_from(u);
        if (inside(ph) && std::abs(th - ph) >= 1e-4)
            pts.push_back(std::move(u));
        else
            ++ps.skipped;
    }
    const UpsilonSpec us{c.W, c.s, c.p};
    const int npts = scaled(c.pi_points, level);
    ps.values = eval_samples(
        pts.size(),
        [&](std::size_t i) {
            const auto& u = pts[i];
            const auto [th, ph] = pair_from(u);
            const double dist = std::abs(th - ph);
            const double t = log_lerp(1e-3, kPi, u[2]);
            const double base = upsilon(us, t, th, ph, npts);
            if (u[5] < 0.5) return upsilon(us, t, shifted(th, dist, u[3], u[4]), ph, npts) / base;
            return upsilon(us, t, th, shifted(ph, dist, u[3], u[4]), npts) / base;
        },
        c.threads);
    return ps;
}

Pass pass_finbridge(const SuiteConfig& c, int level) {
    if (!(c.W >= 1.0) || !(c.s >= 0.0)) throw ConfigError("finbridge requires W >= 1 and s >= 0");
    const auto pairs = stratum_grid(grid_points(c, level));
    const UpsilonSpec us{c.W, c.s, c.p};
    UpsilonNormOptions opt;
    opt.npts = scaled(c.pi_points, level);
    opt.panels = scaled(200, level);
    Pass ps;
    ps.values = eval_samples(
        pairs.size(),
        [&](std::size_t i) {
            const double th = pairs[i].theta, ph = pairs[i].phi, dist = std::abs(th - ph);
            return upsilon_bnorm(us, th, ph, c.W, opt) * std::pow(dist, c.s) * measure(Ball{th, dist}, c.p);
        },
        c.threads);
    return ps;
}

Pass pass_longtime(const SuiteConfig& c, int level) {
    c.d.require_area();
    const double W = 2.0 * (c.d.M + c.d.N);
    const auto pairs = stratum_grid(grid_points(c, level));
    // slowest surviving mode over both families
    double smin = std::numeric_limits<double>::infinity();
    for (Flavor f : {Flavor::Delta, Flavor::D}) {
        const DerivativeSpec df = with_flavor(c.d, f);
        for (int n = 0; n < 4; ++n) {
            if (n == 0 && (df.theta_order() > 0 || mode_multiplier(0, df, c.p) == 0.0)) continue;
            const double s = sqrt_eigenvalue(n, c.p);
            if (s > 0.0) smin = std::min(smin, s);
        }
    }
    const double T_end = std::min(5000.0, kPi + 45.0 / smin);
    ConeGrid g;
    g.panels_per_decade = scaled(8, level);
    g.t_nodes = 6;
    const Rule tr = g.t_levels(kPi, T_end);
    std::vector<double> sup_t = eval_samples(
        tr.size(),
        [&](std::size_t j) {
            double m = 0.0;
            for (const auto& pr : pairs) m = std::max(m, both_families(c.d, tr.x[j], pr.theta, pr.phi, c.p, 1.0));
            return m;
        },
        c.threads);
    double acc = 0.0;
    for (std::size_t j = 0; j < tr.size(); ++j) {
        if (!std::isfinite(sup_t[j])) throw ConvergenceError("longtime: kernel evaluation failed");
        acc += tr.w[j] * std::pow(tr.x[j], W - 1.0) * sup_t[j] * sup_t[j];
    }
    // the sup decays at least like exp(-smin t) beyond T_end
    const double last = sup_t.back();
    const double damp = 1.0 - (W - 1.0) / (2.0 * smin * T_end);
    acc += last * last * std::pow(T_end, W - 1.0) / (2.0 * smin * std::max(damp, 0.5));
    Pass ps;
    ps.values = {std::sqrt(acc)};
    ps.extra["tEnd"] = T_end;
    return ps;
}

Pass pass_omega(const SuiteConfig& c, int level) {
    constexpr int n = 100;
    Pass ps;
    ps.values.resize(n);
    for (int i = 0; i < n; ++i) {
        Rng rng(c.seed, tag_of("omega"), static_cast<std::uint64_t>(i));
        const double th = rng.uniform() < 0.3 ? rng.log_uniform(1e-4, 0.5) : rng.uniform(1e-3, kPi - 1e-3);
        const double t = rng.log_uniform(1e-4, 2.0 * kPi);
        const double mass = omega_mass(th, t, c.p, level ? 48 : 24);
        ps.values[static_cast<std::size_t>(i)] = mass;
        if (level == 1) {
            // refined route: the cone engine's own eta plan at doubled resolution
            ConeGrid g = c.cone.refined();
            g.eta_per_level = std::max(g.eta_per_level, 40);
            const EtaPlan plan = eta_plan(th, t, c.p, g, ball_volume(t, th, c.p));
            double s = 0.0;
            for (double w : plan.w) s += w;
            ps.extra["coneEngineMaxDeviation"] = std::max(ps.extra["coneEngineMaxDeviation"], std::abs(s - 1.0));
        }
    }
    return ps;
}

std::vector<std::array<double, 3>> omega_pair_points(const SuiteConfig& c, int count, const std::string& tag) {
    std::vector<std::array<double, 3>> pts;
    for (const auto& u : qmc_points(c.seed, tag, 5, static_cast<std::size_t>(count))) {
        double th;
        if (u[0] < 0.25)
            th = log_lerp(1e-4, 0.3, 4.0 * u[0]);
        else if (u[0] < 0.5)
            th = kPi - log_lerp(1e-4, 0.3, 4.0 * u[0] - 1.0);
        else
            th = lerp(0.01, kPi - 0.01, 2.0 * u[0] - 1.0);
        // shifts up to the full interval; flip to the side with room when needed
        const double x = log_lerp(1e-4, kPi, u[1]);
        double dir = u[2] < 0.5 ? 1.0 : -1.0;
        if (!inside(th + dir * x)) dir = -dir;
        double th2 = th + dir * x;
        if (!inside(th2)) {
            dir = th < 0.5 * kPi ? 1.0 : -1.0;
            const double room = dir > 0.0 ? kPi - th : th;
            th2 = th + dir * room * (x / kPi);
        }
        const double t = u[3] < 0.85 ? log_lerp(1e-4, kPi, u[4]) : lerp(kPi, 2.0 * kPi, u[4]);
        pts.push_back({th, th2, t});
    }
    return pts;
}

double omega_rhs(double th, double th2, double t, double gamma) {
    const double d = std::abs(th - th2);
    return t <= kPi ? std::pow(d / t, 2.0 * gamma) : std::pow(d, 2.0 * gamma);
}

Pass pass_omegadiff(const SuiteConfig& c, int level, double gamma) {
    const auto pts = omega_pair_points(c, scaled(c.lemma_samples, level), "omegadiff");
    const int nodes = scaled(12, level);
    Pass ps;
    ps.values = eval_samples(
        pts.size(),
        [&](std::size_t i) {
            const auto& [th, th2, t] = pts[i];
            return omega_diff_integral(th, th2, t, c.p, nodes) / omega_rhs(th, th2, t, gamma);
        },
        c.threads);
    return ps;
}

Pass pass_omegaprime(const SuiteConfig& c, int level, double gamma) {
    const auto pts = omega_pair_points(c, scaled(c.lemma_samples, level), "omegaprime");
    Pass ps;
    ps.values.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& [th, th2, t] = pts[i];
        ps.values[i] = omega_prime_integral(th, th2, t, c.p) / omega_rhs(th, th2, t, gamma);
    }
    return ps;
}

Pass pass_estxyxi(const SuiteConfig&, int level, double gamma) {
    const int n = scaled(200, level);  // the 200-grid nodes are a subset of the 400-grid
    Pass ps;
    for (double xi : {1.0, 2.0, 1.0 / (2.0 * gamma)}) {
        double sup = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j < i; ++j) {
                const double x = 4.0 * i / n, y = 4.0 * j / n;
                sup = std::max(sup, std::pow(x - y, xi) / (std::pow(x, xi) - std::pow(y, xi)));
            }
        ps.values.push_back(sup);
    }
    ps.extra["xi"] = 1.0 / (2.0 * gamma);
    return ps;
}

// log-spaced points in [1e-4, pi - 1e-4] clustered at both ends, nested across levels
std::vector<double> two_sided_grid(int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
        const double x = log_lerp(1e-4, 0.5 * kPi, static_cast<double>(i) / (n - 1));
        v.push_back(x);
        if (i + 1 < n) v.push_back(kPi - x);
    }
    std::sort(v.begin(), v.end());
    return v;
}

// radii clustered at 0 and just below pi, plus pi itself where the surrogate switches to 1
std::vector<double> radius_grid(int n) {
    auto v = two_sided_grid(n);
    v.push_back(kPi);
    return v;
}

Pass pass_compsin(const SuiteConfig&, int level) {
    Pass ps;
    for (double x : two_sided_grid(nested(200, level))) {
        ps.values.push_back(std::sin(0.5 * x) / x);
        ps.values.push_back(std::cos(0.5 * x) / (kPi - x));
    }
    return ps;
}

Pass pass_ball(const SuiteConfig& c, int level) {
    const auto rs = radius_grid(nested(20, level));
    Pass ps;
    for (double x : two_sided_grid(nested(20, level)))
        for (double r : rs) ps.values.push_back(ball_volume(r, x, c.p) / ball_volume_surrogate(r, x, c.p));
    return ps;
}

Pass pass_qcomp(const SuiteConfig&, int level) {
    const int n = nested(12, level);
    const auto g = two_sided_grid(nested(6, level));
    std::vector<double> u;
    for (int i = 0; i < n; ++i) {
        const double e = std::pow(10.0, -8.0 * i / (n - 1));
        u.push_back(1.0 - e);
        u.push_back(-1.0 + e);
    }
    u.push_back(1.0);
    Pass ps;
    for (double a : g)
        for (double b : g)
            for (double uu : u)
                for (double vv : u) {
                    const double qc = q_comparable(a, b, uu, vv);
                    if (qc <= 0.0) continue;
                    ps.values.push_back(q_fn(a, b, uu, vv) / qc);
                }
    return ps;
}

Pass pass_doubling(const SuiteConfig& c, int level) {
    const auto ts = radius_grid(nested(20, level));
    Pass ps;
    for (double x : two_sided_grid(nested(20, level)))
        for (double t : ts) ps.values.push_back(ball_volume(2.0 * t, x, c.p) / ball_volume(t, x, c.p));
    return ps;
}

Pass pass_l2(const SuiteConfig& c, int level) {
    c.d.require_area();
    const ConeGrid cg = level ? c.cone.refined() : c.cone;
    Pass ps;
    ps.values = l2_ratios(c.d, c.p, c.l2_modes, c.l2_trials, c.seed, cg, scaled(c.l2_theta_nodes, level));
    auto sorted = ps.values;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[(sorted.size() - 1) / 2] + sorted[sorted.size() / 2]);
    ps.extra["median"] = median;
    ps.extra["maxOverMedian"] = median > 0.0 ? sorted.back() / median : 0.0;
    for (double v : ps.values)
        if (!(v >= 0.0)) ps.violated = true;
    return ps;
}

const std::map<std::string, SuiteDef>& registry() {
    static const std::map<std::string, SuiteDef> r{
        {"growth", {Kind::Sup, true, false, false, [](auto& c, int l, double g) { return pass_growth(c, l, g); }}},
        {"sm1", {Kind::Sup, true, true, false, [](auto& c, int l, double g) { return pass_sm(c, l, g, true); }}},
        {"sm2", {Kind::Sup, true, false, false, [](auto& c, int l, double) { return pass_sm(c, l, 1.0, false); }}},
        {"l2", {Kind::Sup, true, false, false, [](auto& c, int l, double) { return pass_l2(c, l); }}},
        {"Ht1", {Kind::Sup, true, false, true, [](auto& c, int l, double) { return pass_ht1(c, l, false); }}},
        {"Ht1eta", {Kind::Sup, true, false, true, [](auto& c, int l, double) { return pass_ht1(c, l, true); }}},
        {"qeta", {Kind::Ratio, true, false, false, [](auto& c, int l, double) { return pass_qeta(c, l); }}},
        {"finbridge", {Kind::Sup, true, false, false, [](auto& c, int l, double) { return pass_finbridge(c, l); }}},
        {"longtime", {Kind::Sup, true, false, true, [](auto& c, int l, double) { return pass_longtime(c, l); }}},
        {"omega", {Kind::Identity, true, false, false, [](auto& c, int l, double) { return pass_omega(c, l); }}},
        {"omegadiff",
         {Kind::Sup, true, true, false, [](auto& c, int l, double g) { return pass_omegadiff(c, l, g); }}},
        {"omegaprime",
         {Kind::Sup, false, true, false, [](auto& c, int l, double g) { return pass_omegaprime(c, l, g); }}},
        {"upstilde", {Kind::Ratio, true, false, false, [](auto& c, int l, double) { return pass_upstilde(c, l); }}},
        {"estxyxi", {Kind::Sup, true, true, false, [](auto& c, int l, double g) { return pass_estxyxi(c, l, g); }}},
        {"compsin", {Kind::Ratio, true, false, false, [](auto& c, int l, double) { return pass_compsin(c, l); }}},
        {"ball", {Kind::Ratio, true, false, false, [](auto& c, int l, double) { return pass_ball(c, l); }}},
        {"qcomp", {Kind::Ratio, true, false, false, [](auto& c, int l, double) { return pass_qcomp(c, l); }}},
        {"doubling", {Kind::Sup, true, false, false, [](auto& c, int l, double) { return pass_doubling(c, l); }}},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> v{"growth",   "sm1",   "sm2",       "l2",         "Ht1",      "Ht1eta",
                                            "qeta",     "finbridge", "longtime", "omega", "omegadiff", "omegaprime",
                                            "upstilde", "estxyxi", "compsin", "ball", "qcomp", "doubling"};
    return v;
}

bool is_suite(const std::string& name) { return registry().count(name) > 0; }

VerificationReport run_suite(const std::string& name, const SuiteConfig& cfg) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw ConfigError("unknown suite '" + name + "'");
    cfg.validate();
    const SuiteDef& def = it->second;
    const auto start = std::chrono::steady_clock::now();
    double gamma = kNaN;
    if (def.uses_gamma) gamma = gamma_for(cfg, def.strict_gamma);
    if (name == "sm2") gamma = 1.0;
    const Pass base = def.pass(cfg, 0, gamma);
    const Pass fine = def.pass(cfg, 1, gamma);
    std::string flavor = def.both_flavors ? "both" : flavor_name(cfg.d.flavor);
    VerificationReport r = assemble(name, cfg, def.kind, base, fine, gamma, flavor);
    if (def.uses_gamma && GammaChoice::make(gamma, cfg.p, def.strict_gamma, true).exploratory) r.exploratory = true;
    if (name == "omegaprime" || name == "omegadiff") {
        const std::string range = name == "omegaprime" ? "gamma <= min(alpha,beta)+1" : "gamma < min(alpha,beta)+1";
        r.notes = r.notes.empty() ? range : r.notes + "; " + range;
    }
    r.runtimeMs = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<VerificationReport> run_all(const SuiteConfig& cfg) {
    std::vector<VerificationReport> out;
    for (const auto& [M, N] : standard_mn_pairs()) {
        SuiteConfig c = cfg;
        c.d.M = M;
        c.d.N = N;
        for (const char* s : {"Ht1", "Ht1eta", "longtime"}) out.push_back(run_suite(s, c));
        for (Flavor f : {Flavor::Delta, Flavor::D}) {
            c.d.flavor = f;
            for (const char* s : {"growth", "sm1", "sm2", "l2"}) out.push_back(run_suite(s, c));
        }
    }
    for (const char* s :
         {"qeta", "upstilde", "finbridge", "omega", "omegadiff", "omegaprime", "estxyxi", "compsin", "ball", "qcomp",
          "doubling"})
        out.push_back(run_suite(s, cfg));
    return out;
}

}  // namespace jlusin
