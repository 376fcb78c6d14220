#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jlusin/area.hpp"
#include "jlusin/error.hpp"
#include "jlusin/report.hpp"
#include "jlusin/upsilon.hpp"
#include "jlusin/verify.hpp"

using namespace jlusin;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Common {
    double alpha = 0.5, beta = 0.5;
    int M = 0, N = 0, L = 0, P = 0;
    std::string flavor = "delta";
    std::string out;
    int threads = 0;
};

struct Truncation {
    int n_max = 200000;
    double tail_eps = 1e-12;
    double t_floor = 1e-4;
};

struct Cone {
    double t_min = 1e-3;
    double T_max = 3.141592653589793;
    int panels_per_decade = 4, t_nodes = 6, eta = 20;
    std::string tail = "analytic";
};

void add_common(CLI::App* c, Common& o, bool with_mn) {
    c->add_option("--alpha", o.alpha, "Jacobi parameter alpha > -1");
    c->add_option("--beta", o.beta, "Jacobi parameter beta > -1");
    if (with_mn) {
        c->add_option("--M", o.M, "order of the t-derivative");
        c->add_option("--N", o.N, "order of the theta-derivative");
        c->add_option("--L", o.L, "extra phi-derivative order");
        c->add_option("--P", o.P, "extra order for the interlaced flavor");
        c->add_option("--flavor", o.flavor, "delta | D")->check(CLI::IsMember({"delta", "D"}));
    }
    c->add_option("--out", o.out, "output path (CSV grid or JSON-lines report); stdout when omitted");
    c->add_option("--threads", o.threads, "worker threads (0: JACOBI_LUSIN_THREADS or hardware)");
}

void add_truncation(CLI::App* c, Truncation& t) {
    c->add_option("--n-max", t.n_max, "hard cap on series terms");
    c->add_option("--tail-eps", t.tail_eps, "relative tail tolerance");
    c->add_option("--t-floor", t.t_floor, "smallest admissible t for kernel series");
}

void add_cone(CLI::App* c, Cone& g) {
    c->add_option("--t-min", g.t_min, "lower cut of the t-integral");
    c->add_option("--T-max", g.T_max, "upper end of the t-quadrature");
    c->add_option("--panels-per-decade", g.panels_per_decade, "log-t panels per decade");
    c->add_option("--t-nodes", g.t_nodes, "Gauss nodes per t panel");
    c->add_option("--eta-nodes", g.eta, "eta nodes per t level");
    c->add_option("--tail", g.tail, "large-t tail: analytic | truncate")->check(CLI::IsMember({"analytic", "truncate"}));
}

JacobiParams params(const Common& o) { return JacobiParams(o.alpha, o.beta); }

DerivativeSpec spec(const Common& o) {
    DerivativeSpec d{o.M, o.N, parse_flavor(o.flavor), o.L, o.P};
    d.validate();
    return d;
}

SpectralTruncation truncation(const Truncation& t) {
    SpectralTruncation tr;
    tr.n_max = t.n_max;
    tr.tail_eps = t.tail_eps;
    tr.t_floor = t.t_floor;
    tr.validate();
    return tr;
}

ConeGrid cone(const Cone& g) {
    ConeGrid cg;
    cg.t_min = g.t_min;
    cg.T_max = g.T_max;
    cg.panels_per_decade = g.panels_per_decade;
    cg.t_nodes = g.t_nodes;
    cg.eta_per_level = g.eta;
    cg.tail_mode = g.tail == "truncate" ? ConeGrid::TailMode::Truncate : ConeGrid::TailMode::AnalyticBound;
    cg.validate();
    return cg;
}

void emit_grid(const std::vector<GridRow>& rows, const std::string& out) {
    if (!out.empty()) {
        write_grid_csv(rows, out);
        return;
    }
    std::printf("theta,phi,t,value\n");
    for (const auto& r : rows) std::printf("%.17g,%.17g,%.17g,%.17g\n", r.theta, r.phi, r.t, r.value);
}

int emit_verify(const std::vector<VerificationReport>& rs, const std::string& out) {
    if (!out.empty())
        emit_reports(rs, out);
    else
        for (const auto& r : rs) std::printf("%s\n", report_to_line(r).c_str());
    return verify_exit_code(rs);
}

struct VerifyOpts {
    double gamma = kNaN;
    bool exploratory = false;
    std::uint64_t seed = 7;
    double W = 2.0, s = 0.0;
    int grid_points = 3, ratio_samples = 2000, bound_samples = 400, lemma_samples = 4000, pi_points = 32;
    int l2_modes = 16, l2_trials = 50;
};

void add_verify(CLI::App* c, VerifyOpts& v) {
    c->add_option("--gamma", v.gamma, "smoothness exponent (default: 0.9 min(1/2, min(alpha,beta)+1))");
    c->add_flag("--exploratory", v.exploratory, "allow gamma outside the admissible range");
    c->add_option("--seed", v.seed, "seed for randomized suites");
    c->add_option("--W", v.W, "weight exponent for Upsilon suites");
    c->add_option("--s", v.s, "shift exponent for Upsilon suites");
    c->add_option("--grid-points", v.grid_points, "kernel-norm grid points per dimension and stratum");
    c->add_option("--ratio-samples", v.ratio_samples, "samples for comparability suites");
    c->add_option("--bound-samples", v.bound_samples, "samples for pointwise kernel bounds");
    c->add_option("--lemma-samples", v.lemma_samples, "samples for the measure lemmas");
    c->add_option("--pi-points", v.pi_points, "nodes per dPi rule");
    c->add_option("--l2-modes", v.l2_modes, "modes of the random f in the L2 check");
    c->add_option("--l2-trials", v.l2_trials, "random f per L2 check");
}

SuiteConfig suite_config(const Common& o, const VerifyOpts& v) {
    SuiteConfig c;
    c.p = params(o);
    c.d = spec(o);
    c.gamma = v.gamma;
    c.exploratory = v.exploratory;
    c.seed = v.seed;
    c.W = v.W;
    c.s = v.s;
    c.grid_points = v.grid_points;
    c.ratio_samples = v.ratio_samples;
    c.bound_samples = v.bound_samples;
    c.lemma_samples = v.lemma_samples;
    c.pi_points = v.pi_points;
    c.l2_modes = v.l2_modes;
    c.l2_trials = v.l2_trials;
    c.threads = o.threads;
    c.validate();
    return c;
}

void check_suite(const std::string& s, bool allow_all) {
    if ((allow_all && s == "all") || is_suite(s)) return;
    std::string list;
    for (const auto& n : suite_names()) list += " " + n;
    throw ConfigError("unknown suite '" + s + "'; choose one of" + list + (allow_all ? " all" : ""));
}

int run(int argc, char** argv) {
    CLI::App app{"Jacobi-Poisson kernels, Lusin area integrals and kernel-estimate verification"};
    app.require_subcommand(1);
    app.fallthrough(false);

    Common kc, uc, ac, gc, vc, sc;
    Truncation kt;
    Cone acone;

    auto* kernel = app.add_subcommand("kernel", "evaluate H_t or one of its derivatives on a grid");
    add_common(kernel, kc, true);
    add_truncation(kernel, kt);
    std::vector<double> k_t{0.5}, k_theta{1.0}, k_phi{2.0};
    kernel->add_option("--t", k_t, "t values (comma separated)")->delimiter(',');
    kernel->add_option("--theta", k_theta, "theta values")->delimiter(',');
    kernel->add_option("--phi", k_phi, "phi values")->delimiter(',');

    auto* ups = app.add_subcommand("upsilon", "evaluate the majorant Upsilon_{W,s} on a grid");
    add_common(ups, uc, false);
    double u_W = 2.0, u_s = 0.0;
    int u_pts = kDefaultPiPoints;
    std::vector<double> u_t{0.5}, u_theta{1.0}, u_phi{2.0};
    ups->add_option("--W", u_W, "weight exponent");
    ups->add_option("--s", u_s, "shift exponent");
    ups->add_option("--pi-points", u_pts, "nodes per dPi rule");
    ups->add_option("--t", u_t, "t values in (0, pi]")->delimiter(',');
    ups->add_option("--theta", u_theta, "theta values")->delimiter(',');
    ups->add_option("--phi", u_phi, "phi values")->delimiter(',');

    std::vector<double> a_f{0.0, 1.0}, a_theta{1.0};
    auto* area = app.add_subcommand("area", "apply the area integral to f given by spectral coefficients");
    add_common(area, ac, true);
    add_cone(area, acone);
    area->add_option("--coeffs", a_f, "coefficients of f in the normalized basis")->delimiter(',');
    area->add_option("--theta", a_theta, "evaluation points")->delimiter(',');

    std::vector<double> g_f{0.0, 1.0}, g_theta{1.0};
    auto* gfun = app.add_subcommand("gfun", "vertical g-function of f");
    add_common(gfun, gc, true);
    gfun->add_option("--coeffs", g_f, "coefficients of f in the normalized basis")->delimiter(',');
    gfun->add_option("--theta", g_theta, "evaluation points")->delimiter(',');

    VerifyOpts vo, so;
    std::string v_suite, s_suite;
    auto* verify = app.add_subcommand("verify", "run one verification suite, or all of them");
    add_common(verify, vc, true);
    add_verify(verify, vo);
    vc.M = 1;
    verify->add_option("suite", v_suite, "suite name or 'all'")->required();

    std::vector<double> s_alpha{0.5}, s_beta{0.5};
    std::vector<int> s_M{1}, s_N{0};
    auto* sweep = app.add_subcommand("sweep", "run one suite over a parameter sweep");
    add_common(sweep, sc, true);
    add_verify(sweep, so);
    sweep->add_option("suite", s_suite, "suite name")->required();
    sweep->add_option("--alphas", s_alpha, "alpha values")->delimiter(',');
    sweep->add_option("--betas", s_beta, "beta values")->delimiter(',');
    sweep->add_option("--Ms", s_M, "M values")->delimiter(',');
    sweep->add_option("--Ns", s_N, "N values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (kernel->parsed()) {
            const auto p = params(kc);
            const auto d = spec(kc);
            const auto tr = truncation(kt);
            const bool plain = d.M == 0 && d.N == 0 && d.L == 0 && d.P == 0;
            std::vector<GridRow> rows;
            for (double th : k_theta)
                for (double ph : k_phi)
                    for (double t : k_t) {
                        const KernelValue v =
                            plain ? poisson_kernel(t, th, ph, p, tr) : kernel_derivative(d, t, th, ph, p, tr);
                        rows.push_back({th, ph, t, v.value});
                    }
            emit_grid(rows, kc.out);
            return 0;
        }
        if (ups->parsed()) {
            const UpsilonSpec us{u_W, u_s, params(uc)};
            std::vector<GridRow> rows;
            for (double th : u_theta)
                for (double ph : u_phi)
                    for (double t : u_t) rows.push_back({th, ph, t, upsilon(us, t, th, ph, u_pts)});
            emit_grid(rows, uc.out);
            return 0;
        }
        if (area->parsed() || gfun->parsed()) {
            const bool is_area = area->parsed();
            const Common& o = is_area ? ac : gc;
            const auto p = params(o);
            const auto d = spec(o);
            d.require_area();
            const auto& f = is_area ? a_f : g_f;
            const ConeGrid cg = is_area ? cone(acone) : ConeGrid{};
            std::vector<GridRow> rows;
            for (double th : is_area ? a_theta : g_theta) {
                const double v = is_area ? area_integral(f, d, th, p, cg) : g_function(f, d, th, p);
                rows.push_back({th, kNaN, kNaN, v});
            }
            emit_grid(rows, o.out);
            return 0;
        }
        if (verify->parsed()) {
            check_suite(v_suite, true);
            const SuiteConfig c = suite_config(vc, vo);
            if (v_suite == "all") return emit_verify(run_all(c), vc.out);
            return emit_verify({run_suite(v_suite, c)}, vc.out);
        }
        if (sweep->parsed()) {
            check_suite(s_suite, false);
            std::vector<SuiteConfig> cfgs;
            for (double a : s_alpha)
                for (double b : s_beta)
                    for (int m : s_M)
                        for (int n : s_N) {
                            Common o = sc;
                            o.alpha = a;
                            o.beta = b;
                            o.M = m;
                            o.N = n;
                            cfgs.push_back(suite_config(o, so));
                        }
            std::vector<VerificationReport> rs;
            for (const auto& c : cfgs) rs.push_back(run_suite(s_suite, c));
            return emit_verify(rs, sc.out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
