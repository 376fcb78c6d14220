// One line per acceptance criterion; exit status is nonzero when a criterion outside kKnownFailures fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jlusin/area.hpp"
#include "jlusin/measure.hpp"
#include "jlusin/poisson.hpp"
#include "jlusin/report.hpp"
#include "jlusin/verify.hpp"
#include "oracles.hpp"

using namespace jlusin;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

const std::set<int> kKnownFailures{3, 5, 6};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome orthonormality() {
    const std::vector<JacobiParams> ps{{-0.9, -0.9}, {-0.9, 0.5}, {0.5, -0.9}, {0.5, 0.5}, {-0.5, -0.5}};
    double worst = 0;
    for (const auto& p : ps)
        for (int m = 0; m <= 30; ++m)
            for (int n = m; n <= 30; ++n) {
                const double ip = oracle::integrate_mu(
                    [&](double th) { return normalized_poly(m, p, th) * normalized_poly(n, p, th); }, p.alpha,
                    p.beta);
                worst = std::max(worst, std::abs(ip - (m == n ? 1.0 : 0.0)));
            }
    return {worst < 1e-8, "max |<P_m,P_n> - delta_mn| = " + fmt("%.2e", worst)};
}

Outcome chebyshev() {
    const JacobiParams p{-0.5, -0.5};
    auto P = [](double r, double x) { return (1 - r * r) / (1 - 2 * r * std::cos(x) + r * r); };
    double worst = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (double t : {0.01, 0.1, 0.5, 1.5, 3.0}) {
                const double th = (i + 0.5) * oracle::pi / 10, ph = (j + 0.25) * oracle::pi / 10;
                const double r = std::exp(-t);
                const double ref = (P(r, th - ph) + P(r, th + ph)) / (2 * oracle::pi);
                worst = std::max(worst, std::abs(poisson_kernel(t, th, ph, p).value - ref) / std::abs(ref));
            }
    return {worst < 1e-10, "max relative error " + fmt("%.2e", worst)};
}

Outcome flavor_identity() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ang(0.05, oracle::pi - 0.05), tt(0.05, 3.0), par(-0.95, 1.5);
    double worst = 0;
    for (int N = 0; N <= 4; ++N)
        for (int M = 0; M <= 2; ++M) {
            const DerivativeSpec d{M, N, Flavor::D, 0, 0};
            const auto tr = SpectralTruncation::for_spec(d);
            for (int k = 0; k < 20; ++k) {
                const JacobiParams p{par(rng), par(rng)};
                const double t = tt(rng), th = ang(rng), ph = ang(rng);
                const double a = kernel_derivative(d, t, th, ph, p, tr).value;
                const double b = iden1_expansion(d, t, th, ph, p, tr).value;
                const double scale = std::max(std::abs(a), std::abs(b));
                if (scale > 0) worst = std::max(worst, std::abs(a - b) / scale);
            }
        }
    return {worst < 1e-8, "max relative difference " + fmt("%.2e", worst)};
}

Outcome omega_identity() {
    std::mt19937_64 rng(36);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const JacobiParams p{-0.99 + 2.5 * u(rng), -0.99 + 2.5 * u(rng)};
        const double th = u(rng) < 0.3 ? std::exp(std::log(1e-4) + u(rng) * std::log(1e4)) : oracle::pi * u(rng);
        const double t = std::exp(std::log(1e-4) + u(rng) * (std::log(2 * oracle::pi) - std::log(1e-4)));
        if (!(th > 0 && th < oracle::pi)) continue;
        worst = std::max(worst, std::abs(omega_mass(th, t, p) - 1.0));
    }
    return {worst < 1e-9, "max |int Omega - 1| = " + fmt("%.2e", worst)};
}

Outcome fubini() {
    const std::vector<JacobiParams> ps{{0.5, 0.5}, {-0.9, 0.5}};
    const std::vector<std::vector<double>> fs{{0.0, 1.0, 0.0, 1.0}, {0.4, -0.3, 0.8, 0.5}};
    double worst = 0;
    std::string where;
    for (const auto& p : ps)
        for (auto [M, N] : {std::pair{1, 0}, {0, 1}, {1, 1}})
            for (Flavor fl : {Flavor::Delta, Flavor::D})
                for (const auto& f : fs) {
                    const DerivativeSpec d{M, N, fl, 0, 0};
                    const double s = area_l2_norm(f, d, p), g = g_function_l2_norm(f, d, p);
                    const double rel = std::abs(s - g) / g;
                    if (rel > worst) {
                        worst = rel;
                        std::ostringstream os;
                        os << "(a,b)=(" << p.alpha << "," << p.beta << ") M=" << M << " N=" << N << " "
                           << flavor_name(fl) << ": ||Sf||=" << s << " ||gf||=" << g;
                        where = os.str();
                    }
                }
    return {worst < 1e-3, "max relative gap " + fmt("%.3e", worst) + " at " + where};
}

Outcome standard_estimates() {
    const std::vector<JacobiParams> ps{{0.5, 0.5}, {-0.9, 0.5}, {-0.9, -0.9}};
    int total = 0, stable = 0;
    double worst_delta = 0;
    std::string bad;
    for (const auto& p : ps)
        for (auto [M, N] : {std::pair{1, 0}, {0, 1}, {1, 1}})
            for (Flavor fl : {Flavor::Delta, Flavor::D})
                for (const char* s : {"growth", "sm1", "sm2"}) {
                    SuiteConfig c;
                    c.p = p;
                    c.d = {M, N, fl, 0, 0};
                    c.gamma = 0.9 * std::min(0.5, std::min(p.alpha, p.beta) + 1.0);
                    const auto r = run_suite(s, c);
                    ++total;
                    worst_delta = std::max(worst_delta, r.refinementDelta);
                    if (r.verdict == Verdict::Stable)
                        ++stable;
                    else
                        bad += " " + std::string(s) + "(" + flavor_name(fl) + "," + std::to_string(M) +
                               std::to_string(N) + ")";
                }
    return {stable == total,
            std::to_string(stable) + "/" + std::to_string(total) + " stable, max delta " + fmt("%.3g", worst_delta) + bad};
}

Outcome comparability() {
    const std::vector<JacobiParams> ps{{0.5, 0.5}, {-0.9, 0.5}, {-0.9, -0.9}};
    bool ok = true;
    std::ostringstream os;
    for (const auto& p : ps)
        for (const char* s : {"qeta", "upstilde"}) {
            SuiteConfig c;
            c.p = p;
            c.ratio_samples = 2000;
            const auto r = run_suite(s, c);
            const double inf = r.stats.at("measuredInf");
            const bool good = r.verdict == Verdict::Stable && inf > 0 && std::isfinite(r.measuredC);
            ok = ok && good;
            os << s << "(" << p.alpha << "," << p.beta << ") [" << inf << ", " << r.measuredC << "] d=" << r.refinementDelta
               << (good ? "" : " FAIL") << "; ";
        }
    return {ok, os.str()};
}

Outcome l2_boundedness() {
    bool ok = true;
    double worst_ratio = 0, worst_delta = 0;
    for (const auto& [M, N] : standard_mn_pairs())
        for (Flavor fl : {Flavor::Delta, Flavor::D}) {
            SuiteConfig c;
            c.d = {M, N, fl, 0, 0};
            const auto r = run_suite("l2", c);
            const double mom = r.stats.at("maxOverMedian");
            worst_ratio = std::max(worst_ratio, mom);
            worst_delta = std::max(worst_delta, r.refinementDelta);
            ok = ok && r.verdict == Verdict::Stable && mom <= 3.0;
        }
    return {ok, "max ratio/median " + fmt("%.3f", worst_ratio) + ", max delta " + fmt("%.2e", worst_delta)};
}

std::vector<std::string> verify_all_lines(const std::string& out) {
    std::filesystem::remove(out);
    const std::string cmd = std::string(JLUSIN_CLI) + " verify all --seed 7 --out " + out;
    const int st = std::system(cmd.c_str());
    if (!WIFEXITED(st) || WEXITSTATUS(st) != 0)
        throw std::runtime_error("verify all exited with status " + std::to_string(WEXITSTATUS(st)));
    std::ifstream is(out);
    std::vector<std::string> lines;
    const std::regex timing("\"runtimeMs\":[^,}]*");
    for (std::string line; std::getline(is, line);) lines.push_back(std::regex_replace(line, timing, "\"runtimeMs\":0"));
    return lines;
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "jlusin_acceptance";
    std::filesystem::create_directories(dir);
    const auto a = verify_all_lines((dir / "run1.jsonl").string());
    const auto b = verify_all_lines((dir / "run2.jsonl").string());
    std::size_t diff = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) diff += a[i] != b[i];
    const bool ok = !a.empty() && a.size() == b.size() && diff == 0;
    return {ok, std::to_string(a.size()) + " reports per run, " + std::to_string(diff) + " differing lines"};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    const std::vector<Criterion> all{
        {1, "orthonormality", 30, orthonormality},
        {2, "Chebyshev oracle", 10, chebyshev},
        {3, "flavor identity", 60, flavor_identity},
        {4, "cone weight identity", 10, omega_identity},
        {5, "Fubini identity", 300, fubini},
        {6, "standard estimates", 900, standard_estimates},
        {7, "comparability lemmas", 120, comparability},
        {8, "discrete L2 boundedness", 300, l2_boundedness},
        {9, "determinism", 0, determinism},
    };

    int unexpected = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_s <= 0 || secs < c.budget_s;
        const bool pass = o.pass && in_time;
        std::string tag = pass ? "PASS" : "FAIL";
        if (!pass && kKnownFailures.count(c.id)) tag += " (known)";
        if (!pass && !kKnownFailures.count(c.id)) ++unexpected;
        std::printf("criterion %d %-24s %-12s %s; %.1f s%s\n", c.id, c.name, tag.c_str(), o.detail.c_str(), secs,
                    in_time ? "" : fmt(" exceeds %.0f s budget", c.budget_s).c_str());
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
