#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "jlusin/area.hpp"
#include "jlusin/jacobi.hpp"
#include "jlusin/poisson.hpp"

namespace jlusin {

inline constexpr const char* kVersion = "1.0.0";

enum class Verdict { Stable, Unstable, Violated };
const char* verdict_name(Verdict v);
Verdict parse_verdict(const std::string& s);

struct VerificationReport {
    std::string suite;
    double alpha = 0.0;
    double beta = 0.0;
    int M = 0;
    int N = 0;
    std::string flavor = "delta";
    double gamma = std::numeric_limits<double>::quiet_NaN();  // NaN when the suite has no exponent
    double measuredC = 0.0;
    double refinementDelta = 0.0;
    int samples = 0;
    Verdict verdict = Verdict::Stable;
    std::uint64_t seed = 0;
    double runtimeMs = 0.0;
    std::string version = kVersion;
    bool exploratory = false;
    std::map<std::string, double> stats;  // suite-specific extras (inf of ratios, skipped samples, ...)
    std::string notes;

    // NaN fields compare equal to NaN
    bool operator==(const VerificationReport& o) const;
};

// Exponent for the smoothness estimates. strict: gamma < alpha ^ beta + 1; otherwise <=.
struct GammaChoice {
    double gamma = 0.5;
    bool exploratory = false;

    static GammaChoice make(double gamma, const JacobiParams& p, bool strict, bool exploratory);
    static double default_for(const JacobiParams& p) { return 0.9 * std::min(0.5, std::min(p.alpha, p.beta) + 1.0); }
};

// Coarser cone grid used by the verification suites; the refined pass doubles it.
ConeGrid verifier_grid();

struct SuiteConfig {
    JacobiParams p{0.5, 0.5};
    DerivativeSpec d{1, 0, Flavor::Delta, 0, 0};
    double gamma = std::numeric_limits<double>::quiet_NaN();  // NaN: suite default
    bool exploratory = false;
    std::uint64_t seed = 7;
    int grid_points = 3;       // per dimension and stratum for kernel-norm suites; refined: 2(n-1)+1
    int ratio_samples = 2000;  // comparability suites
    int bound_samples = 400;   // pointwise kernel bound suites
    int lemma_samples = 4000;  // closed-form measure lemmas
    double W = 2.0;
    double s = 0.0;
    int pi_points = 32;
    int l2_modes = 16;
    int l2_trials = 50;
    int l2_theta_nodes = 32;
    ConeGrid cone = verifier_grid();
    int threads = 0;  // 0: JACOBI_LUSIN_THREADS or hardware

    void validate() const;
};

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

VerificationReport run_suite(const std::string& name, const SuiteConfig& cfg);
// Every lemma suite plus growth / sm1 / sm2 / l2 for both flavors and the standard (M, N) list.
std::vector<VerificationReport> run_all(const SuiteConfig& cfg);
const std::vector<std::pair<int, int>>& standard_mn_pairs();

// Sample sets, exposed for tests.
struct AnglePair {
    double theta;
    double phi;
    std::uint64_t id;  // stratum and index within it; keys the per-sample random stream
};
std::vector<AnglePair> stratified_pairs(std::uint64_t seed, int per_stratum);
// Deterministic n x n grid in each stratum; the grid for 2(n-1)+1 contains the grid for n.
std::vector<AnglePair> stratum_grid(int n);

// Direct evaluators used by the suites.
// int_{|eta|<t} chi Omega d eta by graded quadrature, with V_t from the incomplete Beta function.
double omega_mass(double theta, double t, const JacobiParams& p, int nodes = 24);
double omega_diff_integral(double theta, double theta2, double t, const JacobiParams& p, int nodes = 16);
double omega_prime_integral(double theta, double theta2, double t, const JacobiParams& p);
double growth_constant(const DerivativeSpec& d, double theta, double phi, const JacobiParams& p, const ConeGrid& cg);
double sm1_norm(const DerivativeSpec& d, double theta, double theta2, double phi, const JacobiParams& p,
                const ConeGrid& cg);
double sm2_norm(const DerivativeSpec& d, double theta, double phi, double phi2, const JacobiParams& p,
                const ConeGrid& cg);
// ||S f|| / ||f|| for each trial vector, by the quadratic form.
std::vector<double> l2_ratios(const DerivativeSpec& d, const JacobiParams& p, int modes, int trials,
                              std::uint64_t seed, const ConeGrid& cg, int theta_nodes);

}  // namespace jlusin
