#pragma once

#include <vector>

#include "jlusin/jacobi.hpp"

namespace jlusin {

// Probability measure dPi_a on [-1, 1]; oneMinus[i] = 1 - nodes[i] kept separately to avoid cancellation.
struct PiMeasureRule {
    double a = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> oneMinus;
};

PiMeasureRule pi_rule(double a, int npts);
// Same measure, with panels graded geometrically towards u = 1 down to 1 - u ~ h.
PiMeasureRule pi_rule_graded(double a, double h, int npts);

double q_fn(double theta, double phi, double u, double v);
// (theta - phi)^2 + (1 - u) theta phi + (1 - v)(pi - theta)(pi - phi)
double q_comparable(double theta, double phi, double u, double v);

struct UpsilonSpec {
    double W = 2.0;
    double s = 0.0;
    JacobiParams p;

    Regime regime() const { return p.regime(); }
    // alpha + beta + 3/2 + W/4 + s/2
    double exponent() const { return p.alpha + p.beta + 1.5 + 0.25 * W + 0.5 * s; }
};

inline constexpr int kDefaultPiPoints = 60;

double upsilon(const UpsilonSpec& spec, double t, double theta, double phi, int npts = kDefaultPiPoints);

struct UpsilonNormOptions {
    int panels = 400;
    int nodes_per_panel = 3;
    int npts = kDefaultPiPoints;
};

// (int_0^pi Upsilon(t)^2 t^(Wnorm - 1) dt)^(1/2)
double upsilon_bnorm(const UpsilonSpec& spec, double theta, double phi, double Wnorm,
                     const UpsilonNormOptions& opt = {});

}  // namespace jlusin
