#pragma once

#include <functional>

#include "jlusin/jacobi.hpp"
#include "jlusin/quadrature.hpp"

namespace jlusin {

struct Ball {
    double center;
    double radius;
};

double density(double theta, const JacobiParams& p);
double total_mass(const JacobiParams& p);
double measure_interval(double a, double b, const JacobiParams& p);
double measure(const Ball& ball, const JacobiParams& p);
double ball_volume(double t, double theta, const JacobiParams& p);
double ball_volume_surrogate(double r, double theta, const JacobiParams& p);
// Cone weight; zero when theta + eta leaves (0, pi).
double omega(double theta, double eta, double t, const JacobiParams& p);

// Theta-space rule on [a, b] whose weights already include the density; Jacobi-type
// panels absorb the endpoint behaviour whenever a = 0 or b = pi.
Rule density_rule(double a, double b, const JacobiParams& p, int n);
// Rule from x = cos(theta) and Gauss-Jacobi(alpha, beta); exact for polynomials in cos(theta).
Rule polynomial_density_rule(int n, const JacobiParams& p);

// Integral of f against dmu over [a, b], doubling the rule until two successive values agree.
double integrate_density(const std::function<double(double)>& f, double a, double b, const JacobiParams& p,
                         double tol = 1e-12);

}  // namespace jlusin
