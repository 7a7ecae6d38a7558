#pragma once

#include <functional>
#include <vector>

#include "tsdelay/time_scale.hpp"

namespace tsdelay {

enum class RegressivityClass {
    Regressive,            // 1 + mu f never vanishes, mixed signs
    PositivelyRegressive,  // 1 + mu f > 0 everywhere
    NegativelyRegressive,  // 1 + mu f < 0 everywhere
    NotRegressive,         // 1 + mu f numerically zero somewhere
};

const char* regressivity_class_name(RegressivityClass c);

/// Hilger derivative of a sampled function at t. Exact forward quotient
/// (f(sigma(t)) - f(t)) / mu(t) at right-scattered points; at right-dense points a
/// centered difference, falling back to one-sided second-order stencils at segment
/// edges (first-order when the segment is too short for three points).
/// KappaViolation when t is the left-scattered maximum of the domain.
Vec delta_derivative(const GridFunction& f, double t);
double delta_derivative_scalar(const GridFunction& f, double t);

/// Cauchy integral of f over [s,t]: graininess-weighted left values across
/// scattered gaps, trapezoid across dense gaps. Requires s <= t within the domain.
Vec delta_integral(const GridFunction& f, double s, double t);
double delta_integral_scalar(const GridFunction& f, double s, double t);

/// Running integral from pts.front(): out[j] = integral over [pts[0], pts[j]].
/// pts must be a contiguous grid slice of ts; values one sample per point.
std::vector<Vec> cumulative_delta_integral(const TimeScale& ts, const std::vector<double>& pts,
                                           const std::vector<Vec>& values);

/// Generalized monomial h_k(t,s), built by k-fold cumulative integration of 1.
/// h_0 = 1; h_k(t,s) = integral of h_{k-1}(.,s) from s to t. Requires t >= s.
double hk_polynomial(const TimeScale& ts, int k, double t, double s);

/// Cylinder transform: z for h = 0, log(1 + h z)/h for h > 0 (real branch only;
/// Branch error when 1 + h z <= 0).
double cylinder(double h, double z);

/// Generalized exponential e_f(t,s) = exp of the delta integral of
/// eta -> cylinder(mu(eta), f(eta)) over [s,t]. Requires f positively regressive
/// on the scattered points of [s,t); returns exactly 1.0 when t == s.
double exp_function(const TimeScale& ts, const std::function<double(double)>& f, double t,
                    double s);
double exp_function(const GridFunction& f, double t, double s);

/// Sign classification of 1 + mu(u) f(u) over the grid of the kappa-truncated [a,b].
/// |1 + mu f| < 1e-12 anywhere means NotRegressive.
RegressivityClass regressivity_class(const TimeScale& ts, const std::function<double(double)>& f,
                                     double a, double b);
RegressivityClass regressivity_class(const GridFunction& f, double a, double b);

} // namespace tsdelay
