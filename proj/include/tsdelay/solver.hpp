#pragma once

#include "tsdelay/problems.hpp"

namespace tsdelay {

struct PicardOptions {
    double tol = 1e-10;
    int max_iter = 200;
    bool log_iterates = false;
    // Optional offset added to the constant initial iterate on (beta, zeta]; used
    // to probe uniqueness of the fixed point. Must keep x_0 inside the epsilon ball.
    std::function<Vec(double)> start_perturbation;
};

/// Existence window for one Picard solve: delta = min(gamma - beta, epsilon / M)
/// and zeta = max of [beta, beta + delta] on the scale. M is taken from the
/// problem or estimated by corner sampling; MissingBound if neither works.
struct ExistenceWindow {
    double delta = 0.0;
    double zeta = 0.0;
    double bound_M = 0.0; // the M that produced delta
};
ExistenceWindow existence_window(const DelayIVP& ivp);

/// One Picard solve on [beta, zeta], extended one step to sigma(zeta) when zeta is
/// right-scattered. The returned solution covers [alpha, end] with the prehistory
/// verbatim. Residual contract: the fixed point satisfies the integral equation on
/// [beta, end] with sup residual <= 10 * tol.
Solution picard_solve(const DelayIVP& ivp, const PicardOptions& opt = {});

/// A priori bound on the k-th Picard correction: M * L^(k-1) * h_k(t, beta).
double iterate_error_bound(double M, double L, int k, const TimeScale& ts, double t, double beta);

/// (M1, M2) with M1 >= sup_t sum_i ||p_i(t)|| and M2 >= sup_t ||q(t)|| over the
/// grid of [beta, gamma]; matrix norms are maximum absolute row sums.
std::pair<double, double> estimate_bounds(const LinearDelaySystem& sys);

/// Cell boundaries beta = b_0 < ... < b_K = gamma: a right-scattered point with
/// mu > 1/(2 M1) becomes a single jump cell, otherwise cells are cut at the
/// largest grid point within 1/(2 M1).
std::vector<double> make_partition(const LinearDelaySystem& sys, double M1);

/// Global solve of a linear delay system on [beta, gamma] by marching Picard
/// windows across the partition; each finished cell feeds the next as prehistory.
Solution solve_global(const LinearDelaySystem& sys, double tol = 1e-10, int max_iter = 200);

/// Global solve of a nonlinear problem whose rhs obeys the given sublinear growth
/// envelope. Every rhs evaluation is checked against the envelope; a violation
/// aborts the solve (the global-existence argument would be void).
Solution solve_global_nonlinear(const DelayIVP& ivp, const GrowthEnvelope& envelope,
                                double tol = 1e-10, int max_iter = 200);

/// Method-of-steps fallback for nonlinear problems on purely isolated [beta, gamma]:
/// the forward recursion x(sigma(t)) = x(t) + mu(t) f(t, ...) is the unique
/// solution there, so no envelope and no iteration are needed.
Solution solve_stepwise_isolated(const DelayIVP& ivp);

} // namespace tsdelay
