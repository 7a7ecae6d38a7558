#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tsdelay/time_scale.hpp"

namespace tsdelay {

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<Vec(double)>;  // t -> R^d
using MatrixFn = std::function<Vec(double)>;  // t -> R^{d x d}, flat row-major
using DelayFn = std::function<double(double)>;
using RhsFn = std::function<Vec(double, const std::vector<Vec>&)>;

/// Initial value problem x^Delta(t) = f(t, x(tau_1(t)), ..., x(tau_n(t))) on
/// [beta, gamma], with prehistory phi on [alpha, beta] and delayed arguments
/// tau_i(t) <= t reaching no further back than alpha.
struct DelayIVP {
    TimeScale ts;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    int dim = 1;
    int n_delays = 1;
    RhsFn rhs;
    std::vector<DelayFn> delays;
    GridFunction history;
    std::optional<double> lipschitz;  // L, if known
    std::optional<double> bound;      // M, if known
    double epsilon = 1.0;
};

/// Linear delay system x^Delta(t) = sum_i p_i(t) x(tau_i(t)) + q(t), same domain
/// conventions as DelayIVP.
struct LinearDelaySystem {
    TimeScale ts;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    int dim = 1;
    int n_delays = 1;
    std::vector<MatrixFn> coeffs;
    VectorFn forcing;
    std::vector<DelayFn> delays;
    GridFunction history;
};

struct SolverDiagnostics {
    int iterations = 0;          // total Picard iterations across all windows
    double final_sup_diff = 0.0; // sup difference of the last iteration pair
    double window_delta = 0.0;   // delta of the last window
    double zeta = 0.0;           // zeta of the last window
    std::vector<double> partition;       // cell boundaries used (beta ... end)
    std::vector<int> cell_iterations;    // Picard iterations spent per cell
    // Filled only when iterate logging is requested: row k holds
    // ||x_k - x_{k-1}|| at each point of iterate_grid.
    std::vector<std::vector<double>> iterate_diffs;
    std::vector<double> iterate_grid;
};

/// A computed solution: values on [alpha, end] (prehistory included), where end
/// is how far the solve reached (gamma for global solves).
struct Solution {
    GridFunction values;
    double end = 0.0;
    SolverDiagnostics diagnostics;

    const Vec& at(double t) const { return values.at(t); }
    double scalar_at(double t) const { return values.scalar_at(t); }
};

/// Sublinear growth certificate for nonlinear global solving:
/// ||f(t, u_1..u_n)|| <= sum_i p[i](t) ||u_i|| + q(t), coefficients nonnegative.
struct GrowthEnvelope {
    std::vector<ScalarFn> p;
    ScalarFn q;
};

void validate(const DelayIVP& ivp);
void validate(const LinearDelaySystem& sys);

} // namespace tsdelay
