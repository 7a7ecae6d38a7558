#pragma once

#include <map>
#include <mutex>

#include "tsdelay/problems.hpp"

namespace tsdelay {

/// Interval with individually open or closed ends, used as the support of an
/// indicator function. Membership is tolerance-aware so grid points sitting at
/// an endpoint classify predictably.
struct CharacteristicSet {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = true;

    static CharacteristicSet closed(double a, double b) { return {a, b, true, true}; }
    static CharacteristicSet half_open(double a, double b) { return {a, b, true, false}; }
    static CharacteristicSet point(double z) { return {z, z, true, true}; }

    bool contains(double t) const;
};

/// Indicator of U: 1.0 if t lies in U, else 0.0.
double characteristic(const CharacteristicSet& U, double t);

/// Matrix solution of the homogeneous system sourced at zeta: zero before zeta,
/// the identity at zeta, and the delay dynamics afterwards. Values are stored
/// row-major on the full grid [alpha, end].
struct PrincipalSolution {
    double zeta = 0.0;
    double end = 0.0;
    int dim = 0;
    GridFunction values;

    /// Flat d*d matrix at grid point t (zero matrix for t < zeta).
    const Vec& at(double t) const { return values.at(t); }
};

/// Solves the homogeneous matrix problem column by column: column j carries the
/// history that is zero on [alpha, zeta) and e_j at zeta.
PrincipalSolution principal_solution(const LinearDelaySystem& sys, double zeta,
                                     double solver_tol = 1e-10);

/// Memoizes principal solutions per source point so a representation sweep pays
/// for each distinct source once. Safe for concurrent lookups; duplicate solves
/// of the same key are possible under contention but harmless.
class PrincipalCache {
public:
    PrincipalCache(const LinearDelaySystem& sys, double solver_tol = 1e-10);

    const PrincipalSolution& at(double zeta);

    const LinearDelaySystem& system() const { return sys_; }

private:
    LinearDelaySystem sys_;
    double solver_tol_;
    std::mutex mutex_;
    std::map<std::size_t, PrincipalSolution> by_source_;
};

/// Evaluates the representation formula at t: the principal solution propagating
/// the value at beta, plus integrals of the forcing and of the history terms
/// weighted by the principal solution at each source point.
Vec vop_evaluate(const LinearDelaySystem& sys, PrincipalCache& cache, double t);

/// Convenience overload that builds (and discards) a cache for a single point.
Vec vop_evaluate(const LinearDelaySystem& sys, double t);

struct RepresentationReport {
    double sup_diff = 0.0;
    double argmax_t = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Solves the system globally, evaluates the representation formula at every
/// grid point of [beta, end], and reports the largest discrepancy.
RepresentationReport verify_representation(const LinearDelaySystem& sys, double tol,
                                           double solver_tol = 1e-10);

} // namespace tsdelay
