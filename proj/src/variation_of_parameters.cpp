#include "tsdelay/variation_of_parameters.hpp"

#include <cassert>
#include <sstream>
#include <utility>

#include "tsdelay/solver.hpp"

namespace tsdelay {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// Forcing plus the history contribution at eta: q(eta) + sum over delays whose
/// snapped value still lies in [alpha, beta) of p_i(eta) * phi(tau_i(eta)).
/// Delays landing at or after beta belong to the propagated solution term and
/// contribute nothing here.
Vec gated_forcing(const LinearDelaySystem& sys, const CharacteristicSet& history_window,
                  double eta) {
    const int d = sys.dim;
    Vec g = sys.forcing(eta);
    for (int i = 0; i < sys.n_delays; ++i) {
        const double tau = sys.ts.snap_down(sys.delays[static_cast<std::size_t>(i)](eta));
        const bool in_history = history_window.contains(tau);
        const bool in_solution = tau >= sys.beta - kMembershipTol;
        assert(in_history != in_solution);
        (void)in_solution;
        if (!in_history) continue;
        const Vec P = sys.coeffs[static_cast<std::size_t>(i)](eta);
        const Vec& phi = sys.history.at(tau);
        for (int r = 0; r < d; ++r) {
            double s = 0.0;
            for (int c = 0; c < d; ++c)
                s += P[static_cast<std::size_t>(r * d + c)] * phi[static_cast<std::size_t>(c)];
            g[static_cast<std::size_t>(r)] += s;
        }
    }
    return g;
}

} // namespace

bool CharacteristicSet::contains(double t) const {
    const bool above = lo_closed ? t >= lo - kMembershipTol : t > lo + kMembershipTol;
    const bool below = hi_closed ? t <= hi + kMembershipTol : t < hi - kMembershipTol;
    return above && below;
}

double characteristic(const CharacteristicSet& U, double t) {
    return U.contains(t) ? 1.0 : 0.0;
}

PrincipalSolution principal_solution(const LinearDelaySystem& sys, double zeta,
                                     double solver_tol) {
    validate(sys);
    if (zeta < sys.beta - kLookupTol || zeta > sys.gamma + kLookupTol)
        fail(ErrorCode::OutOfDomain,
             "principal source zeta = " + fmt(zeta) + " lies outside [beta, gamma]");
    if (!sys.ts.is_sample(zeta))
        fail(ErrorCode::NotInTimescale,
             "principal source zeta = " + fmt(zeta) + " is not a grid point");
    zeta = sys.ts.sample_points()[sys.ts.sample_index(zeta)];

    const int d = sys.dim;
    const ValueShape column_shape = d == 1 ? ValueShape::scalar() : ValueShape::vector(d);
    const std::vector<double> hist_pts = sys.ts.grid(sys.alpha, zeta);

    LinearDelaySystem column = sys;
    column.beta = zeta;
    column.forcing = [d](double) { return Vec(static_cast<std::size_t>(d), 0.0); };

    std::vector<Solution> columns;
    columns.reserve(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
        std::vector<Vec> hist(hist_pts.size(), Vec(static_cast<std::size_t>(d), 0.0));
        hist.back()[static_cast<std::size_t>(c)] = 1.0;
        column.history =
            GridFunction(sys.ts, sys.alpha, zeta, column_shape, std::move(hist));
        columns.push_back(solve_global(column, solver_tol));
    }

    const GridFunction& first = columns.front().values;
    std::vector<Vec> mats(first.size(), Vec(static_cast<std::size_t>(d * d), 0.0));
    for (int c = 0; c < d; ++c) {
        const GridFunction& col = columns[static_cast<std::size_t>(c)].values;
        if (col.size() != first.size())
            fail(ErrorCode::Evaluation, "principal columns disagree on the solution grid");
        for (std::size_t k = 0; k < first.size(); ++k)
            for (int r = 0; r < d; ++r)
                mats[k][static_cast<std::size_t>(r * d + c)] =
                    col.at_index(k)[static_cast<std::size_t>(r)];
    }

    const double end = columns.front().end;
    return PrincipalSolution{
        zeta, end, d, GridFunction(sys.ts, sys.alpha, end, ValueShape::matrix(d), std::move(mats))};
}

PrincipalCache::PrincipalCache(const LinearDelaySystem& sys, double solver_tol)
    : sys_(sys), solver_tol_(solver_tol) {
    validate(sys_);
}

const PrincipalSolution& PrincipalCache::at(double zeta) {
    const std::size_t key = sys_.ts.sample_index(zeta);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = by_source_.find(key);
        if (it != by_source_.end()) return it->second;
    }
    // Solve outside the lock; a racing thread solving the same key loses the
    // insert and its work is discarded.
    PrincipalSolution fresh =
        principal_solution(sys_, sys_.ts.sample_points()[key], solver_tol_);
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = by_source_.try_emplace(key, std::move(fresh));
    return it->second;
}

Vec vop_evaluate(const LinearDelaySystem& sys, PrincipalCache& cache, double t) {
    const int d = sys.dim;
    std::size_t ti;
    try {
        ti = sys.ts.sample_index(t);
    } catch (const TsError&) {
        fail(ErrorCode::OutOfDomain,
             "representation point t = " + fmt(t) + " is not a grid point");
    }
    const double tc = sys.ts.sample_points()[ti];
    if (tc < sys.beta - kMembershipTol || tc > sys.gamma + kMembershipTol)
        fail(ErrorCode::OutOfDomain,
             "representation point t = " + fmt(t) + " lies outside [beta, gamma]");

    Vec out = mat_vec(cache.at(sys.beta).at(tc), sys.history.at(sys.beta), d);

    const CharacteristicSet history_window = CharacteristicSet::half_open(sys.alpha, sys.beta);
    const std::vector<double> seg = sys.ts.grid(sys.beta, tc);
    for (std::size_t j = 0; j + 1 < seg.size(); ++j) {
        const double a = seg[j];
        const double b = seg[j + 1];
        const double m = sys.ts.mu(a);
        if (m > 0.0) {
            const Vec contrib = mat_vec(cache.at(b).at(tc), gated_forcing(sys, history_window, a), d);
            for (int r = 0; r < d; ++r)
                out[static_cast<std::size_t>(r)] += m * contrib[static_cast<std::size_t>(r)];
        } else {
            // Dense pair: sigma(eta) = eta in the limit, so the weight is the
            // principal solution sourced at the endpoint itself.
            const double h = b - a;
            const Vec va = mat_vec(cache.at(a).at(tc), gated_forcing(sys, history_window, a), d);
            const Vec vb = mat_vec(cache.at(b).at(tc), gated_forcing(sys, history_window, b), d);
            for (int r = 0; r < d; ++r)
                out[static_cast<std::size_t>(r)] +=
                    0.5 * h * (va[static_cast<std::size_t>(r)] + vb[static_cast<std::size_t>(r)]);
        }
    }
    return out;
}

Vec vop_evaluate(const LinearDelaySystem& sys, double t) {
    PrincipalCache cache(sys);
    return vop_evaluate(sys, cache, t);
}

RepresentationReport verify_representation(const LinearDelaySystem& sys, double tol,
                                           double solver_tol) {
    if (!(tol > 0.0)) fail(ErrorCode::Validation, "verification tolerance must be positive");
    Solution sol = solve_global(sys, solver_tol);
    PrincipalCache cache(sys, solver_tol);

    RepresentationReport rep;
    rep.tol = tol;
    rep.argmax_t = sys.beta;
    for (double t : sys.ts.grid(sys.beta, sol.end)) {
        const double diff = max_norm_diff(vop_evaluate(sys, cache, t), sol.at(t));
        if (diff > rep.sup_diff) {
            rep.sup_diff = diff;
            rep.argmax_t = t;
        }
    }
    rep.pass = rep.sup_diff <= tol;
    return rep;
}

} // namespace tsdelay
