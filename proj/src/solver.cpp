#include "tsdelay/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tsdelay/calculus.hpp"

namespace tsdelay {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

std::size_t find_point(const std::vector<double>& pts, double v) {
    auto it = std::lower_bound(pts.begin(), pts.end(), v - kLookupTol);
    if (it != pts.end() && std::abs(*it - v) <= kLookupTol)
        return static_cast<std::size_t>(it - pts.begin());
    return kNoIndex;
}

/// Solution-so-far on [alpha, frontier]; the frontier value is vals.back().
struct Accum {
    std::vector<double> pts;
    std::vector<Vec> vals;
    double sup_norm = 0.0; // nu: sup of ||x|| over the accumulated domain

    void append(double t, Vec v) {
        sup_norm = std::max(sup_norm, max_norm(v));
        pts.push_back(t);
        vals.push_back(std::move(v));
    }
};

Accum accum_from_history(const GridFunction& history) {
    Accum acc;
    acc.pts = history.points();
    acc.vals.reserve(acc.pts.size());
    for (std::size_t i = 0; i < acc.pts.size(); ++i) {
        acc.vals.push_back(history.at_index(i));
        acc.sup_norm = std::max(acc.sup_norm, max_norm(acc.vals.back()));
    }
    return acc;
}

/// delta = min(hard_end - b, eps / M) and zeta = max of [b, b + delta] on the
/// scale. M == 0 means the rhs is bounded by zero on the ball, so the window
/// spans everything that is left.
std::pair<double, double> window_extent(const TimeScale& ts, double b, double hard_end, double eps,
                                        double M) {
    const double remaining = hard_end - b;
    const double delta = M > 0.0 ? std::min(remaining, eps / M) : remaining;
    if (delta == remaining) return {delta, hard_end};
    const std::vector<double>& sp = ts.sample_points();
    auto it = std::upper_bound(sp.begin(), sp.end(), b + delta);
    double zeta = it == sp.begin() ? b : *(it - 1);
    if (zeta < b) zeta = b;
    return {delta, zeta};
}

struct DelaySource {
    bool in_accum = false;
    std::size_t index = 0;
};

struct WindowOutcome {
    double delta = 0.0;
    double zeta = 0.0;
    double end = 0.0;
    int iterations = 0;
    double sup_diff = 0.0;
    std::vector<double> new_pts; // strictly after b
    std::vector<Vec> new_vals;
    std::vector<std::vector<double>> iterate_diffs;
    std::vector<double> iterate_grid;
};

/// One Picard window from b: iterate x_{k+1}(t) = x(b) + integral of the rhs
/// composed with the delayed previous iterate, on the grid of [b, zeta]; then a
/// single exact forward step past zeta when zeta is right-scattered.
///
/// The sweep keeps a running carrier v so that on isolated stretches the
/// converged values satisfy v_{j+1} = v_j + mu_j * rhs(t_j, ...) with exactly the
/// float arithmetic of the forward recursion.
WindowOutcome run_window(const TimeScale& ts, int dim, const RhsFn& rhs,
                         const std::vector<DelayFn>& delays, const Accum& acc, double b,
                         double hard_end, double eps, double M, const PicardOptions& opt) {
    WindowOutcome out;
    const auto [delta, zeta] = window_extent(ts, b, hard_end, eps, M);
    out.delta = delta;
    out.zeta = zeta;

    if (zeta <= b + kMembershipTol && ts.mu(b) <= 0.0)
        fail(ErrorCode::WindowTooSmall,
             "existence window delta = " + fmt(delta) + " reaches no grid point past t = " + fmt(b));

    const std::vector<double> seg = ts.grid(b, zeta);
    const std::size_t m = seg.size() - 1;
    const std::size_t n = delays.size();

    // Resolve every delayed lookup once: for grid point j and delay i, where the
    // value x(tau_i(seg[j])) lives (fixed prehistory vs. current window).
    std::vector<DelaySource> source(seg.size() * n);
    for (std::size_t j = 0; j < seg.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double raw = delays[i](seg[j]);
            if (!std::isfinite(raw))
                fail(ErrorCode::Evaluation, "delay produced a non-finite value at t = " + fmt(seg[j]));
            const double snapped = ts.snap_down(raw);
            DelaySource src;
            if (snapped < b + kMembershipTol) {
                src.in_accum = true;
                src.index = find_point(acc.pts, snapped);
            } else {
                src.in_accum = false;
                src.index = find_point(seg, snapped);
            }
            if (src.index == kNoIndex)
                fail(ErrorCode::OutOfDomain,
                     "delayed time " + fmt(snapped) + " missing from the accumulated grid");
            source[j * n + i] = src;
        }
    }

    const Vec x_beta = acc.vals.back();
    std::vector<Vec> prev(seg.size(), x_beta);
    if (opt.start_perturbation) {
        for (std::size_t j = 1; j < seg.size(); ++j) {
            const Vec off = opt.start_perturbation(seg[j]);
            for (int r = 0; r < dim; ++r) prev[j][static_cast<std::size_t>(r)] += off[static_cast<std::size_t>(r)];
        }
    }
    std::vector<Vec> cur(seg.size(), Vec(static_cast<std::size_t>(dim), 0.0));

    // g[j] is needed for every left pair end; the right end only under a trapezoid.
    const bool need_last = m > 0 && ts.mu(seg[m - 1]) <= 0.0;
    std::vector<Vec> g(seg.size());
    std::vector<Vec> args(n);

    auto eval_g = [&](std::size_t j, const std::vector<Vec>& from) {
        for (std::size_t i = 0; i < n; ++i) {
            const DelaySource& src = source[j * n + i];
            args[i] = src.in_accum ? acc.vals[src.index] : from[src.index];
        }
        Vec value = rhs(seg[j], args);
        if (value.size() != static_cast<std::size_t>(dim))
            fail(ErrorCode::Evaluation, "rhs returned a value of wrong dimension");
        if (!all_finite(value))
            fail(ErrorCode::Evaluation, "rhs produced a non-finite value at t = " + fmt(seg[j]));
        return value;
    };

    const double ball_limit = eps * (1.0 + 1e-9) + 1e-12;
    bool converged = false;
    for (int k = 1; k <= opt.max_iter; ++k) {
        for (std::size_t j = 0; j < m; ++j) g[j] = eval_g(j, prev);
        if (need_last) g[m] = eval_g(m, prev);

        Vec v = x_beta;
        cur[0] = v;
        for (std::size_t j = 0; j < m; ++j) {
            const double mj = ts.mu(seg[j]);
            if (mj > 0.0) {
                for (int r = 0; r < dim; ++r)
                    v[static_cast<std::size_t>(r)] += mj * g[j][static_cast<std::size_t>(r)];
            } else {
                const double h = seg[j + 1] - seg[j];
                for (int r = 0; r < dim; ++r)
                    v[static_cast<std::size_t>(r)] +=
                        0.5 * h * (g[j][static_cast<std::size_t>(r)] + g[j + 1][static_cast<std::size_t>(r)]);
            }
            cur[j + 1] = v;
        }

        double sup = 0.0;
        std::vector<double> row(opt.log_iterates ? seg.size() : 0, 0.0);
        for (std::size_t j = 0; j < seg.size(); ++j) {
            const double d = max_norm_diff(cur[j], prev[j]);
            sup = std::max(sup, d);
            if (opt.log_iterates) row[j] = d;
            const double drift = max_norm_diff(cur[j], x_beta);
            if (drift > ball_limit)
                fail(ErrorCode::BallExit, "iterate " + std::to_string(k) + " left the epsilon ball at t = " +
                                              fmt(seg[j]) + " (||x - x(beta)|| = " + fmt(drift) + " > " +
                                              fmt(eps) + ")");
        }
        if (opt.log_iterates) out.iterate_diffs.push_back(std::move(row));
        prev.swap(cur);
        out.iterations = k;
        out.sup_diff = sup;
        if (sup < opt.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        fail(ErrorCode::NoConvergence, "Picard iteration did not reach tol = " + fmt(opt.tol) +
                                           " within " + std::to_string(opt.max_iter) +
                                           " iterations (sup diff " + fmt(out.sup_diff) + ")");

    out.iterate_grid = seg;
    for (std::size_t j = 1; j < seg.size(); ++j) {
        out.new_pts.push_back(seg[j]);
        out.new_vals.push_back(prev[j]);
    }
    out.end = zeta;

    const double mz = ts.mu(zeta);
    if (mz > 0.0 && zeta < hard_end - kMembershipTol) {
        // Right-scattered window end: the solution extends one exact step.
        for (std::size_t i = 0; i < n; ++i) {
            const double raw = delays[i](zeta);
            const double snapped = ts.snap_down(raw);
            const bool from_accum = snapped < b + kMembershipTol;
            const std::size_t idx = find_point(from_accum ? acc.pts : seg, snapped);
            if (idx == kNoIndex)
                fail(ErrorCode::OutOfDomain, "delayed time missing from the accumulated grid");
            args[i] = from_accum ? acc.vals[idx] : prev[idx];
        }
        Vec fz = rhs(zeta, args);
        if (!all_finite(fz))
            fail(ErrorCode::Evaluation, "rhs produced a non-finite value at t = " + fmt(zeta));
        const Vec& yz = prev[m];
        Vec ext(static_cast<std::size_t>(dim));
        for (int r = 0; r < dim; ++r)
            ext[static_cast<std::size_t>(r)] =
                yz[static_cast<std::size_t>(r)] + mz * fz[static_cast<std::size_t>(r)];
        out.end = ts.sigma(zeta);
        out.new_pts.push_back(out.end);
        out.new_vals.push_back(std::move(ext));
    }
    return out;
}

using ConstantsFn = std::function<std::pair<double, double>(double nu, double remaining)>;

/// Marches Picard windows cell by cell across the partition; each finished window
/// extends the accumulated solution, which the next window reads as prehistory.
Solution march(const TimeScale& ts, int dim, const RhsFn& rhs, const std::vector<DelayFn>& delays,
               double alpha, const GridFunction& history, const std::vector<double>& partition,
               const ConstantsFn& constants, const PicardOptions& opt) {
    Accum acc = accum_from_history(history);
    SolverDiagnostics diag;
    diag.partition = partition;
    diag.cell_iterations.assign(partition.size() > 1 ? partition.size() - 1 : 0, 0);

    for (std::size_t cell = 0; cell + 1 < partition.size(); ++cell) {
        const double target = partition[cell + 1];
        while (acc.pts.back() < target - kMembershipTol) {
            const double frontier = acc.pts.back();
            const auto [eps, M] = constants(acc.sup_norm, target - frontier);
            try {
                WindowOutcome w =
                    run_window(ts, dim, rhs, delays, acc, frontier, target, eps, M, opt);
                for (std::size_t j = 0; j < w.new_pts.size(); ++j)
                    acc.append(w.new_pts[j], std::move(w.new_vals[j]));
                diag.iterations += w.iterations;
                diag.cell_iterations[cell] += w.iterations;
                diag.final_sup_diff = w.sup_diff;
                diag.window_delta = w.delta;
                diag.zeta = w.zeta;
                if (opt.log_iterates) {
                    diag.iterate_diffs = std::move(w.iterate_diffs);
                    diag.iterate_grid = std::move(w.iterate_grid);
                }
            } catch (const TsError& e) {
                if (e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::BallExit ||
                    e.code() == ErrorCode::WindowTooSmall) {
                    std::string msg(e.what());
                    const std::string prefix = std::string(error_code_name(e.code())) + ": ";
                    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
                    fail(e.code(), msg + " (cell " + std::to_string(cell) + ": [" +
                                       fmt(partition[cell]) + "," + fmt(target) + "])");
                }
                throw;
            }
        }
    }

    Solution sol{GridFunction(ts, alpha, acc.pts.back(),
                              dim == 1 ? ValueShape::scalar() : ValueShape::vector(dim),
                              std::move(acc.vals)),
                 acc.pts.back(), std::move(diag)};
    return sol;
}

void validate_frame(const TimeScale& ts, double alpha, double beta, double gamma, int dim, int n,
                    const std::vector<DelayFn>& delays, const GridFunction& history) {
    if (dim < 1) fail(ErrorCode::Validation, "dimension must be at least 1");
    if (n < 1) fail(ErrorCode::Validation, "at least one delay is required");
    if (static_cast<int>(delays.size()) != n)
        fail(ErrorCode::Validation, "expected " + std::to_string(n) + " delay functions, got " +
                                        std::to_string(delays.size()));
    for (const DelayFn& d : delays)
        if (!d) fail(ErrorCode::Validation, "delay function is empty");
    for (double anchor : {alpha, beta, gamma})
        if (!ts.is_sample(anchor))
            fail(ErrorCode::Validation,
                 "anchor t = " + fmt(anchor) + " does not lie on the sampling grid");
    if (!(alpha <= beta + kLookupTol) || !(beta <= gamma + kLookupTol))
        fail(ErrorCode::Validation, "need alpha <= beta <= gamma");

    if (history.shape().flat_size() != dim || history.shape().kind == ValueShape::Kind::Matrix)
        fail(ErrorCode::Validation, "history values must live in R^" + std::to_string(dim));
    if (std::abs(history.lo() - alpha) > kLookupTol || std::abs(history.hi() - beta) > kLookupTol)
        fail(ErrorCode::Validation, "history must cover exactly [alpha, beta]");

    const auto [ka, kb] = ts.kappa_truncate(beta, gamma);
    for (double t : ts.grid(ka, kb)) {
        for (int i = 0; i < n; ++i) {
            const double v = delays[static_cast<std::size_t>(i)](t);
            if (!std::isfinite(v))
                fail(ErrorCode::Validation, "tau_" + std::to_string(i + 1) +
                                                " is non-finite at t = " + fmt(t));
            if (v > t + kLookupTol)
                fail(ErrorCode::Validation, "tau_" + std::to_string(i + 1) + "(t) = " + fmt(v) +
                                                " exceeds t = " + fmt(t));
            const double snapped = ts.snap_down(v); // Snap failures propagate
            if (snapped < alpha - kLookupTol)
                fail(ErrorCode::Validation, "tau_" + std::to_string(i + 1) + "(t) = " + fmt(v) +
                                                " reaches below alpha = " + fmt(alpha) +
                                                " at t = " + fmt(t));
        }
    }
}

/// Corner-sampling bound heuristic: the rhs is evaluated on the grid of the
/// kappa-truncated [beta, gamma], with arguments taken from the sampled history
/// values and the corners of the epsilon ball around them; the maximum norm is
/// inflated by 10 percent.
double estimate_rhs_bound(const DelayIVP& ivp) {
    const auto [ka, kb] = ivp.ts.kappa_truncate(ivp.beta, ivp.gamma);
    const std::vector<double> pts = ivp.ts.grid(ka, kb);
    const int d = ivp.dim;

    std::vector<Vec> candidates;
    const std::size_t count = ivp.history.size();
    const std::size_t stride = std::max<std::size_t>(1, count / 32);
    for (std::size_t i = 0; i < count; i += stride) {
        const Vec& base = ivp.history.at_index(i);
        candidates.push_back(base);
        if (d <= 6) {
            for (unsigned mask = 0; mask < (1u << d); ++mask) {
                Vec c = base;
                for (int r = 0; r < d; ++r)
                    c[static_cast<std::size_t>(r)] +=
                        (mask >> r) & 1u ? ivp.epsilon : -ivp.epsilon;
                candidates.push_back(std::move(c));
            }
        } else {
            for (int r = 0; r < d; ++r)
                for (double sgn : {-1.0, 1.0}) {
                    Vec c = base;
                    c[static_cast<std::size_t>(r)] += sgn * ivp.epsilon;
                    candidates.push_back(std::move(c));
                }
        }
    }

    double best = 0.0;
    try {
        std::vector<Vec> args(static_cast<std::size_t>(ivp.n_delays));
        for (double t : pts) {
            for (const Vec& c : candidates) {
                std::fill(args.begin(), args.end(), c);
                const Vec v = ivp.rhs(t, args);
                if (!all_finite(v))
                    fail(ErrorCode::MissingBound, "rhs not finite while estimating M");
                best = std::max(best, max_norm(v));
            }
        }
    } catch (const TsError& e) {
        if (e.code() == ErrorCode::MissingBound) throw;
        fail(ErrorCode::MissingBound,
             std::string("could not estimate a bound M (") + e.what() + ")");
    } catch (const std::exception& e) {
        fail(ErrorCode::MissingBound,
             std::string("could not estimate a bound M (") + e.what() + ")");
    }
    return 1.1 * best;
}

/// Per-window (epsilon_k, M_k) for sublinear problems: epsilon_k = nu + 1 doubled
/// until epsilon_k / (M1 (epsilon_k + nu) + M2) covers 1/(2 M1) (or the remaining
/// span when M1 == 0).
ConstantsFn sublinear_constants(double M1, double M2) {
    return [M1, M2](double nu, double remaining) {
        double eps = nu + 1.0;
        auto Mk = [&](double e) { return M1 * (e + nu) + M2; };
        const double target = M1 > 0.0 ? 1.0 / (2.0 * M1) : remaining;
        for (int guard = 0; guard < 600; ++guard) {
            const double m = Mk(eps);
            if (m <= 0.0 || eps / m >= target) return std::pair{eps, Mk(eps)};
            eps *= 2.0;
        }
        fail(ErrorCode::Domain, "window epsilon selection diverged");
    };
}

std::vector<double> make_partition_impl(const TimeScale& ts, double beta, double gamma, double M1) {
    std::vector<double> part{beta};
    if (gamma <= beta + kMembershipTol) return part;
    const double width =
        M1 > 0.0 ? 1.0 / (2.0 * M1) : std::numeric_limits<double>::infinity();
    const std::vector<double>& sp = ts.sample_points();
    double cur = beta;
    while (cur < gamma - kMembershipTol) {
        double nxt;
        if (ts.mu(cur) > width) {
            nxt = ts.sigma(cur);
        } else {
            const double cap = std::min(cur + width, gamma);
            auto it = std::upper_bound(sp.begin(), sp.end(), cap + kMembershipTol);
            nxt = it == sp.begin() ? cur : *(it - 1);
            if (nxt <= cur + kMembershipTol) {
                // Dense spacing wider than the target width: take one sample anyway.
                nxt = sp[ts.sample_index(cur) + 1];
            }
        }
        if (nxt > gamma) nxt = gamma;
        part.push_back(nxt);
        cur = nxt;
    }
    return part;
}

RhsFn linear_rhs(const LinearDelaySystem& sys) {
    const int d = sys.dim;
    const int n = sys.n_delays;
    const std::vector<MatrixFn> coeffs = sys.coeffs;
    const VectorFn forcing = sys.forcing;
    return [d, n, coeffs, forcing](double t, const std::vector<Vec>& u) {
        Vec out(static_cast<std::size_t>(d), 0.0);
        for (int i = 0; i < n; ++i) {
            const Vec P = coeffs[static_cast<std::size_t>(i)](t);
            for (int r = 0; r < d; ++r) {
                double s = 0.0;
                for (int c = 0; c < d; ++c)
                    s += P[static_cast<std::size_t>(r * d + c)] * u[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
                out[static_cast<std::size_t>(r)] += s;
            }
        }
        const Vec q = forcing(t);
        for (int r = 0; r < d; ++r) out[static_cast<std::size_t>(r)] += q[static_cast<std::size_t>(r)];
        return out;
    };
}

} // namespace

void validate(const DelayIVP& ivp) {
    if (!ivp.rhs) fail(ErrorCode::Validation, "rhs callable is empty");
    if (!(ivp.epsilon > 0.0) || !std::isfinite(ivp.epsilon))
        fail(ErrorCode::Validation, "epsilon must be a positive real");
    if (ivp.bound && (!(*ivp.bound > 0.0) || !std::isfinite(*ivp.bound)))
        fail(ErrorCode::Validation, "bound M must be a positive real when given");
    if (ivp.lipschitz && (!(*ivp.lipschitz >= 0.0) || !std::isfinite(*ivp.lipschitz)))
        fail(ErrorCode::Validation, "Lipschitz constant must be nonnegative when given");
    validate_frame(ivp.ts, ivp.alpha, ivp.beta, ivp.gamma, ivp.dim, ivp.n_delays, ivp.delays,
                   ivp.history);
}

void validate(const LinearDelaySystem& sys) {
    if (static_cast<int>(sys.coeffs.size()) != sys.n_delays)
        fail(ErrorCode::Validation, "expected one coefficient matrix per delay");
    for (const MatrixFn& p : sys.coeffs)
        if (!p) fail(ErrorCode::Validation, "coefficient callable is empty");
    if (!sys.forcing) fail(ErrorCode::Validation, "forcing callable is empty");
    validate_frame(sys.ts, sys.alpha, sys.beta, sys.gamma, sys.dim, sys.n_delays, sys.delays,
                   sys.history);
}

ExistenceWindow existence_window(const DelayIVP& ivp) {
    validate(ivp);
    const double M = ivp.bound ? *ivp.bound : estimate_rhs_bound(ivp);
    const auto [delta, zeta] = window_extent(ivp.ts, ivp.beta, ivp.gamma, ivp.epsilon, M);
    return ExistenceWindow{delta, zeta, M};
}

Solution picard_solve(const DelayIVP& ivp, const PicardOptions& opt) {
    validate(ivp);
    if (!(opt.tol > 0.0)) fail(ErrorCode::Validation, "tol must be positive");
    if (opt.max_iter < 1) fail(ErrorCode::Validation, "max_iter must be at least 1");

    if (ivp.gamma <= ivp.beta + kMembershipTol) {
        // Nothing to solve: the prehistory is the solution.
        Solution sol{ivp.history, ivp.beta, SolverDiagnostics{}};
        sol.diagnostics.partition = {ivp.beta};
        sol.diagnostics.zeta = ivp.beta;
        return sol;
    }

    const double M = ivp.bound ? *ivp.bound : estimate_rhs_bound(ivp);
    Accum acc = accum_from_history(ivp.history);
    WindowOutcome w = run_window(ivp.ts, ivp.dim, ivp.rhs, ivp.delays, acc, ivp.beta, ivp.gamma,
                                 ivp.epsilon, M, opt);
    for (std::size_t j = 0; j < w.new_pts.size(); ++j)
        acc.append(w.new_pts[j], std::move(w.new_vals[j]));

    SolverDiagnostics diag;
    diag.iterations = w.iterations;
    diag.final_sup_diff = w.sup_diff;
    diag.window_delta = w.delta;
    diag.zeta = w.zeta;
    diag.partition = {ivp.beta, w.end};
    diag.cell_iterations = {w.iterations};
    if (opt.log_iterates) {
        diag.iterate_diffs = std::move(w.iterate_diffs);
        diag.iterate_grid = std::move(w.iterate_grid);
    }
    return Solution{GridFunction(ivp.ts, ivp.alpha, w.end,
                                 ivp.dim == 1 ? ValueShape::scalar() : ValueShape::vector(ivp.dim),
                                 std::move(acc.vals)),
                    w.end, std::move(diag)};
}

double iterate_error_bound(double M, double L, int k, const TimeScale& ts, double t, double beta) {
    if (k < 1) fail(ErrorCode::Domain, "iterate_error_bound needs k >= 1");
    if (!(M >= 0.0) || !(L >= 0.0)) fail(ErrorCode::Domain, "bounds must be nonnegative");
    if (t < beta - kMembershipTol) fail(ErrorCode::OutOfDomain, "iterate_error_bound needs t >= beta");
    return M * std::pow(L, k - 1) * hk_polynomial(ts, k, t, beta);
}

std::pair<double, double> estimate_bounds(const LinearDelaySystem& sys) {
    double M1 = 0.0;
    double M2 = 0.0;
    for (double t : sys.ts.grid(sys.beta, sys.gamma)) {
        double row_sum = 0.0;
        for (const MatrixFn& p : sys.coeffs) {
            const Vec P = p(t);
            if (P.size() != static_cast<std::size_t>(sys.dim) * static_cast<std::size_t>(sys.dim) ||
                !all_finite(P))
                fail(ErrorCode::Evaluation,
                     "coefficient matrix not finite (or wrongly sized) at t = " + fmt(t));
            row_sum += max_row_sum_norm(P, sys.dim);
        }
        M1 = std::max(M1, row_sum);
        const Vec q = sys.forcing(t);
        if (q.size() != static_cast<std::size_t>(sys.dim) || !all_finite(q))
            fail(ErrorCode::Evaluation, "forcing not finite (or wrongly sized) at t = " + fmt(t));
        M2 = std::max(M2, max_norm(q));
    }
    return {M1, M2};
}

std::vector<double> make_partition(const LinearDelaySystem& sys, double M1) {
    if (!(M1 >= 0.0) || !std::isfinite(M1)) fail(ErrorCode::Domain, "M1 must be a nonnegative real");
    return make_partition_impl(sys.ts, sys.beta, sys.gamma, M1);
}

Solution solve_global(const LinearDelaySystem& sys, double tol, int max_iter) {
    validate(sys);
    if (!(tol > 0.0)) fail(ErrorCode::Validation, "tol must be positive");
    if (max_iter < 1) fail(ErrorCode::Validation, "max_iter must be at least 1");
    const auto [M1, M2] = estimate_bounds(sys);
    const std::vector<double> partition = make_partition_impl(sys.ts, sys.beta, sys.gamma, M1);
    PicardOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    Solution sol = march(sys.ts, sys.dim, linear_rhs(sys), sys.delays, sys.alpha, sys.history,
                         partition, sublinear_constants(M1, M2), opt);
    return sol;
}

Solution solve_global_nonlinear(const DelayIVP& ivp, const GrowthEnvelope& envelope, double tol,
                                int max_iter) {
    validate(ivp);
    if (!(tol > 0.0)) fail(ErrorCode::Validation, "tol must be positive");
    if (max_iter < 1) fail(ErrorCode::Validation, "max_iter must be at least 1");
    if (static_cast<int>(envelope.p.size()) != ivp.n_delays)
        fail(ErrorCode::Validation, "envelope needs one coefficient per delay");
    if (!envelope.q) fail(ErrorCode::Validation, "envelope forcing term is empty");

    double M1 = 0.0;
    double M2 = 0.0;
    for (double t : ivp.ts.grid(ivp.beta, ivp.gamma)) {
        double s = 0.0;
        for (const ScalarFn& p : envelope.p) {
            const double v = p(t);
            if (!std::isfinite(v) || v < 0.0)
                fail(ErrorCode::Validation,
                     "envelope coefficients must be finite and nonnegative (t = " + fmt(t) + ")");
            s += v;
        }
        const double qv = envelope.q(t);
        if (!std::isfinite(qv) || qv < 0.0)
            fail(ErrorCode::Validation,
                 "envelope forcing must be finite and nonnegative (t = " + fmt(t) + ")");
        M1 = std::max(M1, s);
        M2 = std::max(M2, qv);
    }

    const int n = ivp.n_delays;
    const RhsFn inner = ivp.rhs;
    const GrowthEnvelope env = envelope;
    RhsFn checked = [inner, env, n](double t, const std::vector<Vec>& u) {
        Vec out = inner(t, u);
        double budget = env.q(t);
        for (int i = 0; i < n; ++i)
            budget += env.p[static_cast<std::size_t>(i)](t) * max_norm(u[static_cast<std::size_t>(i)]);
        const double got = max_norm(out);
        if (got > budget + 1e-9 * (1.0 + budget))
            fail(ErrorCode::Envelope, "||f|| = " + fmt(got) + " exceeds the declared envelope " +
                                          fmt(budget) + " at t = " + fmt(t));
        return out;
    };

    const std::vector<double> partition = make_partition_impl(ivp.ts, ivp.beta, ivp.gamma, M1);
    PicardOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return march(ivp.ts, ivp.dim, checked, ivp.delays, ivp.alpha, ivp.history, partition,
                 sublinear_constants(M1, M2), opt);
}

Solution solve_stepwise_isolated(const DelayIVP& ivp) {
    validate(ivp);
    if (!ivp.ts.purely_isolated(ivp.beta, ivp.gamma))
        fail(ErrorCode::Validation,
             "stepwise solving needs every point of [beta, gamma) right-scattered");

    Accum acc = accum_from_history(ivp.history);
    std::vector<Vec> args(static_cast<std::size_t>(ivp.n_delays));
    double cur = ivp.beta;
    while (cur < ivp.gamma - kMembershipTol) {
        for (int i = 0; i < ivp.n_delays; ++i) {
            const double snapped = ivp.ts.snap_down(ivp.delays[static_cast<std::size_t>(i)](cur));
            const std::size_t idx = find_point(acc.pts, snapped);
            if (idx == kNoIndex)
                fail(ErrorCode::OutOfDomain, "delayed time missing from the accumulated grid");
            args[static_cast<std::size_t>(i)] = acc.vals[idx];
        }
        Vec f = ivp.rhs(cur, args);
        if (!all_finite(f))
            fail(ErrorCode::Evaluation, "rhs produced a non-finite value at t = " + fmt(cur));
        const double m = ivp.ts.mu(cur);
        const Vec& here = acc.vals.back();
        Vec next(static_cast<std::size_t>(ivp.dim));
        for (int r = 0; r < ivp.dim; ++r)
            next[static_cast<std::size_t>(r)] =
                here[static_cast<std::size_t>(r)] + m * f[static_cast<std::size_t>(r)];
        const double t_next = ivp.ts.sigma(cur);
        acc.append(t_next, std::move(next));
        cur = t_next;
    }

    SolverDiagnostics diag;
    diag.partition = ivp.ts.grid(ivp.beta, ivp.gamma);
    return Solution{GridFunction(ivp.ts, ivp.alpha, ivp.gamma,
                                 ivp.dim == 1 ? ValueShape::scalar() : ValueShape::vector(ivp.dim),
                                 std::move(acc.vals)),
                    ivp.gamma, std::move(diag)};
}

} // namespace tsdelay
