// Acceptance harness: ten end-to-end checks against independent oracles, one
// PASS/FAIL line each. Exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tsdelay/calculus.hpp"
#include "tsdelay/cli.hpp"
#include "tsdelay/solver.hpp"
#include "tsdelay/variation_of_parameters.hpp"

using namespace tsdelay;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<double> random_lags(std::mt19937& gen, const std::vector<double>& pool) {
    const int n = oracle::uniform_int(gen, 1, 2);
    std::vector<double> lags;
    for (int i = 0; i < n; ++i) {
        const int pick = oracle::uniform_int(gen, 0, static_cast<int>(pool.size()) - 1);
        lags.push_back(pool[static_cast<std::size_t>(pick)]);
    }
    return lags;
}

LinearDelaySystem random_linear(std::mt19937& gen, const TimeScale& ts, double alpha, double beta,
                                double gamma, double amp, const std::vector<double>& lags) {
    const int d = oracle::uniform_int(gen, 1, 2);
    const int n = static_cast<int>(lags.size());
    std::vector<MatrixFn> coeffs;
    std::vector<DelayFn> delays;
    for (int i = 0; i < n; ++i) {
        Vec m(static_cast<std::size_t>(d * d));
        for (double& v : m) v = oracle::uniform(gen, -amp, amp);
        coeffs.push_back(oracle::constant_matrix(std::move(m)));
        delays.push_back(oracle::shift_delay(lags[static_cast<std::size_t>(i)]));
    }
    Vec q(static_cast<std::size_t>(d));
    for (double& v : q) v = oracle::uniform(gen, -amp, amp);
    const ValueShape shape = d == 1 ? ValueShape::scalar() : ValueShape::vector(d);
    const std::vector<double> hist_pts = ts.grid(alpha, beta);
    std::vector<Vec> hist;
    hist.reserve(hist_pts.size());
    for (std::size_t j = 0; j < hist_pts.size(); ++j) {
        Vec v(static_cast<std::size_t>(d));
        for (double& x : v) x = oracle::uniform(gen, -1.0, 1.0);
        hist.push_back(std::move(v));
    }
    return LinearDelaySystem{ts,
                             alpha,
                             beta,
                             gamma,
                             d,
                             n,
                             std::move(coeffs),
                             oracle::constant_vector(std::move(q)),
                             std::move(delays),
                             GridFunction(ts, alpha, beta, shape, std::move(hist))};
}

double max_diff_against_recursion(const LinearDelaySystem& sys, const Solution& sol) {
    const std::vector<double> pts = sys.ts.grid(sys.alpha, sys.gamma);
    const std::size_t hist_count = sys.ts.grid(sys.alpha, sys.beta).size();
    std::vector<Vec> hist;
    hist.reserve(hist_count);
    for (std::size_t j = 0; j < hist_count; ++j) hist.push_back(sys.history.at_index(j));
    const std::vector<Vec> want = oracle::forward_recursion(pts, hist_count, hist, sys.dim,
                                                            sys.coeffs, sys.forcing, sys.delays);
    if (sol.values.size() != pts.size()) return 1e300;
    double worst = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const Vec got = sol.values.at_index(j);
        for (std::size_t r = 0; r < got.size(); ++r)
            worst = std::max(worst, std::abs(got[r] - want[j][r]));
    }
    return worst;
}

bool criterion_discrete_oracle(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 gen(911);
    const TimeScale z = TimeScale::integers(-2, 50);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const LinearDelaySystem sys = random_linear(gen, z, -2.0, 0.0, 50.0, 2.0,
                                                    random_lags(gen, {0.0, 1.0, 2.0}));
        worst = std::max(worst, max_diff_against_recursion(sys, solve_global(sys)));
    }
    const double elapsed = seconds_since(start);
    detail = "max |solver - recursion| = " + fmtg(worst) + " over 25 systems on Z cap [-2,50], " +
             fmtg(elapsed) + "s";
    return worst <= 1e-9 && elapsed < 10.0;
}

bool criterion_ordinary_closed_form(std::string& detail) {
    const TimeScale dense = TimeScale::interval(0.0, 1.0, 1e-3);
    const GridFunction phi =
        GridFunction::constant(dense, 0.0, 0.0, ValueShape::scalar(), Vec{1.0});
    const LinearDelaySystem sys{dense,
                                0.0,
                                0.0,
                                1.0,
                                1,
                                1,
                                {oracle::constant_matrix(Vec{1.0})},
                                oracle::constant_vector(Vec{1.0}),
                                {oracle::shift_delay(0.0)},
                                phi};
    const Solution sol = solve_global(sys);
    const std::vector<double> pts = dense.grid(0.0, 1.0);
    double worst_solver = 0.0;
    for (double t : pts) {
        const double exact = 2.0 * std::exp(t) - 1.0;
        worst_solver = std::max(worst_solver, std::abs(sol.scalar_at(t) - exact) / exact);
    }
    PrincipalCache cache(sys);
    double worst_vop = 0.0;
    for (std::size_t j = 0; j < pts.size(); j += 50) {
        const double t = pts[j];
        const double exact = 2.0 * std::exp(t) - 1.0;
        worst_vop = std::max(worst_vop, std::abs(vop_evaluate(sys, cache, t)[0] - exact) / exact);
    }

    const TimeScale z = TimeScale::integers(0, 10);
    const GridFunction zphi = GridFunction::constant(z, 0.0, 0.0, ValueShape::scalar(), Vec{1.0});
    const LinearDelaySystem zsys{z,
                                 0.0,
                                 0.0,
                                 10.0,
                                 1,
                                 1,
                                 {oracle::constant_matrix(Vec{1.0})},
                                 oracle::constant_vector(Vec{1.0}),
                                 {oracle::shift_delay(0.0)},
                                 zphi};
    const Solution zsol = solve_global(zsys);
    const std::vector<double> zpts = z.grid(0.0, 10.0);
    const std::vector<double> want = oracle::forward_recursion_scalar(
        zpts, 1, {1.0}, {[](double) { return 1.0; }}, [](double) { return 1.0; },
        {oracle::shift_delay(0.0)});
    PrincipalCache zcache(zsys);
    double worst_z = 0.0;
    for (std::size_t j = 0; j < zpts.size(); ++j) {
        worst_z = std::max(worst_z, std::abs(zsol.scalar_at(zpts[j]) - want[j]));
        worst_z = std::max(worst_z, std::abs(vop_evaluate(zsys, zcache, zpts[j])[0] - want[j]));
    }
    detail = "dense rel err: solver " + fmtg(worst_solver) + ", representation " + fmtg(worst_vop) +
             " (tol 1e-3); discrete abs err " + fmtg(worst_z) + " (tol 1e-9)";
    return worst_solver <= 1e-3 && worst_vop <= 1e-3 && worst_z <= 1e-9;
}

bool criterion_iterate_bound(std::string& detail) {
    const TimeScale z = TimeScale::integers(-1, 8);
    const GridFunction phi = GridFunction::constant(z, -1.0, 0.0, ValueShape::scalar(), Vec{1.0});
    const DelayIVP ivp{z,
                       -1.0,
                       0.0,
                       8.0,
                       1,
                       1,
                       [](double, const std::vector<Vec>& u) {
                           return Vec{0.05 * std::sin(u[0][0])};
                       },
                       {oracle::shift_delay(1.0)},
                       phi,
                       0.05,
                       0.1,
                       10.0};
    PicardOptions opt;
    opt.tol = 1e-12;
    opt.log_iterates = true;
    const Solution sol = picard_solve(ivp, opt);
    const auto& rows = sol.diagnostics.iterate_diffs;
    const auto& grid = sol.diagnostics.iterate_grid;
    if (rows.empty() || grid.empty()) {
        detail = "no logged iterates";
        return false;
    }
    double worst_margin = 1e300;
    const int kmax = std::min<int>(6, static_cast<int>(rows.size()));
    for (int k = 1; k <= kmax; ++k)
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double bound =
                0.1 * std::pow(0.05, k - 1) * oracle::hk_iterated(z, k, grid[j], 0.0) + 1e-9;
            worst_margin = std::min(worst_margin, bound - rows[static_cast<std::size_t>(k - 1)][j]);
        }
    detail = "checked k <= " + std::to_string(kmax) +
             " against M L^(k-1) h_k(t, 0) + 1e-9; smallest margin " + fmtg(worst_margin);
    return worst_margin >= 0.0;
}

bool criterion_window_formula(std::string& detail) {
    struct Case {
        TimeScale ts;
        double beta;
        double gamma;
        double eps;
        double M;
    };
    const TimeScale quarters = TimeScale::interval(0.0, 1.0, 0.25);
    const TimeScale z5 = TimeScale::integers(0, 5);
    const TimeScale gap({Component::point(0.0), Component::interval(1.0, 2.0)}, 0.5);
    const TimeScale wide = TimeScale::interval(0.0, 2.0, 0.25);
    const TimeScale mixed({Component::point(-1.0), Component::interval(0.0, 1.0)}, 0.125);
    const std::vector<Case> cases = {
        {quarters, 0.0, 1.0, 0.5, 2.0},   {quarters, 0.0, 1.0, 10.0, 2.0},
        {z5, 0.0, 5.0, 0.5, 2.0},         {z5, 0.0, 5.0, 3.0, 2.0},
        {gap, 0.0, 2.0, 0.8, 1.0},        {gap, 0.0, 2.0, 1.0, 1.0},
        {wide, 0.75, 2.0, 1.0, 4.0},      {z5, 1.0, 5.0, 1e6, 1.0},
        {z5, 3.0, 3.0, 1.0, 1.0},         {mixed, 0.0, 1.0, 7.0, 8.0},
    };
    int checked = 0;
    for (const Case& c : cases) {
        const GridFunction phi =
            GridFunction::constant(c.ts, c.beta, c.beta, ValueShape::scalar(), Vec{0.0});
        const DelayIVP ivp{c.ts,
                           c.beta,
                           c.beta,
                           c.gamma,
                           1,
                           1,
                           [](double, const std::vector<Vec>&) { return Vec{0.0}; },
                           {oracle::shift_delay(0.0)},
                           phi,
                           std::nullopt,
                           c.M,
                           c.eps};
        const ExistenceWindow w = existence_window(ivp);
        const double want_delta = std::min(c.gamma - c.beta, c.eps / c.M);
        double want_zeta = c.beta;
        for (double s : c.ts.sample_points())
            if (s >= c.beta - 1e-12 && s <= c.beta + want_delta + 1e-12)
                want_zeta = std::max(want_zeta, s);
        if (w.delta != want_delta || w.zeta != want_zeta) {
            detail = "case " + std::to_string(checked) + ": got (delta, zeta) = (" +
                     fmtg(w.delta) + ", " + fmtg(w.zeta) + "), want (" + fmtg(want_delta) + ", " +
                     fmtg(want_zeta) + ")";
            return false;
        }
        ++checked;
    }
    detail = "delta == min{gamma - beta, eps/M} and zeta matches the grid-max oracle exactly in " +
             std::to_string(checked) + "/10 cases";
    return checked == 10;
}

bool criterion_representation(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 gen(2718);
    const TimeScale z = TimeScale::integers(-2, 10);
    double worst_discrete = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const LinearDelaySystem sys = random_linear(gen, z, -2.0, 0.0, 10.0, 1.0,
                                                    random_lags(gen, {0.0, 1.0, 2.0}));
        const RepresentationReport rep = verify_representation(sys, 1e-9);
        worst_discrete = std::max(worst_discrete, rep.sup_diff);
        if (!rep.pass) {
            detail = "discrete trial " + std::to_string(trial) + " failed with sup " +
                     fmtg(rep.sup_diff);
            return false;
        }
    }
    const TimeScale mixed({Component::interval(-1.0, -0.8), Component::point(-0.65),
                           Component::interval(-0.5, -0.3), Component::point(-0.15),
                           Component::interval(0.0, 0.2), Component::point(0.35)},
                          1e-3);
    const std::vector<std::vector<double>> mixed_lags = {
        {0.0, 1.0}, {0.5}, {0.0, 0.5}, {1.0, 0.5}, {0.0, 1.0}};
    double worst_mixed = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const LinearDelaySystem sys = random_linear(gen, mixed, -1.0, 0.0, 0.35, 1.0,
                                                    mixed_lags[static_cast<std::size_t>(trial)]);
        const RepresentationReport rep = verify_representation(sys, 1e-4);
        worst_mixed = std::max(worst_mixed, rep.sup_diff);
        if (!rep.pass) {
            detail = "mixed trial " + std::to_string(trial) + " failed with sup " +
                     fmtg(rep.sup_diff);
            return false;
        }
    }
    const double elapsed = seconds_since(start);
    detail = "sup defect: discrete " + fmtg(worst_discrete) + " (tol 1e-9), mixed " +
             fmtg(worst_mixed) + " (tol 1e-4), " + fmtg(elapsed) + "s";
    return elapsed < 60.0;
}

bool criterion_exponential(std::string& detail) {
    std::mt19937 gen(577);
    const TimeScale z = TimeScale::integers(0, 8);
    const TimeScale mixed({Component::point(0.0), Component::interval(1.0, 2.0),
                           Component::point(2.5), Component::point(3.0)},
                          0.1);
    double worst_semigroup = 0.0;
    double worst_jump = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const bool discrete = trial < 10;
        const TimeScale& ts = discrete ? z : mixed;
        const double semi_tol = discrete ? 1e-9 : 1e-5;
        ScalarFn f;
        if (trial % 2 == 0) {
            const double c = oracle::uniform(gen, -0.9, 1.5);
            f = [c](double) { return c; };
        } else {
            const double a = oracle::uniform(gen, 0.0, 1.5);
            const double b = oracle::uniform(gen, -0.5 * a, 0.5 * a);
            f = [a, b](double t) { return a + b * std::sin(t); };
        }
        const std::vector<double> g = ts.grid(ts.min(), ts.max());
        const double s = g.front();
        const double r = g[g.size() / 2];
        const double t = g.back();

        for (double at : {s, r, t})
            if (exp_function(ts, f, at, at) != 1.0) {
                detail = "e_f(s, s) != 1 at s = " + fmtg(at);
                return false;
            }

        const double whole = exp_function(ts, f, t, s);
        const double split = exp_function(ts, f, t, r) * exp_function(ts, f, r, s);
        worst_semigroup = std::max(worst_semigroup, std::abs(whole - split));
        if (std::abs(whole - split) > semi_tol) {
            detail = "semigroup defect " + fmtg(std::abs(whole - split)) + " exceeds " +
                     fmtg(semi_tol);
            return false;
        }

        const double L = 0.2 + oracle::uniform(gen, 0.0, 1.0);
        const ScalarFn fL = [L](double) { return L; };
        for (double a : g)
            for (double b : g)
                if (a <= b && exp_function(ts, fL, b, a) < 1.0) {
                    detail = "e_L(t, s) < 1 for constant L = " + fmtg(L);
                    return false;
                }

        for (double eta : g) {
            const double mu = ts.mu(eta);
            if (mu <= 0.0) continue;
            const double lhs = exp_function(ts, f, ts.sigma(eta), s);
            const double rhs = (1.0 + mu * f(eta)) * exp_function(ts, f, eta, s);
            const double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
            worst_jump = std::max(worst_jump, rel);
            if (rel > 1e-12) {
                detail = "scattered-point identity off by " + fmtg(rel) + " at t = " + fmtg(eta);
                return false;
            }
        }
    }
    detail = "20 regressive samples: e_f(s,s) == 1, semigroup defect <= " + fmtg(worst_semigroup) +
             ", e_L >= 1, jump identity defect <= " + fmtg(worst_jump);
    return true;
}

bool criterion_hk_oracles(std::string& detail) {
    const TimeScale z = TimeScale::integers(0, 12);
    double worst_z = 0.0;
    for (int k = 0; k <= 5; ++k)
        for (double s : {0.0, 3.0})
            for (double t : {5.0, 9.0, 12.0}) {
                if (t < s) continue;
                worst_z = std::max(worst_z, std::abs(hk_polynomial(z, k, t, s) -
                                                     oracle::binomial(t - s, k)));
            }

    const TimeScale dense = TimeScale::interval(0.0, 1.0, 1e-3);
    const std::vector<double> pts = dense.grid(0.0, 1.0);
    double worst_dense = 0.0;
    for (int k = 0; k <= 5; ++k)
        for (std::size_t si : {std::size_t{0}, pts.size() / 4})
            for (std::size_t ti : {pts.size() / 2, (3 * pts.size()) / 4, pts.size() - 1}) {
                const double s = pts[si];
                const double t = pts[ti];
                const double want = std::pow(t - s, k) / oracle::factorial(k);
                worst_dense = std::max(worst_dense, std::abs(hk_polynomial(dense, k, t, s) - want));
            }
    detail = "h_k vs binomial on Z: " + fmtg(worst_z) + " (tol 1e-9); vs (t-s)^k/k! sampled: " +
             fmtg(worst_dense) + " (tol 1e-4), k <= 5";
    return worst_z <= 1e-9 && worst_dense <= 1e-4;
}

bool criterion_perturbed_start(std::string& detail) {
    std::mt19937 gen(1453);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double a = oracle::uniform(gen, -0.3, 0.3);
        const double b = oracle::uniform(gen, -0.5, 0.5);
        const RhsFn rhs = [a, b](double, const std::vector<Vec>& u) {
            return Vec{a * std::sin(u[0][0]) + b};
        };
        const int kind = trial % 3;
        const TimeScale ts =
            kind == 0 ? TimeScale::integers(-1, 6)
                      : kind == 1 ? TimeScale::interval(0.0, 0.6, 0.05)
                                  : TimeScale({Component::interval(-1.0, -0.5),
                                               Component::interval(0.0, 0.5)},
                                              0.05);
        const double alpha = kind == 1 ? 0.0 : -1.0;
        const double gamma = kind == 0 ? 6.0 : kind == 1 ? 0.6 : 0.5;
        const DelayFn tau = kind == 1 ? DelayFn([](double t) { return t / 2.0; })
                                      : oracle::shift_delay(1.0);
        const GridFunction phi =
            GridFunction::constant(ts, alpha, 0.0, ValueShape::scalar(), Vec{0.5});
        const DelayIVP ivp{ts,       alpha, 0.0, gamma, 1, 1, rhs, {tau}, phi,
                           std::abs(a), std::abs(a) + std::abs(b) + 0.2, 3.0};
        const double off = 0.02 + oracle::uniform(gen, 0.0, 0.03);
        PicardOptions plain;
        PicardOptions shifted;
        shifted.start_perturbation = [off](double) { return Vec{off}; };
        if (trial == 0) {
            plain.log_iterates = true;
            shifted.log_iterates = true;
        }
        const Solution base = picard_solve(ivp, plain);
        const Solution probed = picard_solve(ivp, shifted);
        if (trial == 0) {
            const auto& ra = base.diagnostics.iterate_diffs;
            const auto& rb = probed.diagnostics.iterate_diffs;
            double first_row_gap = 0.0;
            if (!ra.empty() && !rb.empty())
                for (std::size_t j = 0; j < std::min(ra[0].size(), rb[0].size()); ++j)
                    first_row_gap = std::max(first_row_gap, std::abs(ra[0][j] - rb[0][j]));
            if (first_row_gap <= 1e-6) {
                detail = "start perturbation left the first correction unchanged";
                return false;
            }
        }
        if (base.values.size() != probed.values.size()) {
            detail = "trial " + std::to_string(trial) + ": grids differ";
            return false;
        }
        for (std::size_t j = 0; j < base.values.size(); ++j)
            worst = std::max(worst, std::abs(base.values.at_index(j)[0] -
                                             probed.values.at_index(j)[0]));
    }
    detail = "sup |canonical - perturbed-start| = " + fmtg(worst) + " over 10 runs (tol 1e-9)";
    return worst <= 10.0 * 1e-10;
}

bool criterion_partition(std::string& detail) {
    std::mt19937 gen(8128);
    int cells_checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const double M1 = oracle::uniform(gen, 0.2, 3.0);
        const double width = 1.0 / (2.0 * M1);
        const double len1 = width * oracle::uniform(gen, 1.0, 3.0);
        const double jump = width * oracle::uniform(gen, 0.2, 3.0);
        const double len2 = width * oracle::uniform(gen, 1.0, 3.0);
        const double step = width * oracle::uniform(gen, 0.3, 0.85);
        const double gamma = len1 + jump + len2;
        const TimeScale ts({Component::interval(0.0, len1),
                            Component::interval(len1 + jump, gamma)},
                           step);
        const GridFunction phi =
            GridFunction::constant(ts, 0.0, 0.0, ValueShape::scalar(), Vec{1.0});
        const LinearDelaySystem sys{ts,
                                    0.0,
                                    0.0,
                                    ts.max(),
                                    1,
                                    1,
                                    {oracle::constant_matrix(Vec{0.5})},
                                    oracle::constant_vector(Vec{0.0}),
                                    {oracle::shift_delay(0.0)},
                                    phi};
        const std::vector<double> part = make_partition(sys, M1);
        if (part.front() != 0.0 || part.back() != ts.max()) {
            detail = "trial " + std::to_string(trial) + ": endpoints are not beta and gamma";
            return false;
        }
        for (std::size_t j = 0; j + 1 < part.size(); ++j) {
            const double cell_a = part[j];
            const double cell_b = part[j + 1];
            const bool jump_cell = ts.mu(cell_a) > width && cell_b == ts.sigma(cell_a);
            const bool capped = cell_b - cell_a <= width + 1e-12;
            if (!jump_cell && !capped) {
                detail = "trial " + std::to_string(trial) + ": cell [" + fmtg(cell_a) + ", " +
                         fmtg(cell_b) + "] is neither a jump nor within 1/(2 M1) = " + fmtg(width);
                return false;
            }
            ++cells_checked;
        }
    }
    detail = std::to_string(cells_checked) +
             " cells over 12 random partitions are each a single wide jump or capped at 1/(2 M1)";
    return cells_checked > 0;
}

struct CliCapture {
    int code = -1;
    std::string out;
};

CliCapture run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
    std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
    CliCapture r;
    try {
        r.code = run_command(args);
    } catch (...) {
        std::cout.rdbuf(old_out);
        std::cerr.rdbuf(old_err);
        throw;
    }
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    r.out = out.str();
    return r;
}

bool criterion_cli(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path();
    const fs::path good = dir / "tsdelay_acceptance_fib.cfg";
    {
        std::ofstream f(good, std::ios::binary);
        f << "[timescale]\ncomponents = integers(-1, 20)\n\n[problem]\nkind = linear\ndim = 1\n"
             "alpha = -1\nbeta = 0\ngamma = 20\n\n[delays]\ntau1 = t - 1\n\n[linear]\np1 = 1\n\n"
             "[history]\nphi = 1\n";
    }
    const CliCapture solved = run_cli({"solve", good.string()});
    if (solved.code != 0) {
        detail = "solve exited with " + std::to_string(solved.code);
        return false;
    }
    std::vector<std::string> rows;
    {
        std::istringstream in(solved.out);
        std::string line;
        while (std::getline(in, line)) rows.push_back(line);
    }
    std::vector<std::string> want{"t,x1"};
    long long prev2 = 1;
    long long prev1 = 1;
    want.push_back("-1,1");
    want.push_back("0,1");
    for (int t = 1; t <= 20; ++t) {
        const long long cur = prev1 + prev2;
        want.push_back(std::to_string(t) + "," + std::to_string(cur));
        prev2 = prev1;
        prev1 = cur;
    }
    if (rows != want) {
        detail = "CSV does not list the delayed-recurrence values exactly";
        return false;
    }

    const fs::path garbage = dir / "tsdelay_acceptance_garbage.cfg";
    {
        std::ofstream f(garbage, std::ios::binary);
        f << "hello\n";
    }
    const fs::path future = dir / "tsdelay_acceptance_future.cfg";
    {
        std::ofstream f(future, std::ios::binary);
        f << "[timescale]\ncomponents = integers(-1, 5)\n\n[problem]\nkind = linear\ndim = 1\n"
             "alpha = -1\nbeta = 0\ngamma = 5\n\n[delays]\ntau1 = t + 1\n\n[linear]\np1 = 1\n\n"
             "[history]\nphi = 1\n";
    }
    const int bad1 = run_cli({"solve", garbage.string()}).code;
    const int bad2 = run_cli({"solve", future.string()}).code;
    const int bad3 = run_cli({"solve", (dir / "tsdelay_acceptance_missing.cfg").string()}).code;
    detail = "fibonacci CSV exact through t = 20 (x(20) = " + std::to_string(prev1) +
             "); malformed specs exited " + std::to_string(bad1) + "/" + std::to_string(bad2) +
             "/" + std::to_string(bad3);
    return bad1 == 1 && bad2 == 1 && bad3 == 1;
}

int run(int number, const char* title, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("unexpected exception: ") + e.what();
        ok = false;
    }
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, title,
                detail.empty() ? "" : " -- ", detail.c_str());
    return ok ? 0 : 1;
}

}  // namespace

int main() {
    int failures = 0;
    failures += run(1, "discrete solves match an independent forward recursion",
                    criterion_discrete_oracle);
    failures += run(2, "constant-coefficient ordinary problem matches its closed form",
                    criterion_ordinary_closed_form);
    failures += run(3, "logged Picard corrections obey the a priori bound", criterion_iterate_bound);
    failures += run(4, "existence window matches the formula and the grid-max oracle",
                    criterion_window_formula);
    failures += run(5, "representation formula verifies on random systems",
                    criterion_representation);
    failures += run(6, "exponential properties hold for random regressive coefficients",
                    criterion_exponential);
    failures += run(7, "generalized monomials match binomials and power series",
                    criterion_hk_oracles);
    failures += run(8, "perturbed-start runs land on the same fixed point",
                    criterion_perturbed_start);
    failures += run(9, "partition cells are single jumps or capped by the contraction width",
                    criterion_partition);
    failures += run(10, "CLI solves the delayed recurrence end to end", criterion_cli);
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
