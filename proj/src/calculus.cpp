#include "tsdelay/calculus.hpp"

#include <cmath>
#include <sstream>

namespace tsdelay {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool gaps_match(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)); }

} // namespace

const char* regressivity_class_name(RegressivityClass c) {
    switch (c) {
        case RegressivityClass::Regressive: return "Regressive";
        case RegressivityClass::PositivelyRegressive: return "PositivelyRegressive";
        case RegressivityClass::NegativelyRegressive: return "NegativelyRegressive";
        case RegressivityClass::NotRegressive: return "NotRegressive";
    }
    return "?";
}

Vec delta_derivative(const GridFunction& f, double t) {
    const TimeScale& ts = f.timescale();
    const std::size_t i = f.index_of(t);
    const std::vector<double>& pts = f.points();
    const std::size_t last = pts.size() - 1;
    const double ct = pts[i];
    const int width = f.shape().flat_size();
    const double m = ts.mu(ct);

    if (m > 0.0) {
        // Right-scattered: the derivative is the exact forward quotient. The next
        // sample is sigma(t) by grid construction; if the domain stops at t the
        // quotient has no data to use.
        if (i == last)
            fail(ErrorCode::KappaViolation,
                 "delta derivative undefined at the left-scattered maximum t = " + fmt(ct));
        Vec out(static_cast<std::size_t>(width));
        const Vec& here = f.at_index(i);
        const Vec& next = f.at_index(i + 1);
        for (int c = 0; c < width; ++c)
            out[static_cast<std::size_t>(c)] =
                (next[static_cast<std::size_t>(c)] - here[static_cast<std::size_t>(c)]) / m;
        return out;
    }

    // Right-dense: finite differences on the local uniform spacing.
    const bool have_prev = i > 0 && ts.classify(ct).left == SideClass::Dense;
    const bool have_next = i < last; // mu == 0 guarantees the scale continues densely
    Vec out(static_cast<std::size_t>(width), 0.0);

    if (have_next && have_prev) {
        const double hl = pts[i] - pts[i - 1];
        const double hr = pts[i + 1] - pts[i];
        if (gaps_match(hl, hr)) {
            for (int c = 0; c < width; ++c)
                out[static_cast<std::size_t>(c)] = (f.at_index(i + 1)[static_cast<std::size_t>(c)] -
                                                    f.at_index(i - 1)[static_cast<std::size_t>(c)]) /
                                                   (hl + hr);
            return out;
        }
    }
    if (have_next) {
        const double h = pts[i + 1] - pts[i];
        if (i + 2 <= last && gaps_match(pts[i + 2] - pts[i + 1], h)) {
            for (int c = 0; c < width; ++c) {
                const double f0 = f.at_index(i)[static_cast<std::size_t>(c)];
                const double f1 = f.at_index(i + 1)[static_cast<std::size_t>(c)];
                const double f2 = f.at_index(i + 2)[static_cast<std::size_t>(c)];
                out[static_cast<std::size_t>(c)] = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
            }
        } else {
            for (int c = 0; c < width; ++c)
                out[static_cast<std::size_t>(c)] = (f.at_index(i + 1)[static_cast<std::size_t>(c)] -
                                                    f.at_index(i)[static_cast<std::size_t>(c)]) /
                                                   h;
        }
        return out;
    }
    if (have_prev) {
        const double h = pts[i] - pts[i - 1];
        if (i >= 2 && gaps_match(pts[i - 1] - pts[i - 2], h) &&
            ts.classify(pts[i - 1]).left == SideClass::Dense) {
            for (int c = 0; c < width; ++c) {
                const double f0 = f.at_index(i)[static_cast<std::size_t>(c)];
                const double f1 = f.at_index(i - 1)[static_cast<std::size_t>(c)];
                const double f2 = f.at_index(i - 2)[static_cast<std::size_t>(c)];
                out[static_cast<std::size_t>(c)] = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h);
            }
        } else {
            for (int c = 0; c < width; ++c)
                out[static_cast<std::size_t>(c)] = (f.at_index(i)[static_cast<std::size_t>(c)] -
                                                    f.at_index(i - 1)[static_cast<std::size_t>(c)]) /
                                                   h;
        }
        return out;
    }
    if (i == last && i > 0)
        fail(ErrorCode::KappaViolation,
             "delta derivative undefined at the left-scattered maximum t = " + fmt(ct));
    fail(ErrorCode::Domain, "cannot differentiate a single-point grid function");
}

double delta_derivative_scalar(const GridFunction& f, double t) {
    return delta_derivative(f, t)[0];
}

std::vector<Vec> cumulative_delta_integral(const TimeScale& ts, const std::vector<double>& pts,
                                           const std::vector<Vec>& values) {
    const std::size_t width = values.empty() ? 0 : values[0].size();
    std::vector<Vec> out(pts.size(), Vec(width, 0.0));
    Vec run(width, 0.0);
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double m = ts.mu(pts[j]);
        if (m > 0.0) {
            for (std::size_t c = 0; c < width; ++c) run[c] += m * values[j][c];
        } else {
            const double h = pts[j + 1] - pts[j];
            for (std::size_t c = 0; c < width; ++c)
                run[c] += 0.5 * h * (values[j][c] + values[j + 1][c]);
        }
        out[j + 1] = run;
    }
    return out;
}

Vec delta_integral(const GridFunction& f, double s, double t) {
    if (s > t + kMembershipTol)
        fail(ErrorCode::OutOfDomain, "integration bounds out of order: s = " + fmt(s) +
                                         ", t = " + fmt(t));
    const std::size_t is = f.index_of(s);
    const std::size_t it = f.index_of(t);
    const TimeScale& ts = f.timescale();
    const std::size_t width = static_cast<std::size_t>(f.shape().flat_size());
    Vec run(width, 0.0);
    for (std::size_t j = is; j < it; ++j) {
        const double p = f.points()[j];
        const double m = ts.mu(p);
        if (m > 0.0) {
            for (std::size_t c = 0; c < width; ++c) run[c] += m * f.at_index(j)[c];
        } else {
            const double h = f.points()[j + 1] - p;
            for (std::size_t c = 0; c < width; ++c)
                run[c] += 0.5 * h * (f.at_index(j)[c] + f.at_index(j + 1)[c]);
        }
    }
    return run;
}

double delta_integral_scalar(const GridFunction& f, double s, double t) {
    return delta_integral(f, s, t)[0];
}

double hk_polynomial(const TimeScale& ts, int k, double t, double s) {
    if (k < 0) fail(ErrorCode::Domain, "hk_polynomial needs k >= 0");
    if (t < s - kMembershipTol)
        fail(ErrorCode::OutOfDomain, "hk_polynomial needs t >= s");
    if (k == 0) return 1.0;
    const std::vector<double> pts = ts.grid(s, t);
    std::vector<Vec> level(pts.size(), Vec{1.0});
    for (int j = 1; j <= k; ++j) level = cumulative_delta_integral(ts, pts, level);
    return level.back()[0];
}

double cylinder(double h, double z) {
    if (h < 0.0) fail(ErrorCode::Domain, "cylinder transform needs h >= 0");
    if (h == 0.0) return z;
    const double w = 1.0 + h * z;
    if (w <= 0.0)
        fail(ErrorCode::Branch, "cylinder transform has no real value: 1 + h z = " + fmt(w));
    return std::log(w) / h;
}

double exp_function(const TimeScale& ts, const std::function<double(double)>& f, double t,
                    double s) {
    if (t == s) return 1.0;
    if (t < s) fail(ErrorCode::OutOfDomain, "exp_function needs t >= s");
    const std::vector<double> pts = ts.grid(s, t);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double m = ts.mu(pts[j]);
        if (m > 0.0) {
            const double w = 1.0 + m * f(pts[j]);
            if (w <= kMembershipTol)
                fail(ErrorCode::Regressivity, "f leaves the positively regressive class at t = " +
                                                  fmt(pts[j]) + " (1 + mu f = " + fmt(w) + ")");
            acc += m * cylinder(m, f(pts[j]));
        } else {
            const double h = pts[j + 1] - pts[j];
            acc += 0.5 * h * (f(pts[j]) + f(pts[j + 1])); // cylinder is the identity at h = 0
        }
    }
    return std::exp(acc);
}

double exp_function(const GridFunction& f, double t, double s) {
    return exp_function(
        f.timescale(), [&f](double u) { return f.scalar_at(u); }, t, s);
}

RegressivityClass regressivity_class(const TimeScale& ts, const std::function<double(double)>& f,
                                     double a, double b) {
    const auto [ka, kb] = ts.kappa_truncate(a, b);
    bool pos = false;
    bool neg = false;
    for (double u : ts.grid(ka, kb)) {
        const double w = 1.0 + ts.mu(u) * f(u);
        if (std::abs(w) < 1e-12) return RegressivityClass::NotRegressive;
        (w > 0.0 ? pos : neg) = true;
    }
    if (pos && neg) return RegressivityClass::Regressive;
    return neg ? RegressivityClass::NegativelyRegressive : RegressivityClass::PositivelyRegressive;
}

RegressivityClass regressivity_class(const GridFunction& f, double a, double b) {
    return regressivity_class(
        f.timescale(), [&f](double u) { return f.scalar_at(u); }, a, b);
}

} // namespace tsdelay
