#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

// Small dense helpers for the state space R^d with the max norm. States are
// std::vector<double>; matrices are flat row-major d*d vectors. Dimensions stay
// tiny here, so no linear-algebra library is pulled in.

namespace tsdelay {

using Vec = std::vector<double>;

inline double max_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Operator norm induced by the max norm: maximum absolute row sum.
inline double max_row_sum_norm(const Vec& m, int d) {
    double best = 0.0;
    for (int r = 0; r < d; ++r) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += std::abs(m[static_cast<std::size_t>(r) * d + c]);
        best = std::max(best, s);
    }
    return best;
}

inline Vec mat_vec(const Vec& m, const Vec& x, int d) {
    Vec out(static_cast<std::size_t>(d), 0.0);
    for (int r = 0; r < d; ++r) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += m[static_cast<std::size_t>(r) * d + c] * x[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = s;
    }
    return out;
}

inline Vec add(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Vec sub(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline Vec scaled(Vec a, double s) {
    for (double& x : a) x *= s;
    return a;
}

inline double max_norm_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace tsdelay
