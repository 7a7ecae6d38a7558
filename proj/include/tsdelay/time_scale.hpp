#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "tsdelay/errors.hpp"
#include "tsdelay/linalg.hpp"

namespace tsdelay {

/// Absolute tolerance for membership tests and canonical grid-point snapping.
inline constexpr double kMembershipTol = 1e-12;
/// Looser tolerance used when matching externally supplied times (delay values,
/// config anchors) against the sampling grid.
inline constexpr double kLookupTol = 1e-9;

/// One building block of a time scale: a closed interval [lo,hi] with lo < hi,
/// or an isolated point (lo == hi).
struct Component {
    double lo = 0.0;
    double hi = 0.0;

    static Component interval(double a, double b);
    static Component point(double t);

    bool is_point() const noexcept { return lo == hi; }
    double length() const noexcept { return hi - lo; }
};

enum class SideClass { Dense, Scattered, Boundary };

const char* side_class_name(SideClass s);

/// Two-sided classification of a point. The right side is Boundary at the scale
/// maximum, Scattered when sigma(t) > t, Dense otherwise; left side mirrors with rho.
struct PointClass {
    SideClass left = SideClass::Dense;
    SideClass right = SideClass::Dense;

    bool right_scattered() const noexcept { return right == SideClass::Scattered; }
    bool right_dense() const noexcept { return right == SideClass::Dense; }
    bool left_scattered() const noexcept { return left == SideClass::Scattered; }
    bool left_dense() const noexcept { return left == SideClass::Dense; }
    bool isolated() const noexcept {
        return left == SideClass::Scattered && right == SideClass::Scattered;
    }
};

/// A nonempty closed subset of R given as finitely many disjoint closed intervals
/// and isolated points, together with the uniform sampling resolution used to
/// discretize the interval components.
///
/// Construction normalizes: components are sorted, touching components are merged,
/// genuinely overlapping ones are rejected. The sampling grid contains every
/// component endpoint and isolated point; each interval is subdivided uniformly
/// with spacing <= dense_step.
class TimeScale {
public:
    TimeScale(std::vector<Component> components, double dense_step);

    /// The integer window {lo, lo+1, ..., hi}. dense_step is irrelevant for a purely
    /// isolated scale but still recorded (it feeds the delay snap distance check).
    static TimeScale integers(long lo, long hi, double dense_step = 1.0);
    static TimeScale interval(double a, double b, double dense_step);

    const std::vector<Component>& components() const noexcept { return components_; }
    double dense_step() const noexcept { return dense_step_; }
    double min() const noexcept { return components_.front().lo; }
    double max() const noexcept { return components_.back().hi; }

    bool contains(double t) const;

    /// Forward jump: least member >= t among points > t, or t itself at the maximum
    /// and inside interval components.
    double sigma(double t) const;
    /// Backward jump, mirror of sigma.
    double rho(double t) const;
    /// Graininess sigma(t) - t: exactly 0.0 at right-dense points and the maximum.
    double mu(double t) const;
    PointClass classify(double t) const;

    /// All sample points of [a,b] in increasing order; first == a, last == b.
    std::vector<double> grid(double a, double b) const;

    /// [a,b] with a left-scattered maximum removed: (a, rho(b)) in that case,
    /// (a, b) otherwise.
    std::pair<double, double> kappa_truncate(double a, double b) const;

    /// Full sampling grid from min() to max().
    const std::vector<double>& sample_points() const noexcept { return samples_; }

    /// Index of the sample within kLookupTol of t; NotInTimescale otherwise.
    std::size_t sample_index(double t) const;

    /// Largest sample <= t + kLookupTol. Fails with Snap if none exists or the
    /// gap back to it exceeds dense_step. This is the delay snapping rule.
    double snap_down(double t) const;

    bool is_sample(double t) const;

    /// True when every point of [a,b) is right-scattered (no dense stretch).
    bool purely_isolated(double a, double b) const;

private:
    struct Location {
        std::size_t component;
        double canonical;   // t snapped onto the component structure
        bool at_lo;
        bool at_hi;
    };
    Location locate(double t) const; // throws NotInTimescale

    std::vector<Component> components_;
    double dense_step_;
    std::vector<double> samples_;
};

/// Shape tag for grid-function values: scalar, vector in R^d, or d x d matrix
/// (stored flat, row-major).
struct ValueShape {
    enum class Kind { Scalar, Vector, Matrix };

    Kind kind = Kind::Scalar;
    int dim = 1;

    static ValueShape scalar() { return {Kind::Scalar, 1}; }
    static ValueShape vector(int d) { return {Kind::Vector, d}; }
    static ValueShape matrix(int d) { return {Kind::Matrix, d}; }

    int flat_size() const noexcept {
        return kind == Kind::Matrix ? dim * dim : (kind == Kind::Vector ? dim : 1);
    }
    bool operator==(const ValueShape&) const = default;
};

/// A function known at exactly the sample points of a closed sub-window [lo,hi]
/// of its time scale. Values share one shape.
class GridFunction {
public:
    GridFunction(TimeScale ts, double lo, double hi, ValueShape shape,
                 std::vector<Vec> values);

    static GridFunction sample(const TimeScale& ts, double lo, double hi, ValueShape shape,
                               const std::function<Vec(double)>& fn);
    static GridFunction sample_scalar(const TimeScale& ts, double lo, double hi,
                                      const std::function<double(double)>& fn);
    static GridFunction constant(const TimeScale& ts, double lo, double hi,
                                 ValueShape shape, Vec value);

    const TimeScale& timescale() const noexcept { return ts_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    const ValueShape& shape() const noexcept { return shape_; }
    const std::vector<double>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

    std::size_t index_of(double t) const; // throws OutOfDomain
    const Vec& at_index(std::size_t i) const { return values_[i]; }
    const Vec& at(double t) const { return values_[index_of(t)]; }
    double scalar_at(double t) const { return values_[index_of(t)][0]; }

private:
    TimeScale ts_;
    double lo_;
    double hi_;
    ValueShape shape_;
    std::vector<double> points_;
    std::vector<Vec> values_;
};

} // namespace tsdelay
