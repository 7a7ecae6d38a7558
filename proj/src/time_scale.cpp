#include "tsdelay/time_scale.hpp"

#include <algorithm>
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

} // namespace

Component Component::interval(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        fail(ErrorCode::Overlap, "component bounds must be finite");
    if (a > b) fail(ErrorCode::Overlap, "interval bounds out of order: [" + fmt(a) + "," + fmt(b) + "]");
    return Component{a, b}; // a == b degenerates to a point
}

Component Component::point(double t) {
    if (!std::isfinite(t)) fail(ErrorCode::Overlap, "point component must be finite");
    return Component{t, t};
}

const char* side_class_name(SideClass s) {
    switch (s) {
        case SideClass::Dense: return "dense";
        case SideClass::Scattered: return "scattered";
        case SideClass::Boundary: return "boundary";
    }
    return "?";
}

TimeScale::TimeScale(std::vector<Component> components, double dense_step)
    : dense_step_(dense_step) {
    if (components.empty()) fail(ErrorCode::Overlap, "a time scale needs at least one component");
    if (!(dense_step > 0.0) || !std::isfinite(dense_step))
        fail(ErrorCode::Step, "dense_step must be a positive real, got " + fmt(dense_step));

    std::sort(components.begin(), components.end(), [](const Component& a, const Component& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });

    for (const Component& c : components) {
        if (!(c.lo <= c.hi)) fail(ErrorCode::Overlap, "component bounds out of order");
        if (components_.empty()) {
            components_.push_back(c);
            continue;
        }
        Component& prev = components_.back();
        if (c.lo < prev.hi - kMembershipTol) {
            fail(ErrorCode::Overlap, "components overlap near t = " + fmt(c.lo));
        } else if (c.lo <= prev.hi + kMembershipTol) {
            prev.hi = std::max(prev.hi, c.hi); // touching: merge
        } else {
            components_.push_back(c);
        }
    }

    for (const Component& c : components_) {
        if (!c.is_point() && dense_step_ > c.length() + kMembershipTol)
            fail(ErrorCode::Step, "dense_step " + fmt(dense_step_) + " exceeds interval length " +
                                      fmt(c.length()));
    }

    // Sampling grid: isolated points verbatim; intervals subdivided uniformly with
    // the largest spacing <= dense_step that divides the length evenly.
    for (const Component& c : components_) {
        if (c.is_point()) {
            samples_.push_back(c.lo);
            continue;
        }
        const double len = c.length();
        const long n = std::max(1L, static_cast<long>(std::ceil(len / dense_step_ - 1e-9)));
        const double h = len / static_cast<double>(n);
        for (long j = 0; j < n; ++j) samples_.push_back(c.lo + static_cast<double>(j) * h);
        samples_.push_back(c.hi);
    }
}

TimeScale TimeScale::integers(long lo, long hi, double dense_step) {
    if (lo > hi) fail(ErrorCode::Overlap, "integer window bounds out of order");
    std::vector<Component> comps;
    comps.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long t = lo; t <= hi; ++t) comps.push_back(Component::point(static_cast<double>(t)));
    return TimeScale(std::move(comps), dense_step);
}

TimeScale TimeScale::interval(double a, double b, double dense_step) {
    return TimeScale({Component::interval(a, b)}, dense_step);
}

bool TimeScale::contains(double t) const {
    if (!std::isfinite(t)) return false;
    auto it = std::upper_bound(components_.begin(), components_.end(), t,
                               [](double v, const Component& c) { return v < c.lo; });
    if (it != components_.begin()) {
        const Component& c = *(it - 1);
        if (t <= c.hi + kMembershipTol) return true;
    }
    if (it != components_.end() && t >= it->lo - kMembershipTol) return true;
    return false;
}

TimeScale::Location TimeScale::locate(double t) const {
    auto it = std::upper_bound(components_.begin(), components_.end(), t,
                               [](double v, const Component& c) { return v < c.lo; });
    std::size_t idx;
    if (it != components_.begin() && t <= (it - 1)->hi + kMembershipTol) {
        idx = static_cast<std::size_t>((it - 1) - components_.begin());
    } else if (it != components_.end() && t >= it->lo - kMembershipTol) {
        idx = static_cast<std::size_t>(it - components_.begin());
    } else {
        fail(ErrorCode::NotInTimescale, "t = " + fmt(t) + " is not in the time scale");
    }
    const Component& c = components_[idx];
    Location loc;
    loc.component = idx;
    loc.at_lo = std::abs(t - c.lo) <= kMembershipTol;
    loc.at_hi = std::abs(t - c.hi) <= kMembershipTol;
    loc.canonical = loc.at_lo ? c.lo : (loc.at_hi ? c.hi : t);
    return loc;
}

double TimeScale::sigma(double t) const {
    const Location loc = locate(t);
    const Component& c = components_[loc.component];
    if (!c.is_point() && !loc.at_hi) return loc.canonical; // right-dense
    if (loc.component + 1 < components_.size()) return components_[loc.component + 1].lo;
    return loc.canonical; // maximum
}

double TimeScale::rho(double t) const {
    const Location loc = locate(t);
    const Component& c = components_[loc.component];
    if (!c.is_point() && !loc.at_lo) return loc.canonical; // left-dense
    if (loc.component > 0) return components_[loc.component - 1].hi;
    return loc.canonical; // minimum
}

double TimeScale::mu(double t) const {
    const Location loc = locate(t);
    const Component& c = components_[loc.component];
    if (!c.is_point() && !loc.at_hi) return 0.0;
    if (loc.component + 1 < components_.size())
        return components_[loc.component + 1].lo - loc.canonical;
    return 0.0;
}

PointClass TimeScale::classify(double t) const {
    const Location loc = locate(t);
    const Component& c = components_[loc.component];
    PointClass pc;
    if (loc.component == 0 && loc.at_lo) {
        pc.left = SideClass::Boundary;
    } else if (c.is_point() || loc.at_lo) {
        pc.left = SideClass::Scattered;
    } else {
        pc.left = SideClass::Dense;
    }
    if (loc.component + 1 == components_.size() && loc.at_hi) {
        pc.right = SideClass::Boundary;
    } else if (c.is_point() || loc.at_hi) {
        pc.right = SideClass::Scattered;
    } else {
        pc.right = SideClass::Dense;
    }
    return pc;
}

std::vector<double> TimeScale::grid(double a, double b) const {
    if (a > b + kMembershipTol)
        fail(ErrorCode::EmptyInterval, "grid bounds out of order: a = " + fmt(a) + ", b = " + fmt(b));
    const double ca = locate(a).canonical;
    const double cb = locate(b).canonical;
    std::vector<double> out;
    auto lo = std::lower_bound(samples_.begin(), samples_.end(), ca - kMembershipTol);
    auto hi = std::upper_bound(samples_.begin(), samples_.end(), cb + kMembershipTol);
    out.assign(lo, hi);
    if (out.empty() || std::abs(out.front() - ca) > kMembershipTol) out.insert(out.begin(), ca);
    if (std::abs(out.back() - cb) > kMembershipTol) out.push_back(cb);
    return out;
}

std::pair<double, double> TimeScale::kappa_truncate(double a, double b) const {
    const double ca = locate(a).canonical;
    const double cb = locate(b).canonical;
    if (ca > cb + kMembershipTol) fail(ErrorCode::EmptyInterval, "kappa bounds out of order");
    if (std::abs(ca - cb) <= kMembershipTol) return {ca, cb};
    const double r = rho(cb);
    if (r < cb - kMembershipTol) return {ca, std::max(ca, r)};
    return {ca, cb};
}

std::size_t TimeScale::sample_index(double t) const {
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t);
    std::size_t best = samples_.size();
    double dist = kLookupTol;
    if (it != samples_.end() && std::abs(*it - t) <= dist) {
        best = static_cast<std::size_t>(it - samples_.begin());
        dist = std::abs(*it - t);
    }
    if (it != samples_.begin() && std::abs(*(it - 1) - t) <= dist) {
        best = static_cast<std::size_t>((it - 1) - samples_.begin());
    }
    if (best == samples_.size())
        fail(ErrorCode::NotInTimescale, "t = " + fmt(t) + " is not a sample point");
    return best;
}

double TimeScale::snap_down(double t) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t + kLookupTol);
    if (it == samples_.begin())
        fail(ErrorCode::Snap, "no grid point at or below t = " + fmt(t));
    const double g = *(it - 1);
    if (t - g > dense_step_ + kLookupTol)
        fail(ErrorCode::Snap, "nearest grid point below t = " + fmt(t) + " is " + fmt(g) +
                                  ", farther than dense_step");
    return g;
}

bool TimeScale::is_sample(double t) const {
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t - kLookupTol);
    return it != samples_.end() && std::abs(*it - t) <= kLookupTol;
}

bool TimeScale::purely_isolated(double a, double b) const {
    for (double p : grid(a, b)) {
        if (p >= b - kMembershipTol) break;
        if (mu(p) <= 0.0) return false;
    }
    return true;
}

GridFunction::GridFunction(TimeScale ts, double lo, double hi, ValueShape shape,
                           std::vector<Vec> values)
    : ts_(std::move(ts)), lo_(lo), hi_(hi), shape_(shape) {
    points_ = ts_.grid(lo, hi);
    lo_ = points_.front();
    hi_ = points_.back();
    if (values.size() != points_.size())
        fail(ErrorCode::Domain, "grid function needs one value per sample point (" +
                                    std::to_string(points_.size()) + " expected, " +
                                    std::to_string(values.size()) + " given)");
    const std::size_t want = static_cast<std::size_t>(shape_.flat_size());
    for (const Vec& v : values)
        if (v.size() != want)
            fail(ErrorCode::Domain, "grid function value has wrong flat size");
    values_ = std::move(values);
}

GridFunction GridFunction::sample(const TimeScale& ts, double lo, double hi, ValueShape shape,
                                  const std::function<Vec(double)>& fn) {
    std::vector<Vec> vals;
    for (double t : ts.grid(lo, hi)) vals.push_back(fn(t));
    return GridFunction(ts, lo, hi, shape, std::move(vals));
}

GridFunction GridFunction::sample_scalar(const TimeScale& ts, double lo, double hi,
                                         const std::function<double(double)>& fn) {
    return sample(ts, lo, hi, ValueShape::scalar(), [&fn](double t) { return Vec{fn(t)}; });
}

GridFunction GridFunction::constant(const TimeScale& ts, double lo, double hi, ValueShape shape,
                                    Vec value) {
    std::vector<Vec> vals(ts.grid(lo, hi).size(), value);
    return GridFunction(ts, lo, hi, shape, std::move(vals));
}

std::size_t GridFunction::index_of(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    std::size_t best = points_.size();
    double dist = kLookupTol;
    if (it != points_.end() && std::abs(*it - t) <= dist) {
        best = static_cast<std::size_t>(it - points_.begin());
        dist = std::abs(*it - t);
    }
    if (it != points_.begin() && std::abs(*(it - 1) - t) <= dist) {
        best = static_cast<std::size_t>((it - 1) - points_.begin());
    }
    if (best == points_.size())
        fail(ErrorCode::OutOfDomain, "t = " + fmt(t) + " is not a sample point of the domain [" +
                                         fmt(lo_) + "," + fmt(hi_) + "]");
    return best;
}

} // namespace tsdelay
