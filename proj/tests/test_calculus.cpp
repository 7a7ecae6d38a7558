#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "support/checks.hpp"
#include "support/oracles.hpp"
#include "tsdelay/calculus.hpp"
#include "tsdelay/time_scale.hpp"

using namespace tsdelay;

namespace {

TimeScale interval_plus_point() {
    return TimeScale({Component::interval(0.0, 1.0), Component::point(2.0)}, 0.5);
}

TimeScale mixed_scale() {
    return TimeScale({Component::interval(0.0, 1.0), Component::point(2.0),
                      Component::interval(3.0, 4.0)},
                     0.5);
}

}  // namespace

TEST_CASE("delta derivative is the forward quotient at right-scattered points") {
    const TimeScale z = TimeScale::integers(0, 5);
    const GridFunction f = GridFunction::sample_scalar(z, 0.0, 5.0, [](double t) { return t * t; });
    CHECK(delta_derivative_scalar(f, 2.0) == 5.0);
    CHECK(delta_derivative_scalar(f, 0.0) == 1.0);
    const GridFunction vec = GridFunction::sample(z, 0.0, 5.0, ValueShape::vector(2),
                                                  [](double t) { return Vec{t * t, 3.0 * t}; });
    const Vec d2 = delta_derivative(vec, 2.0);
    CHECK(d2 == Vec{5.0, 3.0});
}

TEST_CASE("delta derivative uses second order stencils on dense stretches") {
    const TimeScale dense = TimeScale::interval(0.0, 1.0, 1e-3);
    const GridFunction f =
        GridFunction::sample_scalar(dense, 0.0, 1.0, [](double t) { return t * t; });
    CHECK(delta_derivative_scalar(f, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(delta_derivative_scalar(f, 0.0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(delta_derivative_scalar(f, 1.0) == doctest::Approx(2.0).epsilon(1e-6));
    const GridFunction c = GridFunction::constant(dense, 0.0, 1.0, ValueShape::scalar(), Vec{7.0});
    CHECK(delta_derivative_scalar(c, 0.25) == 0.0);
}

TEST_CASE("delta derivative refuses a left-scattered maximum") {
    const TimeScale ts = interval_plus_point();
    const GridFunction f = GridFunction::sample_scalar(ts, 0.0, 2.0, [](double t) { return t; });
    CHECK(delta_derivative_scalar(f, 1.0) == 1.0);
    CHECK_FAILS(delta_derivative_scalar(f, 2.0), ErrorCode::KappaViolation);
}

TEST_CASE("delta integral applies the step rule at jumps and trapezoids on dense pairs") {
    const TimeScale ts = interval_plus_point();
    const GridFunction one = GridFunction::constant(ts, 0.0, 2.0, ValueShape::scalar(), Vec{1.0});
    CHECK(delta_integral_scalar(one, 0.0, 2.0) == 2.0);
    const TimeScale z = TimeScale::integers(0, 5);
    const GridFunction id = GridFunction::sample_scalar(z, 0.0, 5.0, [](double t) { return t; });
    CHECK(delta_integral_scalar(id, 0.0, 4.0) == 6.0);
    CHECK(delta_integral_scalar(id, 3.0, 3.0) == 0.0);
    CHECK_FAILS(delta_integral_scalar(id, 4.0, 0.0), ErrorCode::OutOfDomain);
}

TEST_CASE("delta integral of a smooth function converges on dense stretches") {
    const TimeScale dense = TimeScale::interval(0.0, 1.0, 1e-3);
    const GridFunction f =
        GridFunction::sample_scalar(dense, 0.0, 1.0, [](double t) { return std::cos(t); });
    CHECK(delta_integral_scalar(f, 0.0, 1.0) == doctest::Approx(std::sin(1.0)).epsilon(1e-6));
}

TEST_CASE("integrating a derivative recovers differences, and vice versa") {
    const TimeScale z = TimeScale::integers(0, 6);
    const GridFunction f = GridFunction::sample_scalar(z, 0.0, 6.0, [](double t) { return t; });
    const std::vector<double> pts = z.grid(0.0, 6.0);
    std::vector<Vec> vals;
    for (double t : pts) vals.push_back(Vec{t});
    const std::vector<Vec> cum = cumulative_delta_integral(z, pts, vals);
    REQUIRE(cum.size() == pts.size());
    CHECK(cum.front() == Vec{0.0});
    CHECK(cum.back() == Vec{15.0});
    const GridFunction big = GridFunction(z, 0.0, 6.0, ValueShape::scalar(), cum);
    for (double t : {0.0, 1.0, 3.0, 5.0})
        CHECK(delta_derivative_scalar(big, t) == t);

    const TimeScale dense = TimeScale::interval(0.0, 0.5, 1e-3);
    const std::vector<double> dpts = dense.grid(0.0, 0.5);
    std::vector<Vec> dvals;
    for (double t : dpts) dvals.push_back(Vec{std::cos(t)});
    const GridFunction antideriv =
        GridFunction(dense, 0.0, 0.5, ValueShape::scalar(),
                     cumulative_delta_integral(dense, dpts, dvals));
    CHECK(delta_derivative_scalar(antideriv, 0.25) ==
          doctest::Approx(std::cos(0.25)).epsilon(1e-5));
}

TEST_CASE("generalized monomials start from one and the running gap") {
    const TimeScale ts = mixed_scale();
    CHECK(hk_polynomial(ts, 0, 3.5, 0.5) == 1.0);
    CHECK(hk_polynomial(ts, 1, 3.5, 0.5) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(hk_polynomial(ts, 2, 0.5, 0.5) == 0.0);
    CHECK(hk_polynomial(ts, 0, 1.0, 1.0) == 1.0);
    CHECK_FAILS(hk_polynomial(ts, -1, 1.0, 0.0), ErrorCode::Domain);
    CHECK_FAILS(hk_polynomial(ts, 2, 0.0, 1.0), ErrorCode::OutOfDomain);
}

TEST_CASE("generalized monomials match binomials on the integer lattice") {
    const TimeScale z = TimeScale::integers(0, 8);
    CHECK(hk_polynomial(z, 2, 4.0, 0.0) == doctest::Approx(6.0).epsilon(1e-12));
    for (int k = 0; k <= 5; ++k)
        for (double t : {2.0, 5.0, 8.0})
            CHECK(hk_polynomial(z, k, t, 1.0) ==
                  doctest::Approx(oracle::binomial(t - 1.0, k)).epsilon(1e-9));
}

TEST_CASE("generalized monomials approach powers over factorials on dense stretches") {
    const TimeScale dense = TimeScale::interval(0.0, 1.0, 1e-3);
    CHECK(hk_polynomial(dense, 2, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-4));
    for (int k = 1; k <= 4; ++k)
        CHECK(hk_polynomial(dense, k, 0.8, 0.1) ==
              doctest::Approx(std::pow(0.7, k) / oracle::factorial(k)).epsilon(1e-4));
}

TEST_CASE("generalized monomials agree with the iterated running-sum oracle") {
    const TimeScale ts = mixed_scale();
    for (int k = 0; k <= 4; ++k)
        for (double t : {0.5, 1.0, 2.0, 3.5, 4.0}) {
            const double got = hk_polynomial(ts, k, t, 0.0);
            const double want = oracle::hk_iterated(ts, k, t, 0.0);
            CHECK(got == doctest::Approx(want).epsilon(1e-9));
            CHECK(got >= 0.0);
        }
}

TEST_CASE("cylinder transform degenerates to the identity at h = 0") {
    CHECK(cylinder(0.0, 3.0) == 3.0);
    CHECK(cylinder(0.0, -5.5) == -5.5);
    CHECK(cylinder(1.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK_FAILS(cylinder(1.0, -1.0), ErrorCode::Branch);
    CHECK_FAILS(cylinder(1.0, -2.0), ErrorCode::Branch);
    CHECK_FAILS(cylinder(-0.5, 1.0), ErrorCode::Domain);
}

TEST_CASE("exponential function matches classical limits") {
    const TimeScale dense = TimeScale::interval(0.0, 1.0, 1e-3);
    CHECK(exp_function(dense, [](double) { return 2.0; }, 1.0, 0.0) ==
          doctest::Approx(std::exp(2.0)).epsilon(1e-3));
    CHECK(exp_function(dense, [](double t) { return t; }, 1.0, 0.0) ==
          doctest::Approx(std::exp(0.5)).epsilon(1e-5));
    const TimeScale z = TimeScale::integers(0, 5);
    CHECK(exp_function(z, [](double) { return 1.0; }, 3.0, 0.0) ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK(exp_function(z, [](double) { return 1.0; }, 2.0, 2.0) == 1.0);
}

TEST_CASE("exponential function agrees with the jump product on isolated stretches") {
    const TimeScale z = TimeScale::integers(0, 10);
    const ScalarFn f = [](double t) { return 0.1 + 0.05 * t; };
    for (double t : {1.0, 4.0, 7.0, 10.0})
        CHECK(exp_function(z, f, t, 0.0) ==
              doctest::Approx(oracle::exp_product(z, f, t, 0.0)).epsilon(1e-12));
}

TEST_CASE("exponential function satisfies the semigroup law") {
    const TimeScale ts = mixed_scale();
    const ScalarFn f = [](double t) { return 0.3 + 0.1 * t; };
    const double whole = exp_function(ts, f, 4.0, 0.0);
    const double split = exp_function(ts, f, 4.0, 2.0) * exp_function(ts, f, 2.0, 0.0);
    CHECK(whole == doctest::Approx(split).epsilon(1e-12));
}

TEST_CASE("exponential function satisfies its own dynamic equation at jumps") {
    const TimeScale ts = mixed_scale();
    const ScalarFn f = [](double t) { return 0.4 - 0.1 * t; };
    for (double t : {1.0, 2.0}) {
        const double lhs = exp_function(ts, f, ts.sigma(t), 0.0);
        const double rhs = (1.0 + ts.mu(t) * f(t)) * exp_function(ts, f, t, 0.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("exponential of a nonnegative constant dominates one") {
    const TimeScale ts = mixed_scale();
    for (double L : {0.0, 0.2, 1.0})
        for (double t : {0.5, 1.0, 2.0, 4.0}) {
            const double v = exp_function(ts, [L](double) { return L; }, t, 0.0);
            CHECK(v >= 1.0);
            CHECK(v > 0.0);
        }
}

TEST_CASE("exponential function rejects non positively regressive coefficients") {
    const TimeScale z = TimeScale::integers(0, 5);
    CHECK_FAILS(exp_function(z, [](double) { return -1.0; }, 3.0, 0.0), ErrorCode::Regressivity);
    CHECK_FAILS(exp_function(z, [](double) { return -3.0; }, 3.0, 0.0), ErrorCode::Regressivity);
    CHECK_FAILS(exp_function(z, [](double) { return 1.0; }, 0.0, 3.0), ErrorCode::OutOfDomain);
}

TEST_CASE("regressivity classification on the integer lattice") {
    const TimeScale z = TimeScale::integers(0, 5);
    CHECK(regressivity_class(z, [](double) { return 1.0; }, 0.0, 5.0) ==
          RegressivityClass::PositivelyRegressive);
    CHECK(regressivity_class(z, [](double) { return -1.0; }, 0.0, 5.0) ==
          RegressivityClass::NotRegressive);
    CHECK(regressivity_class(z, [](double) { return -1.0 + 5e-13; }, 0.0, 5.0) ==
          RegressivityClass::NotRegressive);
    CHECK(regressivity_class(z, [](double) { return -3.0; }, 0.0, 5.0) ==
          RegressivityClass::NegativelyRegressive);
    CHECK(regressivity_class(z, [](double t) { return t - 2.5; }, 0.0, 5.0) ==
          RegressivityClass::Regressive);
}

TEST_CASE("dense stretches are positively regressive for any coefficient") {
    const TimeScale dense = TimeScale::interval(0.0, 1.0, 0.01);
    CHECK(regressivity_class(dense, [](double) { return -100.0; }, 0.0, 1.0) ==
          RegressivityClass::PositivelyRegressive);
}

TEST_CASE("regressivity is classified on the truncated window") {
    const TimeScale ts = interval_plus_point();
    const GridFunction f =
        GridFunction::sample_scalar(ts, 0.0, 1.0, [](double) { return 0.5; });
    CHECK(regressivity_class(f, 0.0, 2.0) == RegressivityClass::PositivelyRegressive);
}
