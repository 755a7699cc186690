#include <catch_amalgamated.hpp>

#include "delaystab/function_spec.hpp"

using namespace delaystab;
using Catch::Approx;

TEST_CASE("constant and sinusoid evaluation", "[model]") {
    CHECK(evaluate(ConstantSpec{1.8}, 0.0) == 1.8);
    CHECK(evaluate(ConstantSpec{1.8}, 123.4) == 1.8);
    CHECK(evaluate(ConstantSpec{1.8}, -5.0) == 1.8);

    // r(t) = 2.7 + 0.3 sin t
    ScalarFunctionSpec r = SinusoidAffineSpec{2.7, 0.3, 1.0};
    CHECK(evaluate(r, 0.0) == Approx(2.7));
    CHECK(evaluate(r, M_PI / 2) == Approx(3.0));
}

TEST_CASE("periodic spike coefficient evaluates by piece", "[model]") {
    const double b = 1.8;
    const double eps = std::log(4.0) / (3.0 * b);  // 0.256721...
    PiecewisePeriodicSpec a;
    a.period = 1.0;
    a.pieces = {{0.0, eps, 3.0 * b}, {eps, 1.0, 0.0}};
    ScalarFunctionSpec spec = a;
    validate(spec);

    CHECK(evaluate(spec, 1.1) == Approx(5.4));
    CHECK(evaluate(spec, 1.3) == 0.0);
    CHECK(evaluate(spec, 0.0) == Approx(5.4));

    SECTION("periodicity holds at sampled points") {
        for (int i = 0; i <= 50; ++i) {
            const double t = 0.02 * i;
            CHECK(evaluate(spec, t + 1.0) == evaluate(spec, t));
        }
    }
    SECTION("one-sided values at the piece edge") {
        CHECK(evaluate(spec, eps, Side::Right) == 0.0);
        CHECK(evaluate(spec, eps, Side::Left) == Approx(5.4));
        CHECK(evaluate(spec, 1.0, Side::Right) == Approx(5.4));
        CHECK(evaluate(spec, 1.0, Side::Left) == 0.0);
    }
    SECTION("breakpoints are the piece edges, each period") {
        auto bps = breakpoints_in(spec, 0.0, 2.0);
        REQUIRE(bps.size() == 5);  // 0, eps, 1, 1+eps, 2
        CHECK(bps[1] == Approx(eps));
        CHECK(bps[3] == Approx(1.0 + eps));
    }
}

TEST_CASE("piecewise validation rejects gaps and overlaps", "[model]") {
    PiecewisePeriodicSpec gap;
    gap.period = 1.0;
    gap.pieces = {{0.0, 0.4, 1.0}, {0.5, 1.0, 2.0}};
    CHECK_THROWS_AS(validate(ScalarFunctionSpec{gap}), PreconditionError);

    PiecewisePeriodicSpec overlap;
    overlap.period = 1.0;
    overlap.pieces = {{0.0, 0.6, 1.0}, {0.5, 1.0, 2.0}};
    CHECK_THROWS_AS(validate(ScalarFunctionSpec{overlap}), PreconditionError);

    PiecewisePeriodicSpec hole;
    hole.period = 1.0;
    hole.pieces = {{0.1, 1.0, 2.0}};
    CHECK_THROWS_AS(validate(ScalarFunctionSpec{hole}), PreconditionError);
}

TEST_CASE("tabulated specs interpolate and refuse extrapolation", "[model]") {
    TabulatedSpec tab;
    tab.knots = {{0.0, 1.0}, {1.0, 3.0}, {2.0, 2.0}};
    tab.interpolation = Interpolation::Linear;
    ScalarFunctionSpec spec = tab;
    validate(spec);

    CHECK(evaluate(spec, 0.5) == Approx(2.0));
    CHECK(evaluate(spec, 2.0) == Approx(2.0));
    CHECK_THROWS_AS(evaluate(spec, 2.5), ExtrapolationError);
    CHECK_THROWS_AS(evaluate(spec, -0.5), ExtrapolationError);

    SECTION("step interpolation is right-continuous with left limits") {
        tab.interpolation = Interpolation::Step;
        ScalarFunctionSpec st = tab;
        CHECK(evaluate(st, 0.5) == 1.0);
        CHECK(evaluate(st, 1.0) == 3.0);
        CHECK(evaluate(st, 1.0, Side::Left) == 1.0);
    }
    SECTION("non-increasing knots are rejected") {
        tab.knots = {{0.0, 1.0}, {0.0, 2.0}};
        CHECK_THROWS_AS(validate(ScalarFunctionSpec{tab}), PreconditionError);
    }
}

TEST_CASE("histories evaluate for negative time", "[model]") {
    CHECK(evaluate(ConstantSpec{2.5}, -3.0) == 2.5);
    PiecewisePeriodicSpec pw;
    pw.period = 1.0;
    pw.pieces = {{0.0, 0.5, 1.0}, {0.5, 1.0, 2.0}};
    ScalarFunctionSpec spec = pw;
    CHECK(evaluate(spec, -0.75) == 1.0);  // -0.75 wraps to 0.25
    CHECK(evaluate(spec, -0.25) == 2.0);
}
