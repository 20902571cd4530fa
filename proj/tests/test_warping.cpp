#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/warping.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace modelforge;
using oracles::SpaceFormOracle;
using testing::linspace;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("sphere profile: first zero at pi, g matches sate") {
    auto ws = solve_warping(CurvatureProfile::constant(-1.0), 4.0);
    REQUIRE(ws.first_zero().has_value());
    CHECK(std::fabs(*ws.first_zero() - kPi) < 1e-8);
    for (double t : linspace(0.0, kPi, 101)) {
        auto v = ws.values(t);
        CHECK(std::fabs(v.g - std::sin(t)) < 1e-8);
    }
}

TEST_CASE("hyperbolic profile: no zero, g matches sinh") {
    auto ws = solve_warping(CurvatureProfile::constant(1.0), 5.0);
    CHECK(!ws.first_zero().has_value());
    CHECK(ws.r_end() == 5.0);
    for (double t : linspace(0.0, 5.0, 101))
        CHECK(std::fabs(ws.g(t) - std::sinh(t)) < 1e-7);
}

TEST_CASE("flat profile: g = t, I = t^2/2") {
    auto ws = solve_warping(CurvatureProfile::constant(0.0), 10.0);
    CHECK(!ws.first_zero().has_value());
    for (double t : linspace(0.0, 10.0, 51)) {
        auto v = ws.values(t);
        CHECK(std::fabs(v.g - t) < 1e-9);
        CHECK(std::fabs(v.integral - 0.5 * t * t) < 1e-9);
    }
}

TEST_CASE("curvature 4 sphere: first zero at pi/2") {
    auto ws = solve_warping(CurvatureProfile::constant(-4.0), 4.0);
    REQUIRE(ws.first_zero().has_value());
    CHECK(std::fabs(*ws.first_zero() - kPi / 2.0) < 1e-8);
}

TEST_CASE("initial conditions are exact") {
    auto ws = solve_warping(CurvatureProfile::constant(-1.0), 4.0);
    auto v = ws.values(0.0);
    CHECK(v.g == 0.0);
    CHECK(v.dg == 1.0);
    CHECK(v.integral == 0.0);
}

TEST_CASE("values at pi/2 on the unit sphere") {
    auto ws = solve_warping(CurvatureProfile::constant(-1.0), 4.0);
    auto v = ws.values(kPi / 2.0);
    CHECK(std::fabs(v.g - 1.0) < 1e-8);
    CHECK(std::fabs(v.dg - 0.0) < 1e-8);
    CHECK(std::fabs(v.integral - 1.0) < 1e-8);
}

TEST_CASE("values on the flat model") {
    auto ws = solve_warping(CurvatureProfile::constant(0.0), 10.0);
    auto v = ws.values(3.0);
    CHECK(v.g == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(v.dg == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.integral == doctest::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("derivatives at the boundary follow the recurrence") {
    auto ws = solve_warping(CurvatureProfile::constant(-1.0), 4.0);
    const double fz = *ws.first_zero();
    CHECK(std::fabs(ws.derivative(fz, 1) - (-1.0)) < 1e-8);
    CHECK(std::fabs(ws.derivative(fz, 2)) < 1e-8);
    CHECK(std::fabs(ws.derivative(fz, 3) - 1.0) < 1e-7);
    CHECK(std::fabs(ws.derivative(fz, 4)) < 1e-7);
}

TEST_CASE("derivative order bounds and profile requirements") {
    auto ws = solve_warping(CurvatureProfile::constant(-1.0), 4.0);
    CHECK_THROWS_AS(ws.derivative(1.0, 5), Error);
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i <= 40; ++i) samples.emplace_back(0.1 * i, -1.0);
    auto tab = solve_warping(CurvatureProfile::tabulated(samples), 3.9);
    CHECK_NOTHROW(tab.derivative(1.0, 2));  // needs only G itself
    CHECK_THROWS_AS(tab.derivative(1.0, 3), DerivativeUnavailableError);
}

TEST_CASE("closed-form warping solutions") {
    auto sphere = closed_form_warping(-1.0, 4.0);
    REQUIRE(sphere.first_zero().has_value());
    CHECK(*sphere.first_zero() == kPi);
    CHECK(sphere.g(1.0) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));

    auto hyper = closed_form_warping(1.0, 5.0);
    CHECK(!hyper.first_zero().has_value());
    CHECK(hyper.g(2.0) == doctest::Approx(std::sinh(2.0)).epsilon(1e-15));

    auto flat = closed_form_warping(0.0, 5.0);
    CHECK(!flat.first_zero().has_value());
    CHECK(flat.g(2.0) == 2.0);
}

TEST_CASE("numeric and closed-form solutions agree on the constant family") {
    for (double k : {-4.0, -1.0, -0.25, 0.0, 1.0, 4.0}) {
        auto numeric = solve_warping(CurvatureProfile::constant(k), 8.0);
        auto exact = closed_form_warping(k, 8.0);
        const double upper =
            std::min(numeric.first_zero().value_or(5.0), 5.0);
        for (double t : linspace(0.0, upper, 97)) {
            auto a = numeric.values(t);
            auto b = exact.values(t);
            CHECK(std::fabs(a.g - b.g) < 1e-7);
            CHECK(std::fabs(a.dg - b.dg) < 1e-7);
            CHECK(std::fabs(a.integral - b.integral) < 1e-7);
        }
    }
}

TEST_CASE("Wronskian-type invariant for constant profiles") {
    for (double k : {-4.0, -1.0, 1.0}) {
        auto ws = solve_warping(CurvatureProfile::constant(k), 5.0);
        for (double t : linspace(0.0, ws.r_end(), 101)) {
            auto v = ws.values(t);
            CHECK(std::fabs(v.dg * v.dg - k * v.g * v.g - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("first-zero monotonicity in the constant family") {
    std::vector<double> ks = {-4.0, -1.0, -0.25};
    std::vector<double> zeros;
    for (double k : ks) {
        auto ws = solve_warping(CurvatureProfile::constant(k), 15.0);
        REQUIRE(ws.first_zero().has_value());
        zeros.push_back(*ws.first_zero());
    }
    CHECK(zeros[0] < zeros[1]);
    CHECK(zeros[1] < zeros[2]);
}

TEST_CASE("positivity and monotone integral up to the first zero") {
    auto ws = solve_warping(parse_profile("-1 - 0.3*r^2"), 4.0);
    REQUIRE(ws.first_zero().has_value());
    const double fz = *ws.first_zero();
    double prev_I = 0.0;
    for (double t : linspace(1e-3, fz * (1 - 1e-12), 301)) {
        auto v = ws.values(t);
        CHECK(v.g > 0.0);
        CHECK(v.integral >= prev_I);
        prev_I = v.integral;
    }
}

TEST_CASE("warping residual audit against the profile") {
    for (const char* text : {"const:-1", "const:1", "-1 - 0.3*r^2"}) {
        auto profile = parse_profile(text);
        auto ws = solve_warping(profile, 4.0);
        const DenseSolution& d = *ws.dense();
        for (double t : linspace(0.0, ws.r_end(), 64)) {
            const double g = ws.g(t);
            const double gpp = d.eval_derivative(t, 1);  // d/dt of g'
            CHECK(std::fabs(gpp - profile.eval(t, 0) * g) <= 1e-6 * (1.0 + std::fabs(g)));
        }
    }
}

TEST_CASE("out-of-range evaluation throws") {
    auto ws = solve_warping(CurvatureProfile::constant(-1.0), 4.0);
    CHECK_THROWS_AS(ws.values(-0.1), OutOfRangeError);
    CHECK_THROWS_AS(ws.values(ws.r_end() + 0.1), OutOfRangeError);
}

TEST_CASE("serialization round trip reproduces evaluations bit for bit") {
    auto ws = solve_warping(parse_profile("-1 - 0.3*r^2"), 4.0);
    const std::string record = serialize_warping(ws);
    auto loaded = deserialize_warping(record);
    CHECK(loaded.r_end() == ws.r_end());
    REQUIRE(loaded.first_zero().has_value());
    CHECK(*loaded.first_zero() == *ws.first_zero());
    for (double t : linspace(0.0, ws.r_end(), 137)) {
        auto a = ws.values(t);
        auto b = loaded.values(t);
        CHECK(a.g == b.g);
        CHECK(a.dg == b.dg);
        CHECK(a.integral == b.integral);
    }
    // and the serialized form itself is stable
    CHECK(serialize_warping(loaded) == record);
}

TEST_CASE("closed-form solutions serialize too") {
    auto ws = closed_form_warping(-4.0, 3.0);
    auto loaded = deserialize_warping(serialize_warping(ws));
    CHECK(loaded.is_closed_form());
    CHECK(loaded.g(0.7) == ws.g(0.7));
}

TEST_CASE("malformed records are rejected") {
    CHECK_THROWS_AS(deserialize_warping("not json"), SerializationError);
    CHECK_THROWS_AS(deserialize_warping("{\"format\":\"modelforge.warping/999\"}"),
                    SerializationError);
    CHECK_THROWS_AS(deserialize_warping("{\"format\":\"modelforge.warping/1\"}"),
                    SerializationError);
}

TEST_CASE("invalid r_max is rejected") {
    CHECK_THROWS_AS(solve_warping(CurvatureProfile::constant(0.0), 0.0), Error);
    CHECK_THROWS_AS(solve_warping(CurvatureProfile::constant(0.0), -1.0), Error);
}
