#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dilacoh/frame_explorer.hpp"

using namespace dilacoh;

TEST_CASE("lambda sweep basics") {
    const auto two = sweep_lambda(1e-6, 1e6, 1e-2, 0.5, 2.0, 2);
    REQUIRE(two.points.size() == 2);
    CHECK(two.points[0].abscissa == 0.5);
    CHECK(two.points[1].abscissa == 2.0);

    const auto curve = sweep_lambda(1e-6, 1e6, 1e-2, 0.0025, 5.0, 2000);
    REQUIRE(curve.points.size() == 2000);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].abscissa > curve.points[i - 1].abscissa);
        CHECK(curve.points[i].v >= 0.0);
    }

    // Delta = 0: strictly decreasing pure retardation curve
    const auto flat = sweep_lambda(0.0, 1e6, 1e-2, 0.1, 3.0, 200);
    for (std::size_t i = 1; i < flat.points.size(); ++i)
        CHECK(flat.points[i].v < flat.points[i - 1].v);
    CHECK(flat.points[0].v ==
          doctest::Approx(std::exp(-0.1 * 0.1 * 1e-2)).epsilon(1e-13));

    CHECK_THROWS_AS(sweep_lambda(0.0, 1e6, 1e-2, 1.0, 2.0, 1), ConfigError);
    CHECK_THROWS_AS(sweep_lambda(0.0, 1e6, 1e-2, -1.0, 2.0, 10), ConfigError);
}

TEST_CASE("optimal frame for the reference scan parameters") {
    const auto opt = optimal_frame(1e-6, 1e6, 1e-2);
    CHECK_FALSE(opt.boundary);
    CHECK_FALSE(opt.unimodal_warning);
    CHECK(opt.lambda_star == doctest::Approx(1.7016160).epsilon(1e-5));
    CHECK(opt.v_star == doctest::Approx(0.9572922952528592).epsilon(1e-9));

    // the refined maximum dominates every sweep sample
    const auto curve = sweep_lambda(1e-6, 1e6, 1e-2, 0.0025, 5.0, 2000);
    for (const auto& p : curve.points) CHECK(opt.v_star >= p.v - 1e-9);
    CHECK(opt.v_star <= 1.0);

    // depends on the group w0*Delta up to O(Delta) corrections: rescaling w0
    // against Delta moves the optimum only at that order
    const auto opt2 = optimal_frame(1e-5, 1e5, 1e-2);
    CHECK(opt2.lambda_star == doctest::Approx(opt.lambda_star).epsilon(1e-5));
    CHECK(opt2.v_star == doctest::Approx(opt.v_star).epsilon(1e-6));
}

TEST_CASE("optimal frame boundary case") {
    const auto opt = optimal_frame(0.0, 1e6, 1e-2);
    CHECK(opt.boundary);
    CHECK(opt.lambda_star < 0.1);  // V -> 1 as lambda -> 0+
}

TEST_CASE("dominance region matrix") {
    const std::vector<double> lams = {1.0, 2.0, 5.0, 10.0, 20.0, 30.0};
    const std::vector<double> deltas = {1e-7, 1e-6, 1e-5};
    const auto region = dominance_region(1e6, 1e-2, lams, deltas);
    CHECK(region.rows == lams.size());
    CHECK(region.cols == deltas.size());
    CHECK(region.dominant.size() == lams.size() * deltas.size());

    // lambda1 = 1 row: never dominant
    for (std::size_t j = 0; j < deltas.size(); ++j)
        CHECK_FALSE(region.at(0, j));
    // large lambda1: dominant
    for (std::size_t j = 0; j < deltas.size(); ++j)
        CHECK(region.at(lams.size() - 1, j));
    // once dominant when increasing lambda1, stays dominant
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        bool seen = false;
        for (std::size_t i = 0; i < lams.size(); ++i) {
            if (seen) CHECK(region.at(i, j));
            seen = seen || region.at(i, j);
        }
    }

    CHECK_THROWS_AS(dominance_region(1e6, 1e-2, {}, deltas), ConfigError);
}
