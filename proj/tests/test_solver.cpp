#include <doctest.h>

#include <cmath>
#include <random>

#include "rmono/solver.hpp"

using namespace rmono;

TEST_CASE("residual worked values") {
    {
        MomentSystem sys(3, {1, 2}, {1.5, 1.0}, 1.0);
        auto f = residual({2.0, 1.0}, 1.0, sys);
        CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(f[1] == doctest::Approx(0.0).epsilon(1e-14));
    }
    {
        MomentSystem sys(2, {1}, {2.0}, 1.0);
        auto f = residual({1.0}, 1.0, sys);
        CHECK(f[0] == doctest::Approx(-1.0).epsilon(1e-14));
    }
    {
        MomentSystem sys(2, {0, 1}, {0.7, 1.0}, 1.0);
        auto f = residual({1.2, 0.2}, 1.0, sys);
        CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(f[1] == doctest::Approx(0.0).epsilon(1e-13));
    }
}

TEST_CASE("vandermonde_det worked values and validation") {
    CHECK(vandermonde_det({2.0, 1.0}, {2.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(vandermonde_det({3.0, 2.0, 1.0}, {3.0, 2.0, 1.0}) ==
          doctest::Approx(12.0).epsilon(1e-12));
    CHECK(vandermonde_det({5.0}, {0.5}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK_THROWS_AS(vandermonde_det({1.0, 2.0}, {2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(vandermonde_det({2.0, -1.0}, {2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(vandermonde_det({2.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("solve_fixed_count recovers knots and detects infeasibility") {
    {
        MomentSystem sys(3, {1, 2}, {1.5, 1.0}, 1.0);
        auto res = solve_fixed_count(sys, {2.5, 0.5});
        REQUIRE(res.status == SolveStatus::Ok);
        CHECK(res.knots[0] == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(res.knots[1] == doctest::Approx(1.0).epsilon(1e-10));
    }
    {
        MomentSystem sys(2, {1}, {1.0}, 1.0);
        auto res = solve_fixed_count(sys, {0.7});
        REQUIRE(res.status == SolveStatus::Ok);
        CHECK(res.knots[0] == doctest::Approx(1.0).epsilon(1e-10));
    }
    {
        MomentSystem sys(2, {0, 1}, {0.3, 1.0}, 1.0);
        auto res = solve_fixed_count(sys, {1.0, 0.4});
        CHECK(res.status == SolveStatus::NoSolution);
    }
    {
        MomentSystem sys(3, {1, 2}, {1.5, 1.0}, 1.0);
        CHECK_THROWS_AS(solve_fixed_count(sys, {1.0}), std::invalid_argument);       // not square
        CHECK_THROWS_AS(solve_fixed_count(sys, {1.0, 2.0}), std::invalid_argument);  // unordered
    }
}

TEST_CASE("grow_knot worked values") {
    AlternatingSpline witness(2, 1.0, {1.0});
    MomentSystem sys(2, {1}, {1.0}, 1.0);
    {
        auto g = grow_knot(witness, 0, 0.7, sys);
        REQUIRE(g.status == SolveStatus::Ok);
        CHECK(g.spline->knots[0] == doctest::Approx(1.2).epsilon(1e-10));
        CHECK(g.spline->knots[1] == doctest::Approx(0.2).epsilon(1e-10));
    }
    {
        auto g = grow_knot(witness, 0, 10.0, sys);
        REQUIRE(g.status == SolveStatus::Ok);
        CHECK(g.spline->knots[0] == doctest::Approx(10.5).epsilon(1e-10));
        CHECK(g.spline->knots[1] == doctest::Approx(9.5).epsilon(1e-10));
    }
    {
        auto g = grow_knot(witness, 0, 0.505, sys);
        REQUIRE(g.status == SolveStatus::Ok);
        CHECK(g.spline->knots[0] == doctest::Approx(1.005).epsilon(1e-9));
        CHECK(g.spline->knots[1] == doctest::Approx(0.005).epsilon(1e-6));
    }
    CHECK_THROWS_AS(grow_knot(witness, 0, 0.4, sys), std::invalid_argument);  // below current
    CHECK_THROWS_AS(grow_knot(witness, 1, 2.0, sys), std::invalid_argument);  // not below orders
}

TEST_CASE("continuation trace invariants") {
    AlternatingSpline witness(3, 1.0, {1.0});
    MomentSystem sys(3, {2}, {1.0}, 1.0);
    auto g = grow_knot(witness, 1, 0.9, sys);
    REQUIRE(g.status == SolveStatus::Ok);
    REQUIRE(g.trace.steps.size() >= 2);
    double prev_u = -1.0;
    for (const auto& step : g.trace.steps) {
        CHECK(step.grown_knot > prev_u);
        prev_u = step.grown_knot;
        auto f = residual(step.knots, 1.0, sys);
        for (double v : f) CHECK(std::abs(v) <= 1e-10);
    }
    CHECK(g.trace.termination == "crossed");
}

TEST_CASE("solve_min_l worked values") {
    {
        auto res = solve_min_l(3, {1, 2}, {1.0, 1.0});
        REQUIRE(res.status == SolveStatus::Ok);
        CHECK(res.l_min == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(res.spline->knots[0] == doctest::Approx(2.0).epsilon(1e-12));
    }
    {
        auto res = solve_min_l(3, {1, 2}, {2.0, 2.0});
        REQUIRE(res.status == SolveStatus::Ok);
        CHECK(res.l_min == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.spline->knots[0] == doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(solve_min_l(2, {1}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(solve_min_l(2, {1, 2}, {1.0, 1.0}), std::invalid_argument);  // order == r
}

TEST_CASE("solve_for_l worked values") {
    {
        auto res = solve_for_l(3, {1, 2}, {1.0, 1.0}, 0.5);
        REQUIRE(res.status == SolveStatus::Ok);
        REQUIRE(res.spline->knot_count() == 1);
        CHECK(res.spline->knots[0] == doctest::Approx(2.0).epsilon(1e-10));
    }
    {
        auto res = solve_for_l(3, {1, 2}, {1.0, 1.0}, 1.0);
        REQUIRE(res.status == SolveStatus::Ok);
        REQUIRE(res.spline->knot_count() == 2);
        CHECK(res.spline->knots[0] == doctest::Approx(1.5).epsilon(1e-10));
        CHECK(res.spline->knots[1] == doctest::Approx(0.5).epsilon(1e-10));
    }
    {
        auto res = solve_for_l(3, {1, 2}, {1.0, 1.0}, 2.0);
        REQUIRE(res.status == SolveStatus::Ok);
        CHECK(res.spline->knots[0] == doctest::Approx(1.25).epsilon(1e-10));
        CHECK(res.spline->knots[1] == doctest::Approx(0.75).epsilon(1e-10));
    }
    {
        auto res = solve_for_l(3, {1, 2}, {1.0, 1.0}, 0.4);
        CHECK(res.status == SolveStatus::NoSolution);
    }
}

TEST_CASE("round-trip recovery from perturbed guesses") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.5, 6.0);
    std::uniform_real_distribution<double> pert(0.97, 1.03);
    for (int trial = 0; trial < 100; ++trial) {
        const int r = 3 + static_cast<int>(rng() % 4);
        const int s = 1 + static_cast<int>(rng() % 3);
        std::vector<double> knots;
        while (static_cast<int>(knots.size()) < s) {
            double a = unif(rng);
            bool ok = true;
            for (double e : knots)
                if (std::abs(e - a) < 0.4) ok = false;
            if (ok) knots.push_back(a);
        }
        std::sort(knots.begin(), knots.end(), std::greater<>());
        std::vector<int> orders;
        while (static_cast<int>(orders.size()) < s) {
            int k = static_cast<int>(rng() % r);
            if (std::find(orders.begin(), orders.end(), k) == orders.end()) orders.push_back(k);
        }
        std::sort(orders.begin(), orders.end());
        AlternatingSpline phi(r, 1.0, knots);
        std::vector<double> targets;
        for (int k : orders) targets.push_back(phi.norm(k));
        MomentSystem sys(r, orders, targets, 1.0);
        std::vector<double> guess = knots;
        for (double& a : guess) a *= pert(rng);
        std::sort(guess.begin(), guess.end(), std::greater<>());
        auto res = solve_fixed_count(sys, guess);
        REQUIRE(res.status == SolveStatus::Ok);
        for (int j = 0; j < s; ++j)
            CHECK(res.knots[j] == doctest::Approx(knots[j]).epsilon(1e-8));
    }
}

TEST_CASE("solve_for_l at l_min reproduces the minimizer") {
    // Targets taken from the 2-knot spline (2, 1) with l = 1, r = 4; the
    // (m-1)-knot match is unique, so it is the minimizer and l_min = 1.
    const std::vector<int> orders{0, 1, 3};
    const std::vector<double> targets{0.625, 7.0 / 6.0, 1.0};
    auto min = solve_min_l(4, orders, targets);
    REQUIRE(min.status == SolveStatus::Ok);
    CHECK(min.l_min == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(min.spline->knot_count() == 2);
    CHECK(min.spline->knots[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(min.spline->knots[1] == doctest::Approx(1.0).epsilon(1e-9));
    auto at_min = solve_for_l(4, orders, targets, min.l_min);
    REQUIRE(at_min.status == SolveStatus::Ok);
    REQUIRE(at_min.spline->knot_count() == 2);
    for (int j = 0; j < 2; ++j)
        CHECK(at_min.spline->knots[j] ==
              doctest::Approx(min.spline->knots[j]).epsilon(1e-10));
    auto above = solve_for_l(4, orders, targets, 1.5 * min.l_min);
    REQUIRE(above.status == SolveStatus::Ok);
    CHECK(above.spline->knot_count() == 3);
    for (std::size_t i = 0; i < orders.size(); ++i)
        CHECK(above.spline->norm(orders[i]) == doctest::Approx(targets[i]).epsilon(1e-10));
}
