#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pact/lp/simplex.hpp"

using namespace pact::lp;

TEST_SUITE("linprog-core") {
    TEST_CASE("push mass to the free variable") {
        LinearProgram lp;
        lp.objective = {1, 0};
        lp.add_equality({1, 1}, 1);
        lp.bounds = {{0, 1}, {0, 1}};
        const auto s = solve_lp(lp);
        REQUIRE(s.optimal());
        CHECK(s.x[0] == doctest::Approx(0));
        CHECK(s.x[1] == doctest::Approx(1));
        CHECK(s.objective_value == doctest::Approx(0));
    }

    TEST_CASE("two dimensional polytope") {
        LinearProgram lp;
        lp.objective = {-1, -1};
        lp.add_upper({1, 2}, 2);
        lp.bounds = {{0, 1}, {0, 1}};
        const auto s = solve_lp(lp);
        REQUIRE(s.optimal());
        CHECK(s.x[0] == doctest::Approx(1));
        CHECK(s.x[1] == doctest::Approx(0.5));
        CHECK(s.objective_value == doctest::Approx(-1.5));
        CHECK(oracle::vertex_enumeration(lp).objective == doctest::Approx(-1.5));
    }

    TEST_CASE("infeasible capacity") {
        LinearProgram lp;
        lp.objective = {0, 0};
        lp.add_equality({1, 1}, 2);
        lp.bounds = {{0, 0.5}, {0, 0.5}};
        CHECK(solve_lp(lp).status == Status::kInfeasible);
        CHECK_FALSE(oracle::vertex_enumeration(lp).feasible);
    }

    TEST_CASE("unbounded") {
        LinearProgram lp;
        lp.objective = {-1, 0};
        lp.add_upper({-1, 1}, 0);
        CHECK(solve_lp(lp).status == Status::kUnbounded);
    }

    TEST_CASE("negative right-hand sides and shifted bounds") {
        LinearProgram lp;
        lp.objective = {1, 1};
        lp.add_upper({-1, -1}, -3);  // x1 + x2 >= 3
        lp.bounds = {{1, 5}, {0.5, 1.5}};
        const auto s = solve_lp(lp);
        REQUIRE(s.optimal());
        CHECK(s.objective_value == doctest::Approx(3));
        CHECK(s.x[1] <= 1.5 + 1e-9);
        CHECK(s.x[0] >= 1 - 1e-9);
    }

    TEST_CASE("free variable") {
        LinearProgram lp;
        lp.objective = {1};
        lp.add_upper({-1}, 2);  // x >= -2
        lp.bounds = {{-kInfinity, kInfinity}};
        const auto s = solve_lp(lp);
        REQUIRE(s.optimal());
        CHECK(s.x[0] == doctest::Approx(-2));
    }

    TEST_CASE("redundant equalities") {
        LinearProgram lp;
        lp.objective = {1, 2, 3};
        lp.add_equality({1, 1, 1}, 1);
        lp.add_equality({2, 2, 2}, 2);
        const auto s = solve_lp(lp);
        REQUIRE(s.optimal());
        CHECK(s.objective_value == doctest::Approx(1));
    }

    TEST_CASE("validation") {
        LinearProgram lp;
        lp.objective = {1, 1};
        lp.a_eq = {{1}};
        lp.b_eq = {1};
        CHECK_THROWS_AS(lp.validate(), std::invalid_argument);
        LinearProgram bad;
        bad.objective = {1};
        bad.bounds = {{2, 1}};
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }

    TEST_CASE("random programs agree with vertex enumeration") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(-1, 1);
        std::uniform_int_distribution<int> nv(1, 4), nc(0, 3), ne(0, 1);
        int optimal = 0, infeasible = 0;
        for (int t = 0; t < 400; ++t) {
            LinearProgram lp;
            const int n = nv(rng);
            for (int j = 0; j < n; ++j) {
                lp.objective.push_back(u(rng));
                const double lo = u(rng);
                lp.bounds.push_back({lo, lo + 0.2 + std::abs(u(rng))});
            }
            const int eqs = std::min(ne(rng), n - 1);
            for (int i = 0; i < eqs; ++i) {
                std::vector<double> row(n);
                for (auto& v : row) v = u(rng);
                lp.add_equality(row, u(rng) * 0.5);
            }
            for (int i = 0, c = nc(rng); i < c; ++i) {
                std::vector<double> row(n);
                for (auto& v : row) v = u(rng);
                lp.add_upper(row, u(rng));
            }
            const auto got = solve_lp(lp);
            const auto want = oracle::vertex_enumeration(lp);
            INFO("trial " << t);
            REQUIRE(got.status != Status::kNumericalFailure);
            REQUIRE(got.optimal() == want.feasible);
            if (want.feasible) {
                ++optimal;
                CHECK(got.objective_value == doctest::Approx(want.objective).epsilon(1e-7).scale(1));
                CHECK(max_violation(lp, got.x) <= kFeasibilityTolerance);
            } else {
                ++infeasible;
            }
        }
        CHECK(optimal > 100);
        CHECK(infeasible > 10);
    }
}
