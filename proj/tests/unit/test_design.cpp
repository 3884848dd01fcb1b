#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pact/core/scenario.hpp"
#include "pact/design/contract_design.hpp"

using namespace pact;
using namespace pact::design;

TEST_SUITE("contract-design") {
    TEST_CASE("min pay contract examples") {
        const auto q = OutcomeSpace::from_valuations({0, 1});
        const AgentSetting s({{1, 0}, {0, 1}}, {0, 0.5});
        const auto r = min_pay_contract_for_action(1, s, q, {});
        REQUIRE(r.has_value());
        CHECK((*r)[0] == doctest::Approx(0).epsilon(1e-9));
        CHECK((*r)[1] == doctest::Approx(0.5));

        const AgentSetting free_action({{0.5, 0.5}, {0, 1}}, {0, 0});
        const auto z = min_pay_contract_for_action(1, free_action, q, {});
        REQUIRE(z.has_value());
        CHECK(dot(free_action.row(1), z->payments()) == doctest::Approx(0).scale(1));

        const AgentSetting dup({{1, 0}, {0.3, 0.7}, {0.3, 0.7}}, {0, 0.1, 0.2});
        CHECK_FALSE(min_pay_contract_for_action(2, dup, q, {}).has_value());
        CHECK(plan_for_action(2, dup, q, {}).status == lp::Status::kInfeasible);
    }

    TEST_CASE("optimize examples") {
        const auto q = OutcomeSpace::from_valuations({0, 1});
        const AgentSetting s({{1, 0}, {0, 1}}, {0, 0.5});
        const auto sol = optimize_contract(s, q, {});
        CHECK(sol.target_action == 1);
        CHECK(sol.predicted_principal_utility == doctest::Approx(0.5));
        CHECK(principal_utility(sol.contract, s, {}, q) == doctest::Approx(0.5));
        CHECK(sol.per_action.size() == 1);  // actions 1..N-1

        const AgentSetting dominated({{0, 1}, {1, 0}}, {0, 0.1});
        const auto null_sol = optimize_contract(dominated, q, {});
        CHECK(null_sol.is_null());
        CHECK(null_sol.contract.is_zero());

        const AgentSetting single({{0.2, 0.8}}, {0});
        CHECK(optimize_contract(single, q, {}).is_null());
    }

    TEST_CASE("brute force examples") {
        const auto q = OutcomeSpace::from_valuations({0, 1});
        const AgentSetting s({{1, 0}, {0, 1}}, {0, 0.5});
        const auto grid = brute_force_contract(s, q, {}, 0.01, 1.0);
        CHECK(principal_utility(grid.contract, s, {}, q) == doctest::Approx(0.5).epsilon(0.02));
        const auto coarse = brute_force_contract(s, q, {}, 2.0, 1.0);
        CHECK(coarse.contract.is_zero());
        CHECK(principal_utility(coarse.contract, s, {}, q) == 0.0);
        CHECK_THROWS_AS(brute_force_contract(s, q, {}, 1e-6, 1.0), GridTooLarge);
    }

    TEST_CASE("optimizer against grid and exact vertex oracles") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(0, 1);
        const double step = 0.02;
        for (int t = 0; t < 40; ++t) {
            const std::size_t n = 2 + t % 3;
            std::vector<std::vector<double>> p;
            std::vector<double> c(n);
            for (std::size_t i = 0; i < n; ++i) p.push_back(oracle::random_simplex_row(2, rng));
            for (auto& v : c) v = 0.3 * u(rng);
            const std::vector<double> qv{u(rng), u(rng)};
            const AgentSetting s(p, c);
            const auto q = OutcomeSpace::from_valuations(qv);
            const auto sol = optimize_contract(s, q, {});
            const double lp_value = principal_utility(sol.contract, s, {}, q);
            CHECK(lp_value == doctest::Approx(sol.predicted_principal_utility).epsilon(1e-6));

            // exhaustive grid through the independent best-response oracle
            double best = 0.0;
            const double cap = q.max_valuation();
            for (double a = 0; a <= cap + 1e-12; a += step)
                for (double b = 0; b <= cap + 1e-12; b += step)
                    best = std::max(best, oracle::principal_utility(p, c, qv, {a, b}, 0));
            INFO("trial " << t);
            CHECK(lp_value >= best - 1e-7);  // the LP is never worse than any grid point

            // exact optimum: per-action min-payment programs solved by vertex enumeration
            double exact = 0.0;
            for (std::size_t target = 1; target < n; ++target) {
                lp::LinearProgram prog;
                prog.objective = p[target];
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == target) continue;
                    prog.add_upper({p[k][0] - p[target][0], p[k][1] - p[target][1]}, c[k] - c[target]);
                }
                prog.add_upper({-p[target][0], -p[target][1]}, -c[target]);
                prog.bounds = {{0, 50}, {0, 50}};
                const auto v = oracle::vertex_enumeration(prog);
                if (v.feasible) exact = std::max(exact, dot(p[target], qv) - v.objective);
            }
            CHECK(lp_value == doctest::Approx(exact).epsilon(1e-7).scale(1));
        }
    }

    TEST_CASE("every feasible plan implements its action") {
        SimScenarioConfig cfg;
        cfg.m_count = 4;
        cfg.n_count = 6;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            cfg.rng_seed = seed;
            const auto sc = generate_sim_setting(cfg);
            for (std::size_t n = 1; n < 6; ++n) {
                const auto plan = plan_for_action(n, sc.setting, sc.outcomes, sc.market);
                if (!plan.contract) continue;
                const auto br = best_response(*plan.contract, sc.setting, sc.market, sc.outcomes);
                CHECK(br.accepted);
                const double realized = principal_utility(*plan.contract, sc.setting, sc.market, sc.outcomes);
                // ties may move the agent, but only toward a better action for the principal
                CHECK(realized >= plan.principal_utility - 1e-7);
            }
        }
    }
}
