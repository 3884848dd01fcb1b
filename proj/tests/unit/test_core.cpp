#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pact/core/model.hpp"
#include "pact/core/scenario.hpp"

using namespace pact;

namespace {

AgentSetting identity2(double c1 = 0.5) { return AgentSetting({{1, 0}, {0, 1}}, {0, c1}); }

}  // namespace

TEST_SUITE("core-model") {
    TEST_CASE("interval outcome space") {
        const auto o = build_outcome_space(0.9, 1.8, 2, 5e-4);
        REQUIRE(o.size() == 2);
        CHECK(o.intervals()[0].lower == doctest::Approx(0.9));
        CHECK(o.intervals()[0].upper == doctest::Approx(1.35));
        CHECK(o.intervals()[1].upper == 1.8);
        CHECK(o.medians()[0] == doctest::Approx(1.125));
        CHECK(o.medians()[1] == doctest::Approx(1.575));
        // ln(1 + 5e-4 * 1.125)
        CHECK(o.valuations()[0] == doctest::Approx(std::log(1.0005625)).epsilon(1e-12));
        CHECK(o.valuations()[0] == doctest::Approx(5.62342e-4).epsilon(1e-5));
        CHECK(o.alpha() == 5e-4);

        const auto one = build_outcome_space(0, 1, 1, 3.0);
        CHECK(one.medians()[0] == 0.5);
        CHECK_THROWS_AS(build_outcome_space(1, 1, 2, 1.0), ModelError);
        CHECK_THROWS_AS(build_outcome_space(0, 1, 0, 1.0), ModelError);
        CHECK_THROWS_AS(build_outcome_space(0, 1, 2, 0.0), ModelError);
    }

    TEST_CASE("raw valuations") {
        const auto o = OutcomeSpace::from_valuations({0, 1});
        CHECK_FALSE(o.has_intervals());
        CHECK(o.max_valuation() == 1);
        CHECK_THROWS_AS(OutcomeSpace::from_valuations({}), ModelError);
        CHECK_THROWS_AS(OutcomeSpace::from_valuations({-1.0}), ModelError);
    }

    TEST_CASE("setting and contract validation") {
        CHECK_THROWS_AS(AgentSetting({{0.5, 0.4}}, {0}), ModelError);
        CHECK_THROWS_AS(AgentSetting({{1, 0}}, {-0.1}), ModelError);
        CHECK_THROWS_AS(AgentSetting({{1, 0}, {1}}, {0, 0}), ModelError);
        CHECK_THROWS_AS(AgentSetting({{1, 0}}, {0, 0}), ModelError);
        CHECK_THROWS_AS(Contract({-0.1}), ModelError);
        CHECK_THROWS_AS(Contract({std::nan("")}), ModelError);
        CHECK(Contract::zero(3).is_zero());
    }

    TEST_CASE("agent utility") {
        const auto s = identity2();
        const auto u = agent_utility(1, Contract({0, 0.6}), s, {});
        CHECK(u.contract_surplus == doctest::Approx(0.1));
        CHECK(u.total == doctest::Approx(0.1));
        const MarketParams market{1.6e-4, 1.2e-4};
        CHECK(market.subscription_surplus() == doctest::Approx(4e-5));
        const auto z = agent_utility(0, Contract::zero(2), s, market);
        CHECK(z.contract_surplus == 0.0);
        CHECK(z.total == doctest::Approx(4e-5));
    }

    TEST_CASE("best response examples") {
        const auto s = identity2();
        const auto q = OutcomeSpace::from_valuations({0, 1});
        auto br = best_response(Contract({0, 0.6}), s, {}, q);
        CHECK(br.action_index == 1);
        CHECK(br.accepted);
        CHECK(br.contract_surplus == doctest::Approx(0.1));

        br = best_response(Contract::zero(2), s, {}, q);
        CHECK(br.action_index == 0);
        CHECK(br.accepted);

        // surplus tie 0 = 0 resolved toward the principal (0.5 vs 0)
        br = best_response(Contract({0, 0.5}), s, {}, q);
        CHECK(br.action_index == 1);

        const AgentSetting costly({{1, 0}, {0, 1}}, {0.2, 2});
        br = best_response(Contract::zero(2), costly, {}, q);
        CHECK_FALSE(br.accepted);
        CHECK(br.action_index == 0);
    }

    TEST_CASE("best response equals exhaustive oracle") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0, 1);
        std::uniform_int_distribution<std::size_t> dm(1, 6), dn(1, 7);
        for (int t = 0; t < 500; ++t) {
            const std::size_t m = dm(rng), n = dn(rng);
            std::vector<std::vector<double>> p;
            std::vector<double> c(n), q(m), r(m);
            for (std::size_t i = 0; i < n; ++i) p.push_back(oracle::random_simplex_row(m, rng));
            for (auto& x : c) x = u(rng);
            for (auto& x : q) x = u(rng);
            for (auto& x : r) x = u(rng);
            const AgentSetting s(p, c);
            const auto o = OutcomeSpace::from_valuations(q);
            const auto got = best_response(Contract(r), s, {}, o);
            const auto want = oracle::best_response(p, c, q, r, 0);
            REQUIRE(got.accepted == want.accepted);
            REQUIRE(got.action_index == want.action);
        }
    }

    TEST_CASE("principal utility branches") {
        const auto s = identity2();
        const auto q = OutcomeSpace::from_valuations({0, 1});
        CHECK(principal_utility(Contract({0, 0.6}), s, {}, q) == doctest::Approx(0.4));
        CHECK(principal_utility(Contract::zero(2), s, {}, q) == 0.0);
        const AgentSetting costly({{1, 0}, {0, 1}}, {0.2, 2});
        CHECK(principal_utility(Contract::zero(2), costly, {}, q) == 0.0);
        // subscription fee is charged to the principal when a non-default action is taken
        CHECK(principal_utility(Contract({0, 0.6}), s, {0.1, 0.0}, q) == doctest::Approx(0.3));
    }

    TEST_CASE("simulated interactions") {
        const auto s = identity2();
        const auto q = OutcomeSpace::from_valuations({0, 1});
        auto log = simulate_interaction(Contract({0, 0.6}), s, {}, q);
        CHECK(log.accepted());
        CHECK(log.principal_utility == doctest::Approx(0.4));
        log = simulate_interaction(Contract::zero(2), s, {}, q);
        CHECK(log.accepted());
        CHECK(log.principal_utility == 0.0);
        const AgentSetting costly({{1, 0}, {0, 1}}, {0.2, 2});
        log = simulate_interaction(Contract::zero(2), costly, {}, q);
        CHECK_FALSE(log.accepted());
        CHECK(log.principal_utility == 0.0);
    }

    TEST_CASE("sampled interaction realizes one outcome") {
        const AgentSetting s({{1, 0}, {0.5, 0.5}}, {0, 0.1});
        const auto q = OutcomeSpace::from_valuations({0, 2});
        std::mt19937_64 rng(3);
        for (int i = 0; i < 20; ++i) {
            const auto log = simulate_interaction_sampled(Contract({0, 0.5}), s, {}, q, rng);
            REQUIRE(log.accepted());
            const bool low = std::abs(log.principal_utility - 0.0) < 1e-12;
            const bool high = std::abs(log.principal_utility - (2 - 0.5)) < 1e-12;
            CHECK((low || high));
        }
    }

    TEST_CASE("random logs") {
        const auto s = identity2();
        const auto q = OutcomeSpace::from_valuations({0, 1});
        const auto a = generate_random_logs(25, s, {}, q, {}, 9);
        const auto b = generate_random_logs(25, s, {}, q, {}, 9);
        CHECK(a.size() == 25);
        CHECK(a == b);
        const auto zero = generate_random_logs(1, s, {}, q, {0, 0}, 1);
        CHECK(zero[0].contract.is_zero());
        CHECK(zero[0].accepted());
        CHECK(zero[0].principal_utility == 0.0);
        for (const auto& log : a) {
            for (double x : log.contract.payments()) CHECK((x >= 0 && x <= 1));
            CHECK(log == simulate_interaction(log.contract, s, {}, q));
        }
        CHECK_THROWS_AS(generate_random_logs(0, s, {}, q, {}, 1), ModelError);
    }
}

TEST_SUITE("scenario") {
    TEST_CASE("simulated scenario structure") {
        SimScenarioConfig cfg;
        cfg.m_count = 4;
        cfg.n_count = 5;
        cfg.rng_seed = 42;
        const auto sc = generate_sim_setting(cfg);
        CHECK(sc.setting.action_count() == 5);
        CHECK(sc.outcomes.size() == 4);
        for (std::size_t n = 0; n < 5; ++n) {
            const double correlated = 0.7 * dot(sc.setting.row(n), sc.outcomes.valuations());
            // c = 0.7 * correlated + 0.3 * U[0,1]
            CHECK(sc.setting.cost(n) >= 0.7 * correlated - 1e-12);
            CHECK(sc.setting.cost(n) <= 0.7 * correlated + 0.3 + 1e-12);
        }
        CHECK(scenario_digest(sc) == scenario_digest(generate_sim_setting(cfg)));
        cfg.m_count = 1;
        const auto single = generate_sim_setting(cfg);
        for (std::size_t n = 0; n < single.setting.action_count(); ++n) CHECK(single.setting.row(n)[0] == 1.0);
    }

    TEST_CASE("json round trip") {
        SimScenarioConfig cfg;
        cfg.m_count = 3;
        cfg.n_count = 2;
        cfg.rng_seed = 5;
        cfg.alpha = 1e-3;
        Scenario sc = generate_sim_setting(cfg);
        sc.market = {1.6e-4, 1.2e-4};
        const Scenario back = parse_scenario(scenario_to_json(sc));
        CHECK(back.setting == sc.setting);
        CHECK(back.outcomes.valuations() == sc.outcomes.valuations());
        CHECK(back.market == sc.market);
        CHECK(scenario_digest(back) == scenario_digest(sc));
        CHECK(scenario_digest(sc).size() == 16);
    }

    TEST_CASE("parse errors") {
        const std::string ok = R"({"m":2,"n":2,"q":[0,1],"P":[[1,0],[0,1]],"c":[0,0.5],"r_s":0,"c_t":0})";
        CHECK_NOTHROW(parse_scenario(ok));
        CHECK_THROWS_WITH_AS(
            parse_scenario(R"({"m":2,"n":2,"q":[0,1],"P":[[0.5,0.4],[0,1]],"c":[0,0.5],"r_s":0,"c_t":0})"),
            doctest::Contains("row 0"), ScenarioError);
        CHECK_THROWS_WITH_AS(
            parse_scenario(R"({"m":2,"n":2,"q":[0,1],"P":[[1,0],[0,1]],"c":[0],"r_s":0,"c_t":0})"),
            doctest::Contains("dimension mismatch"), ScenarioError);
        CHECK_THROWS_WITH_AS(
            parse_scenario(R"({"m":2,"n":2,"q":[0,1],"P":[[1,0],[0,1]],"c":[0,-1],"r_s":0,"c_t":0})"),
            doctest::Contains("negative cost"), ScenarioError);
        CHECK_THROWS_AS(parse_scenario(R"({"m":2,"n":2,"P":[[1,0],[0,1]],"c":[0,0],"r_s":0,"c_t":0})"),
                        ScenarioError);
        CHECK_THROWS_AS(parse_scenario("{not json"), ScenarioError);
    }

    TEST_CASE("logs round trip") {
        const auto s = identity2();
        const auto q = OutcomeSpace::from_valuations({0, 1});
        const auto logs = generate_random_logs(10, s, {}, q, {}, 2);
        std::stringstream buf;
        write_logs(buf, logs);
        const auto back = parse_logs(buf);
        REQUIRE(back.size() == logs.size());
        for (std::size_t i = 0; i < logs.size(); ++i) {
            CHECK(back[i].response == logs[i].response);
            CHECK(back[i].principal_utility == logs[i].principal_utility);
            CHECK(back[i].contract == logs[i].contract);
        }
    }

    TEST_CASE("sha256 known vector") {
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
