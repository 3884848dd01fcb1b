#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "pact/baselines/baselines.hpp"

namespace pact::baselines {

std::vector<double> linear_arm_betas(std::size_t grid_size) {
    if (grid_size == 0) throw ModelError("arm grid size must be at least 1");
    std::vector<double> betas(grid_size, 0.0);
    for (std::size_t j = 1; j < grid_size; ++j)
        betas[j] = static_cast<double>(j) / static_cast<double>(grid_size - 1);
    return betas;
}

std::vector<Contract> build_linear_arm_grid(const OutcomeSpace& outcomes, std::size_t grid_size) {
    std::vector<Contract> arms;
    for (double beta : linear_arm_betas(grid_size)) {
        std::vector<double> r = outcomes.valuations();
        for (double& x : r) x *= beta;
        arms.emplace_back(std::move(r));
    }
    return arms;
}

BanditState::BanditState(std::vector<Contract> a)
    : arms(std::move(a)), pull_counts(arms.size(), 0), mean_rewards(arms.size(), 0.0) {}

void BanditState::record(std::size_t arm, double reward) {
    const double n = static_cast<double>(++pull_counts.at(arm));
    mean_rewards[arm] += (reward - mean_rewards[arm]) / n;
    ++round;
}

std::size_t BanditState::best_arm() const {
    std::size_t best = 0;
    for (std::size_t j = 1; j < arms.size(); ++j) {
        if (mean_rewards[j] > mean_rewards[best] ||
            (mean_rewards[j] == mean_rewards[best] && pull_counts[j] > pull_counts[best]))
            best = j;
    }
    return best;
}

BanditResult bandit_run(const AgentSetting& setting, const OutcomeSpace& outcomes, const MarketParams& market,
                        std::size_t rounds, std::size_t grid_size, std::uint64_t rng_seed) {
    return bandit_run(build_linear_arm_grid(outcomes, grid_size), linear_arm_betas(grid_size), setting,
                      outcomes, market, rounds, rng_seed);
}

BanditResult bandit_run(const std::vector<Contract>& arms, const std::vector<double>& betas,
                        const AgentSetting& setting, const OutcomeSpace& outcomes, const MarketParams& market,
                        std::size_t rounds, std::uint64_t rng_seed) {
    if (arms.empty()) throw ModelError("bandit needs at least one arm");
    if (rounds < arms.size())
        throw ModelError("bandit rounds (" + std::to_string(rounds) + ") must cover every arm (" +
                         std::to_string(arms.size()) + ")");
    for (const auto& arm : arms) check_dimensions(arm, setting);

    BanditResult result{0, {}, 0.0, {}, BanditState(arms)};
    BanditState& state = result.state;
    std::mt19937_64 rng(rng_seed);
    std::vector<double> rewards(arms.size());
    for (std::size_t j = 0; j < arms.size(); ++j)
        rewards[j] = principal_utility(arms[j], setting, market, outcomes);

    std::vector<std::size_t> tied;
    for (std::size_t t = 1; t <= rounds; ++t) {
        std::size_t arm = 0;
        if (t <= arms.size()) {
            arm = t - 1;
        } else {
            double best = -std::numeric_limits<double>::infinity();
            tied.clear();
            const double log_t = std::log(static_cast<double>(t));
            for (std::size_t j = 0; j < arms.size(); ++j) {
                const double index =
                    state.mean_rewards[j] + std::sqrt(2.0 * log_t / static_cast<double>(state.pull_counts[j]));
                if (index > best) {
                    best = index;
                    tied.assign(1, j);
                } else if (index == best) {
                    tied.push_back(j);
                }
            }
            arm = tied.size() == 1 ? tied.front()
                                   : tied[std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(rng)];
        }
        state.record(arm, rewards[arm]);
        result.trace.push_back({t, arm, arm < betas.size() ? betas[arm] : std::nan(""), rewards[arm]});
    }
    result.best_arm = state.best_arm();
    result.best_contract = arms[result.best_arm];
    result.best_mean = state.mean_rewards[result.best_arm];
    return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
    out << "round,arm_index,beta,reward\n";
    char buf[128];
    for (const auto& row : trace) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.9g,%.9g\n", row.round, row.arm, row.beta, row.reward);
        out << buf;
    }
}

}  // namespace pact::baselines
