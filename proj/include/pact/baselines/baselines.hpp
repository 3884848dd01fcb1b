#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pact/core/model.hpp"
#include "pact/design/contract_design.hpp"
#include "pact/evolution/sandbox.hpp"

namespace pact::baselines {

// Linear contracts r_j = beta_j * q with beta_j = j / (grid_size - 1).
std::vector<Contract> build_linear_arm_grid(const OutcomeSpace& outcomes, std::size_t grid_size);
std::vector<double> linear_arm_betas(std::size_t grid_size);

struct BanditState {
    std::vector<Contract> arms;
    std::vector<std::size_t> pull_counts;
    std::vector<double> mean_rewards;
    std::size_t round{0};

    explicit BanditState(std::vector<Contract> arms);
    void record(std::size_t arm, double reward);
    // Highest mean reward; ties go to more pulls, then the lower index.
    std::size_t best_arm() const;
};

struct TraceRow {
    std::size_t round{0};  // 1-based
    std::size_t arm{0};
    double beta{0.0};      // NaN for arms outside a linear grid
    double reward{0.0};
};

struct BanditResult {
    std::size_t best_arm{0};
    Contract best_contract;
    double best_mean{0.0};
    std::vector<TraceRow> trace;
    BanditState state;
};

// UCB1: every arm once, then argmax mean + sqrt(2 ln t / n_j) with ties drawn
// uniformly by the seeded rng. Rewards are expected principal utilities.
// Requires rounds >= arms.size().
BanditResult bandit_run(const AgentSetting& setting, const OutcomeSpace& outcomes, const MarketParams& market,
                        std::size_t rounds, std::size_t grid_size, std::uint64_t rng_seed);
BanditResult bandit_run(const std::vector<Contract>& arms, const std::vector<double>& betas,
                        const AgentSetting& setting, const OutcomeSpace& outcomes, const MarketParams& market,
                        std::size_t rounds, std::uint64_t rng_seed);

// round,arm_index,beta,reward
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

struct TransferResult {
    design::ContractSolution solution;
    bool failed{false};
    std::string failure;
};

// Runs a previously evolved solver on new logs and designs a contract from the
// setting it returns. Any failure yields the null contract with a reason.
TransferResult zero_shot_transfer(const std::string& candidate_source, const std::vector<InteractionLog>& logs,
                                  const OutcomeSpace& outcomes, const MarketParams& market,
                                  evolution::CandidateRunner& runner);

}  // namespace pact::baselines
