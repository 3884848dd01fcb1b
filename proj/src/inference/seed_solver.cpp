#include <algorithm>

#include "pact/inference/inference.hpp"

namespace pact::inference {

SeedSolveResult seed_solve(const std::vector<InteractionLog>& logs, const OutcomeSpace& outcomes,
                           const MarketParams& market, std::size_t action_guess,
                           std::uint64_t rng_seed) {
    if (action_guess == 0) throw ModelError("seed_solve: action guess must be at least 1");
    SeedSolveResult result;

    std::vector<Distribution> candidates;
    for (const auto& log : logs) {
        if (!log.accepted()) {
            ++result.rejected_logs;
            continue;
        }
        ++result.accepted_logs;
        RecoveryResult recovered = recover_distribution(log, outcomes, market);
        if (recovered.recovered()) {
            candidates.push_back(std::move(recovered.p));
        } else {
            ++result.skipped_infeasible;
        }
    }
    if (candidates.empty())
        throw InferenceError("no valid accepted logs: cannot infer agent strategies");

    ClusterResult clusters =
        cluster_distributions(candidates, action_guess, outcomes.valuations(), rng_seed);
    result.k_reduced = clusters.k_reduced;
    const auto& p = clusters.centers;
    const std::size_t n_count = p.size();

    // IR: each accepted log is attributed to the action paying the most in
    // expectation; that action's cost is the smallest expected payment it saw.
    std::vector<double> costs(n_count, 0.0);
    std::vector<bool> assigned(n_count, false);
    for (const auto& log : logs) {
        if (!log.accepted()) continue;
        std::size_t best = 0;
        double best_pay = dot(p[0], log.contract.payments());
        for (std::size_t n = 1; n < n_count; ++n) {
            const double pay = dot(p[n], log.contract.payments());
            if (pay > best_pay) {
                best_pay = pay;
                best = n;
            }
        }
        costs[best] = assigned[best] ? std::min(costs[best], best_pay) : best_pay;
        assigned[best] = true;
    }

    // Rejections: every action must strictly lose money on a rejected contract.
    for (const auto& log : logs) {
        if (log.accepted()) continue;
        for (std::size_t n = 0; n < n_count; ++n)
            costs[n] = std::max(costs[n], dot(p[n], log.contract.payments()) + kRejectionMargin);
    }

    result.setting = AgentSetting(p, std::move(costs), 1e-7);
    return result;
}

}  // namespace pact::inference
