#include <cmath>

#include "pact/inference/inference.hpp"
#include "pact/lp/simplex.hpp"

namespace pact::inference {

RecoveryResult recover_distribution(const InteractionLog& log, const OutcomeSpace& outcomes,
                                    const MarketParams& market) {
    if (!log.accepted()) throw ModelError("recover_distribution called on a rejected log");
    const std::size_t m_count = outcomes.size();
    if (log.contract.size() != m_count)
        throw ModelError("recover_distribution: contract/outcome dimension mismatch");

    const auto& q = outcomes.valuations();
    lp::LinearProgram program;
    program.objective = log.contract.payments();
    program.add_equality(std::vector<double>(m_count, 1.0), 1.0);
    std::vector<double> margin(m_count);
    for (std::size_t m = 0; m < m_count; ++m) margin[m] = q[m] - log.contract[m];
    program.add_equality(std::move(margin), log.principal_utility + market.subscription_fee);
    program.bounds.assign(m_count, lp::Bound{0.0, 1.0});

    const lp::LpSolution solution = lp::solve_lp(program);
    switch (solution.status) {
        case lp::Status::kOptimal: break;
        case lp::Status::kInfeasible: return {RecoveryStatus::kInfeasible, {}};
        default: return {RecoveryStatus::kNumericalFailure, {}};
    }
    return {RecoveryStatus::kRecovered, solution.x};
}

}  // namespace pact::inference
