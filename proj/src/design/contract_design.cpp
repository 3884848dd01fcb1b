#include "pact/design/contract_design.hpp"

#include <cmath>
#include <string>

namespace pact::design {

std::optional<Contract> min_pay_contract_for_action(std::size_t action, const AgentSetting& setting,
                                                    const OutcomeSpace& outcomes,
                                                    const MarketParams& market,
                                                    const DesignOptions& options) {
    return plan_for_action(action, setting, outcomes, market, options).contract;
}

ActionPlan plan_for_action(std::size_t action, const AgentSetting& setting, const OutcomeSpace& outcomes,
                           const MarketParams& market, const DesignOptions& options) {
    check_dimensions(setting, outcomes);
    if (action == 0 || action >= setting.action_count())
        throw ModelError("target action must be in [1, N), got " + std::to_string(action));

    const std::size_t m_count = setting.outcome_count();
    const auto target = setting.row(action);
    const double target_cost = setting.cost(action);

    lp::LinearProgram program;
    program.objective.assign(target.begin(), target.end());
    for (std::size_t other = 0; other < setting.action_count(); ++other) {
        if (other == action) continue;
        // IC: (p_other - p_target) . r <= c_other - c_target
        std::vector<double> row(m_count);
        const auto p_other = setting.row(other);
        for (std::size_t m = 0; m < m_count; ++m) row[m] = p_other[m] - target[m];
        program.add_upper(std::move(row), setting.cost(other) - target_cost);
    }
    // IR: p_target . r >= c_target + margin
    std::vector<double> ir(m_count);
    for (std::size_t m = 0; m < m_count; ++m) ir[m] = -target[m];
    program.add_upper(std::move(ir), -(target_cost + options.ir_margin));

    const lp::LpSolution solution = lp::solve_lp(program);
    ActionPlan plan;
    plan.action = action;
    plan.status = solution.status;
    if (solution.optimal()) {
        std::vector<double> payments = solution.x;
        for (auto& v : payments) v = std::max(v, 0.0);
        plan.contract = Contract(std::move(payments));
        plan.principal_utility =
            principal_payoff_for_action(action, *plan.contract, setting, market, outcomes);
    }
    return plan;
}

ContractSolution optimize_contract(const AgentSetting& setting, const OutcomeSpace& outcomes,
                                   const MarketParams& market, const DesignOptions& options) {
    check_dimensions(setting, outcomes);
    ContractSolution best{Contract::zero(setting.outcome_count()), 0, 0.0, {}};
    for (std::size_t n = 1; n < setting.action_count(); ++n) {
        ActionPlan plan = plan_for_action(n, setting, outcomes, market, options);
        if (plan.contract && plan.principal_utility > best.predicted_principal_utility) {
            best.contract = *plan.contract;
            best.target_action = n;
            best.predicted_principal_utility = plan.principal_utility;
        }
        best.per_action.push_back(std::move(plan));
    }
    return best;
}

ContractSolution brute_force_contract(const AgentSetting& setting, const OutcomeSpace& outcomes,
                                      const MarketParams& market, double grid_step, double payment_cap,
                                      double cell_budget) {
    check_dimensions(setting, outcomes);
    if (!(grid_step > 0.0)) throw ModelError("grid step must be positive");
    const double cap = payment_cap < 0.0 ? outcomes.max_valuation() : payment_cap;
    const std::size_t m_count = setting.outcome_count();
    const auto levels = static_cast<std::size_t>(std::floor(cap / grid_step + 1e-9)) + 1;
    const double cells = std::pow(static_cast<double>(levels), static_cast<double>(m_count));
    if (cells > cell_budget)
        throw GridTooLarge("grid of " + std::to_string(cells) + " cells exceeds budget " +
                           std::to_string(cell_budget));

    ContractSolution best{Contract::zero(m_count), 0, 0.0, {}};
    {
        const BestResponse br = best_response(best.contract, setting, market, outcomes);
        best.target_action = br.accepted ? br.action_index : 0;
        best.predicted_principal_utility = principal_utility(best.contract, setting, market, outcomes);
    }

    std::vector<std::size_t> index(m_count, 0);
    std::vector<double> payments(m_count, 0.0);
    while (true) {
        std::size_t pos = 0;
        while (pos < m_count && ++index[pos] == levels) index[pos++] = 0;
        if (pos == m_count) break;
        for (std::size_t m = 0; m < m_count; ++m) payments[m] = static_cast<double>(index[m]) * grid_step;
        Contract candidate(payments);
        const BestResponse br = best_response(candidate, setting, market, outcomes);
        if (!br.accepted || br.action_index == 0) continue;
        const double utility =
            principal_payoff_for_action(br.action_index, candidate, setting, market, outcomes);
        if (utility > best.predicted_principal_utility) {
            best.contract = std::move(candidate);
            best.target_action = br.action_index;
            best.predicted_principal_utility = utility;
        }
    }
    return best;
}

}  // namespace pact::design
