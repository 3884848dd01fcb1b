#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pact/core/model.hpp"
#include "pact/lp/simplex.hpp"

namespace pact::design {

struct ActionPlan {
    std::size_t action{0};
    lp::Status status{lp::Status::kInfeasible};
    std::optional<Contract> contract;  // min-payment contract when feasible
    double principal_utility{0.0};     // p_n . (q - r) - r_s when feasible
};

struct ContractSolution {
    Contract contract;
    std::size_t target_action{0};
    double predicted_principal_utility{0.0};
    std::vector<ActionPlan> per_action;

    bool is_null() const noexcept { return target_action == 0; }
};

struct DesignOptions {
    // Extra agent surplus demanded on top of IR. Zero relies on the
    // principal-favoring tie-break to implement boundary solutions.
    double ir_margin{0.0};
};

// Cheapest contract that makes `action` a best response and individually
// rational. Returns nullopt when no such contract exists.
std::optional<Contract> min_pay_contract_for_action(std::size_t action, const AgentSetting& setting,
                                                    const OutcomeSpace& outcomes,
                                                    const MarketParams& market,
                                                    const DesignOptions& options = {});

ActionPlan plan_for_action(std::size_t action, const AgentSetting& setting, const OutcomeSpace& outcomes,
                           const MarketParams& market, const DesignOptions& options = {});

// Utility-maximizing contract under `setting`: best of the per-action
// min-payment contracts over actions 1..N-1, or the null contract when none
// yields positive utility.
ContractSolution optimize_contract(const AgentSetting& setting, const OutcomeSpace& outcomes,
                                   const MarketParams& market, const DesignOptions& options = {});

class GridTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultCellBudget = 5e7;

// Exhaustive grid search over payments {0, step, 2 step, ...} <= cap per
// outcome, scored with the exact best response. A negative cap means max q.
ContractSolution brute_force_contract(const AgentSetting& setting, const OutcomeSpace& outcomes,
                                      const MarketParams& market, double grid_step,
                                      double payment_cap = -1.0,
                                      double cell_budget = kDefaultCellBudget);

}  // namespace pact::design
