#include <algorithm>
#include <cmath>
#include <limits>

#include "pact/inference/inference.hpp"

namespace pact::inference {

std::string to_string(Violation v) {
    switch (v) {
        case Violation::kNone: return "none";
        case Violation::kUtilityMismatch: return "utility-mismatch";
        case Violation::kIrViolation: return "ir-violation";
        case Violation::kIcViolation: return "ic-violation";
        case Violation::kRejectionViolation: return "rejection-violation";
    }
    return "unknown";
}

std::size_t ConsistencyReport::count(Violation v) const noexcept {
    switch (v) {
        case Violation::kUtilityMismatch: return utility_mismatches;
        case Violation::kIrViolation: return ir_violations;
        case Violation::kIcViolation: return ic_violations;
        case Violation::kRejectionViolation: return rejection_violations;
        case Violation::kNone: break;
    }
    return verdicts.size() - (utility_mismatches + ir_violations + ic_violations + rejection_violations);
}

ConsistencyReport validate_setting(const AgentSetting& setting, const std::vector<InteractionLog>& logs,
                                   const OutcomeSpace& outcomes, const MarketParams& market,
                                   double tol) {
    check_dimensions(setting, outcomes);
    const std::size_t n_count = setting.action_count();
    ConsistencyReport report;
    report.verdicts.reserve(logs.size());

    for (const auto& log : logs) {
        check_dimensions(log.contract, setting);
        std::vector<double> surplus(n_count);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < n_count; ++n) {
            surplus[n] = dot(setting.row(n), log.contract.payments()) - setting.cost(n);
            best = std::max(best, surplus[n]);
        }

        LogVerdict verdict;
        if (!log.accepted()) {
            if (best > tol) verdict.violation = Violation::kRejectionViolation;
        } else {
            bool any_match = false;
            bool any_rational = false;
            for (std::size_t n = 0; n < n_count; ++n) {
                const double predicted =
                    principal_payoff_for_action(n, log.contract, setting, market, outcomes);
                if (std::abs(predicted - log.principal_utility) > tol) continue;
                any_match = true;
                if (surplus[n] < -tol) continue;
                any_rational = true;
                if (surplus[n] < best - tol) continue;
                verdict.witness = n;
                break;
            }
            if (!verdict.witness) {
                verdict.violation = !any_match      ? Violation::kUtilityMismatch
                                    : !any_rational ? Violation::kIrViolation
                                                    : Violation::kIcViolation;
            }
        }
        switch (verdict.violation) {
            case Violation::kUtilityMismatch: ++report.utility_mismatches; break;
            case Violation::kIrViolation: ++report.ir_violations; break;
            case Violation::kIcViolation: ++report.ic_violations; break;
            case Violation::kRejectionViolation: ++report.rejection_violations; break;
            case Violation::kNone: break;
        }
        report.verdicts.push_back(verdict);
    }
    return report;
}

}  // namespace pact::inference
