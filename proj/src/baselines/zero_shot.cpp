#include "pact/baselines/baselines.hpp"
#include "pact/evolution/evaluator.hpp"

namespace pact::baselines {

TransferResult zero_shot_transfer(const std::string& candidate_source, const std::vector<InteractionLog>& logs,
                                  const OutcomeSpace& outcomes, const MarketParams& market,
                                  evolution::CandidateRunner& runner) {
    TransferResult result;
    result.solution.contract = Contract::zero(outcomes.size());
    const auto fail = [&](std::string why) {
        result.failed = true;
        result.failure = std::move(why);
        return result;
    };

    const evolution::SandboxResponse response = runner.run(candidate_source, {outcomes.valuations(), logs});
    if (!response.ok()) return fail(to_string(response.error->kind) + ": " + response.error->detail);
    try {
        const AgentSetting setting = evolution::setting_from_matrix(*response.setting, outcomes.size());
        result.solution = design::optimize_contract(setting, outcomes, market);
    } catch (const evolution::InvalidMatrix& e) {
        return fail(e.kind() + ": " + e.what());
    } catch (const std::exception& e) {
        return fail(std::string("crash: ") + e.what());
    }
    return result;
}

}  // namespace pact::baselines
