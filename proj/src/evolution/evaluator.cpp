#include "pact/evolution/evaluator.hpp"

#include <cmath>

#include "pact/inference/inference.hpp"

namespace pact::evolution {

AgentSetting setting_from_matrix(const Matrix& matrix, std::size_t m_count) {
    if (matrix.empty()) throw InvalidMatrix("malformed", "returned matrix has no rows");
    std::vector<std::vector<double>> p;
    std::vector<double> costs;
    for (std::size_t n = 0; n < matrix.size(); ++n) {
        const auto& row = matrix[n];
        if (row.size() != m_count + 1)
            throw InvalidMatrix("malformed", "row " + std::to_string(n) + " has width " +
                                                 std::to_string(row.size()) + ", expected " +
                                                 std::to_string(m_count + 1));
        for (double x : row)
            if (!std::isfinite(x))
                throw InvalidMatrix("malformed", "row " + std::to_string(n) + " has a non-finite entry");
        const double cost = row.back();
        if (cost < 0.0)
            throw InvalidMatrix("invalid-setting", "row " + std::to_string(n) + " has negative cost");
        std::vector<double> probs(row.begin(), row.end() - 1);
        double sum = 0.0;
        for (double& x : probs) {
            if (x < -1e-9)
                throw InvalidMatrix("invalid-setting",
                                    "row " + std::to_string(n) + " has a negative probability");
            x = std::max(x, 0.0);
            sum += x;
        }
        if (std::abs(sum - 1.0) > kRowSumGuard)
            throw InvalidMatrix("invalid-setting",
                                "row " + std::to_string(n) + " sums to " + std::to_string(sum));
        for (double& x : probs) x /= sum;
        p.push_back(std::move(probs));
        costs.push_back(cost);
    }
    return AgentSetting(std::move(p), std::move(costs));
}

Evaluation evaluate_candidate(const std::string& source, CandidateRunner& runner,
                              const EvaluationContext& context) {
    if (context.logs == nullptr || context.truth == nullptr)
        throw std::invalid_argument("evaluation context needs logs and a true scenario");
    const Scenario& truth = *context.truth;
    Evaluation eval;

    const SandboxRequest request{truth.outcomes.valuations(), *context.logs};
    const SandboxResponse response = runner.run(source, request);
    if (!response.ok()) {
        eval.failure_kind = to_string(response.error->kind);
        eval.detail = response.error->detail;
        return eval;
    }
    try {
        eval.setting = setting_from_matrix(*response.setting, truth.outcomes.size());
    } catch (const InvalidMatrix& e) {
        eval.failure_kind = e.kind();
        eval.detail = e.what();
        return eval;
    }

    if (context.mode == FitnessMode::kLogConsistency) {
        const auto report = inference::validate_setting(*eval.setting, *context.logs, truth.outcomes,
                                                        truth.market, context.consistency_tol);
        std::size_t good = 0;
        for (const auto& v : report.verdicts) good += v.violation == inference::Violation::kNone;
        eval.fitness = report.verdicts.empty() ? 0.0
                                               : static_cast<double>(good) / report.verdicts.size();
        eval.ok = true;
        return eval;
    }

    eval.solution = design::optimize_contract(*eval.setting, truth.outcomes, truth.market);
    eval.fitness = principal_utility(eval.solution->contract, truth.setting, truth.market, truth.outcomes);
    eval.ok = true;
    return eval;
}

}  // namespace pact::evolution
