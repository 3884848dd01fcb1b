#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pact/core/scenario.hpp"
#include "pact/design/contract_design.hpp"
#include "pact/evolution/sandbox.hpp"

namespace pact::evolution {

enum class FitnessMode {
    kTrueUtility,     // principal utility of the derived contract under the true setting
    kLogConsistency,  // fraction of logs the returned setting explains (offline use)
};

struct EvaluationContext {
    const std::vector<InteractionLog>* logs{nullptr};
    const Scenario* truth{nullptr};
    FitnessMode mode{FitnessMode::kTrueUtility};
    double consistency_tol{1e-6};
};

struct Evaluation {
    bool ok{false};
    double fitness{0.0};
    std::string failure_kind;  // crash | timeout | malformed | budget | invalid-setting
    std::string detail;
    std::optional<AgentSetting> setting;
    std::optional<design::ContractSolution> solution;
};

class InvalidMatrix : public std::runtime_error {
public:
    InvalidMatrix(std::string kind, const std::string& detail)
        : std::runtime_error(detail), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

inline constexpr double kRowSumGuard = 1e-6;

// Structural check of a returned n x (M+1) matrix; rows within kRowSumGuard
// of stochastic are renormalized. Throws InvalidMatrix (kind "malformed" for
// shape/finiteness, "invalid-setting" for negative cost or probability).
AgentSetting setting_from_matrix(const Matrix& matrix, std::size_t m_count);

Evaluation evaluate_candidate(const std::string& source, CandidateRunner& runner,
                              const EvaluationContext& context);

}  // namespace pact::evolution
