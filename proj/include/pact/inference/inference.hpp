#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pact/core/model.hpp"

namespace pact::inference {

using Distribution = std::vector<double>;

enum class RecoveryStatus { kRecovered, kInfeasible, kNumericalFailure };

struct RecoveryResult {
    RecoveryStatus status{RecoveryStatus::kInfeasible};
    Distribution p;  // set iff kRecovered

    bool recovered() const noexcept { return status == RecoveryStatus::kRecovered; }
};

// Outcome distribution consistent with one accepted log that minimizes the
// expected payment:  min p.r  s.t. sum p = 1, p.(q - r) - r_s = observed, 0 <= p <= 1.
// Throws ModelError for a rejected log.
RecoveryResult recover_distribution(const InteractionLog& log, const OutcomeSpace& outcomes,
                                    const MarketParams& market);

struct ClusterResult {
    std::vector<Distribution> centers;  // renormalized, ascending by center . q
    double inertia{0.0};
    std::size_t requested_k{0};
    bool k_reduced{false};  // fewer points than requested clusters
};

inline constexpr std::size_t kDefaultRestarts = 10;

// k-means (k-means++ seeding, `restarts` independent runs, best inertia kept).
ClusterResult cluster_distributions(const std::vector<Distribution>& points, std::size_t k,
                                    std::span<const double> valuations, std::uint64_t rng_seed,
                                    std::size_t restarts = kDefaultRestarts);

class InferenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultActionGuess = 7;
inline constexpr double kRejectionMargin = 1e-8;

struct SeedSolveResult {
    AgentSetting setting;
    std::size_t accepted_logs{0};
    std::size_t rejected_logs{0};
    std::size_t skipped_infeasible{0};  // accepted logs whose recovery failed
    bool k_reduced{false};
};

// Baseline inference: recover a distribution per accepted log, cluster them
// into `action_guess` actions, then fit costs from IR on accepted logs and
// strict rejection on rejected logs. Throws InferenceError when no accepted
// log yields a distribution.
SeedSolveResult seed_solve(const std::vector<InteractionLog>& logs, const OutcomeSpace& outcomes,
                           const MarketParams& market, std::size_t action_guess = kDefaultActionGuess,
                           std::uint64_t rng_seed = 0);

enum class Violation { kNone, kUtilityMismatch, kIrViolation, kIcViolation, kRejectionViolation };

std::string to_string(Violation v);

struct LogVerdict {
    Violation violation{Violation::kNone};
    std::optional<std::size_t> witness;  // action explaining an accepted log
};

struct ConsistencyReport {
    std::vector<LogVerdict> verdicts;
    std::size_t utility_mismatches{0};
    std::size_t ir_violations{0};
    std::size_t ic_violations{0};
    std::size_t rejection_violations{0};

    bool consistent() const noexcept {
        return utility_mismatches + ir_violations + ic_violations + rejection_violations == 0;
    }
    std::size_t count(Violation v) const noexcept;
};

// Checks a candidate setting against logs. An accepted log needs one action
// that matches the logged utility, is individually rational and is a best
// response (all within `tol`); a rejected log needs every action's contract
// surplus <= tol. Action 0 predicts zero principal utility.
ConsistencyReport validate_setting(const AgentSetting& setting, const std::vector<InteractionLog>& logs,
                                   const OutcomeSpace& outcomes, const MarketParams& market,
                                   double tol);

}  // namespace pact::inference
