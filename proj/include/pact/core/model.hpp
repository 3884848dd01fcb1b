#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pact {

// Raised for malformed inputs: mismatched dimensions, out-of-range values,
// violated structural invariants.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Agent surplus at or above -kAcceptTolerance counts as acceptance.
inline constexpr double kAcceptTolerance = 1e-12;
// Actions whose surplus is within kTieTolerance of the best are tied.
inline constexpr double kTieTolerance = 1e-9;
// Row-sum tolerance for probability rows.
inline constexpr double kStochasticTolerance = 1e-9;

struct Interval {
    double lower{0.0};
    double upper{0.0};
};

// Outcome space O with valuation vector q. Built either from equal-width
// quality intervals (q_m = ln(1 + alpha * median_m)) or from raw valuations,
// in which case intervals and medians are empty and alpha is 0.
class OutcomeSpace {
public:
    static OutcomeSpace from_intervals(double low, double high, std::size_t m_count, double alpha);
    static OutcomeSpace from_valuations(std::vector<double> valuations);

    std::size_t size() const noexcept { return valuations_.size(); }
    const std::vector<Interval>& intervals() const noexcept { return intervals_; }
    const std::vector<double>& medians() const noexcept { return medians_; }
    const std::vector<double>& valuations() const noexcept { return valuations_; }
    double alpha() const noexcept { return alpha_; }
    bool has_intervals() const noexcept { return !intervals_.empty(); }
    double max_valuation() const;

private:
    std::vector<Interval> intervals_;
    std::vector<double> medians_;
    std::vector<double> valuations_;
    double alpha_{0.0};
};

// build_outcome_space(low, high, m, alpha)
inline OutcomeSpace build_outcome_space(double low, double high, std::size_t m_count, double alpha) {
    return OutcomeSpace::from_intervals(low, high, m_count, alpha);
}

// Hidden (or inferred) agent setting: N x M outcome distribution matrix P
// and per-action cost vector c. Action 0 is the default bundled action.
class AgentSetting {
public:
    AgentSetting() = default;
    // Validates stochasticity (within `tolerance`) and nonnegative costs.
    AgentSetting(std::vector<std::vector<double>> p_matrix, std::vector<double> costs,
                 double tolerance = kStochasticTolerance);

    std::size_t action_count() const noexcept { return costs_.size(); }
    std::size_t outcome_count() const noexcept { return p_.empty() ? 0 : p_.front().size(); }
    const std::vector<std::vector<double>>& p_matrix() const noexcept { return p_; }
    std::span<const double> row(std::size_t action) const { return p_.at(action); }
    const std::vector<double>& costs() const noexcept { return costs_; }
    double cost(std::size_t action) const { return costs_.at(action); }

    bool operator==(const AgentSetting&) const = default;

private:
    std::vector<std::vector<double>> p_;
    std::vector<double> costs_;
};

struct MarketParams {
    double subscription_fee{0.0};  // r_s
    double training_cost{0.0};     // c_t

    double subscription_surplus() const noexcept { return subscription_fee - training_cost; }
    bool operator==(const MarketParams&) const = default;
};

class Contract {
public:
    Contract() = default;
    explicit Contract(std::vector<double> payments);
    static Contract zero(std::size_t m_count) { return Contract(std::vector<double>(m_count, 0.0)); }

    std::size_t size() const noexcept { return payments_.size(); }
    const std::vector<double>& payments() const noexcept { return payments_; }
    double operator[](std::size_t m) const { return payments_[m]; }
    bool is_zero() const noexcept;

    bool operator==(const Contract&) const = default;

private:
    std::vector<double> payments_;
};

enum class Response : int { kAccept = 1, kReject = -1 };

struct InteractionLog {
    Contract contract;
    double principal_utility{0.0};
    Response response{Response::kAccept};

    bool accepted() const noexcept { return response == Response::kAccept; }
    bool operator==(const InteractionLog&) const = default;
};

struct AgentUtility {
    double contract_surplus{0.0};  // Delta_b = p_n . r - c_n
    double total{0.0};             // pi_A = Delta_b + Delta_s
};

struct BestResponse {
    std::size_t action_index{0};
    double contract_surplus{0.0};
    bool accepted{true};
};

double dot(std::span<const double> a, std::span<const double> b);

AgentUtility agent_utility(std::size_t action, const Contract& contract, const AgentSetting& setting,
                           const MarketParams& market);

// Principal's payoff if the agent takes `action` under `contract`: zero for the
// default action, p_n . (q - r) - r_s otherwise.
double principal_payoff_for_action(std::size_t action, const Contract& contract,
                                   const AgentSetting& setting, const MarketParams& market,
                                   const OutcomeSpace& outcomes);

// Utility-maximizing agent response. Among actions within kTieTolerance of the
// best surplus, the largest principal payoff wins; payoffs within
// kTieTolerance of that maximum go to the lowest index. A rejected contract
// reports action 0.
BestResponse best_response(const Contract& contract, const AgentSetting& setting,
                           const MarketParams& market, const OutcomeSpace& outcomes);

// Expected principal utility, zero when rejected or when action 0 is taken.
double principal_utility(const Contract& contract, const AgentSetting& setting,
                         const MarketParams& market, const OutcomeSpace& outcomes);

InteractionLog simulate_interaction(const Contract& contract, const AgentSetting& setting,
                                    const MarketParams& market, const OutcomeSpace& outcomes);

// Sampled variant: the realized outcome is drawn from the chosen action's
// distribution, so the logged utility is q_m - r_m - r_s for one outcome m.
InteractionLog simulate_interaction_sampled(const Contract& contract, const AgentSetting& setting,
                                            const MarketParams& market, const OutcomeSpace& outcomes,
                                            std::mt19937_64& rng);

// Per-coordinate uniform payment range for exploration contracts. A negative
// upper bound means "use max_m q_m".
struct ContractSampler {
    double low{0.0};
    double high{-1.0};
};

enum class SimulationMode { kExpected, kSampled };

std::vector<InteractionLog> generate_random_logs(std::size_t count, const AgentSetting& setting,
                                                 const MarketParams& market,
                                                 const OutcomeSpace& outcomes,
                                                 const ContractSampler& sampler,
                                                 std::uint64_t rng_seed,
                                                 SimulationMode mode = SimulationMode::kExpected);

void check_dimensions(const Contract& contract, const AgentSetting& setting);
void check_dimensions(const AgentSetting& setting, const OutcomeSpace& outcomes);

}  // namespace pact
