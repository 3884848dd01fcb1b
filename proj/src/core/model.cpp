#include "pact/core/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pact {

OutcomeSpace OutcomeSpace::from_intervals(double low, double high, std::size_t m_count,
                                          double alpha) {
    if (!(low < high)) throw ModelError("outcome range: low must be < high");
    if (m_count == 0) throw ModelError("outcome range: m_count must be positive");
    if (!(alpha > 0.0)) throw ModelError("outcome range: alpha must be positive");

    OutcomeSpace space;
    space.alpha_ = alpha;
    const double width = (high - low) / static_cast<double>(m_count);
    double lower = low;
    for (std::size_t m = 0; m < m_count; ++m) {
        // last bucket closes exactly on `high`
        const double upper = (m + 1 == m_count) ? high : low + width * static_cast<double>(m + 1);
        space.intervals_.push_back({lower, upper});
        const double median = 0.5 * (lower + upper);
        space.medians_.push_back(median);
        space.valuations_.push_back(std::log1p(alpha * median));
        lower = upper;
    }
    return space;
}

OutcomeSpace OutcomeSpace::from_valuations(std::vector<double> valuations) {
    if (valuations.empty()) throw ModelError("valuations must be non-empty");
    for (std::size_t m = 0; m < valuations.size(); ++m) {
        if (!std::isfinite(valuations[m]) || valuations[m] < 0.0)
            throw ModelError("valuation q[" + std::to_string(m) + "] must be finite and >= 0");
    }
    OutcomeSpace space;
    space.valuations_ = std::move(valuations);
    return space;
}

double OutcomeSpace::max_valuation() const {
    return valuations_.empty() ? 0.0 : *std::max_element(valuations_.begin(), valuations_.end());
}

AgentSetting::AgentSetting(std::vector<std::vector<double>> p_matrix, std::vector<double> costs,
                           double tolerance)
    : p_(std::move(p_matrix)), costs_(std::move(costs)) {
    if (p_.empty()) throw ModelError("setting: P must have at least one row");
    if (p_.size() != costs_.size())
        throw ModelError("setting: P has " + std::to_string(p_.size()) + " rows but c has " +
                         std::to_string(costs_.size()) + " entries");
    const std::size_t width = p_.front().size();
    if (width == 0) throw ModelError("setting: P rows must be non-empty");
    for (std::size_t n = 0; n < p_.size(); ++n) {
        const auto& row = p_[n];
        if (row.size() != width)
            throw ModelError("setting: row " + std::to_string(n) + " has width " +
                             std::to_string(row.size()) + ", expected " + std::to_string(width));
        double sum = 0.0;
        for (double v : row) {
            if (!std::isfinite(v) || v < -tolerance || v > 1.0 + tolerance)
                throw ModelError("setting: row " + std::to_string(n) +
                                 " has an entry outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > tolerance)
            throw ModelError("setting: row " + std::to_string(n) + " sums to " +
                             std::to_string(sum) + ", not 1");
        if (!std::isfinite(costs_[n]) || costs_[n] < 0.0)
            throw ModelError("setting: cost " + std::to_string(n) + " is negative or not finite");
    }
}

Contract::Contract(std::vector<double> payments) : payments_(std::move(payments)) {
    for (std::size_t m = 0; m < payments_.size(); ++m) {
        if (!std::isfinite(payments_[m]) || payments_[m] < 0.0)
            throw ModelError("contract: payment " + std::to_string(m) +
                             " must be finite and nonnegative");
    }
}

bool Contract::is_zero() const noexcept {
    return std::all_of(payments_.begin(), payments_.end(), [](double v) { return v == 0.0; });
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_dimensions(const Contract& contract, const AgentSetting& setting) {
    if (contract.size() != setting.outcome_count())
        throw ModelError("contract has " + std::to_string(contract.size()) +
                         " payments but setting has " + std::to_string(setting.outcome_count()) +
                         " outcomes");
}

void check_dimensions(const AgentSetting& setting, const OutcomeSpace& outcomes) {
    if (outcomes.size() != setting.outcome_count())
        throw ModelError("outcome space has " + std::to_string(outcomes.size()) +
                         " outcomes but setting has " + std::to_string(setting.outcome_count()));
}

AgentUtility agent_utility(std::size_t action, const Contract& contract, const AgentSetting& setting,
                           const MarketParams& market) {
    check_dimensions(contract, setting);
    if (action >= setting.action_count()) throw ModelError("action index out of range");
    const double surplus = dot(setting.row(action), contract.payments()) - setting.cost(action);
    return {surplus, surplus + market.subscription_surplus()};
}

double principal_payoff_for_action(std::size_t action, const Contract& contract,
                                   const AgentSetting& setting, const MarketParams& market,
                                   const OutcomeSpace& outcomes) {
    if (action == 0) return 0.0;
    const auto row = setting.row(action);
    const auto& q = outcomes.valuations();
    double value = 0.0;
    for (std::size_t m = 0; m < row.size(); ++m) value += row[m] * (q[m] - contract[m]);
    return value - market.subscription_fee;
}

BestResponse best_response(const Contract& contract, const AgentSetting& setting,
                           const MarketParams& market, const OutcomeSpace& outcomes) {
    check_dimensions(contract, setting);
    check_dimensions(setting, outcomes);
    const std::size_t n_count = setting.action_count();

    std::vector<double> surplus(n_count);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < n_count; ++n) {
        surplus[n] = dot(setting.row(n), contract.payments()) - setting.cost(n);
        best = std::max(best, surplus[n]);
    }
    if (best < -kAcceptTolerance) return {0, surplus[0], false};

    std::vector<double> payoff(n_count, -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < n_count; ++n) {
        if (surplus[n] < best - kTieTolerance) continue;
        payoff[n] = principal_payoff_for_action(n, contract, setting, market, outcomes);
        top = std::max(top, payoff[n]);
    }
    std::size_t chosen = 0;
    while (payoff[chosen] < top - kTieTolerance) ++chosen;
    return {chosen, surplus[chosen], true};
}

double principal_utility(const Contract& contract, const AgentSetting& setting,
                         const MarketParams& market, const OutcomeSpace& outcomes) {
    const BestResponse br = best_response(contract, setting, market, outcomes);
    if (!br.accepted || br.action_index == 0) return 0.0;
    return principal_payoff_for_action(br.action_index, contract, setting, market, outcomes);
}

InteractionLog simulate_interaction(const Contract& contract, const AgentSetting& setting,
                                    const MarketParams& market, const OutcomeSpace& outcomes) {
    const BestResponse br = best_response(contract, setting, market, outcomes);
    InteractionLog log{contract, 0.0, br.accepted ? Response::kAccept : Response::kReject};
    if (br.accepted && br.action_index != 0)
        log.principal_utility =
            principal_payoff_for_action(br.action_index, contract, setting, market, outcomes);
    return log;
}

InteractionLog simulate_interaction_sampled(const Contract& contract, const AgentSetting& setting,
                                            const MarketParams& market, const OutcomeSpace& outcomes,
                                            std::mt19937_64& rng) {
    const BestResponse br = best_response(contract, setting, market, outcomes);
    InteractionLog log{contract, 0.0, br.accepted ? Response::kAccept : Response::kReject};
    if (br.accepted && br.action_index != 0) {
        const auto row = setting.row(br.action_index);
        std::discrete_distribution<std::size_t> pick(row.begin(), row.end());
        const std::size_t m = pick(rng);
        log.principal_utility =
            outcomes.valuations()[m] - contract[m] - market.subscription_fee;
    }
    return log;
}

std::vector<InteractionLog> generate_random_logs(std::size_t count, const AgentSetting& setting,
                                                 const MarketParams& market,
                                                 const OutcomeSpace& outcomes,
                                                 const ContractSampler& sampler,
                                                 std::uint64_t rng_seed, SimulationMode mode) {
    if (count == 0) throw ModelError("log count must be at least 1");
    check_dimensions(setting, outcomes);
    const double high = sampler.high < 0.0 ? outcomes.max_valuation() : sampler.high;
    if (sampler.low < 0.0 || high < sampler.low) throw ModelError("invalid contract sampler range");

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> pay(sampler.low, high);
    std::vector<InteractionLog> logs;
    logs.reserve(count);
    const std::size_t m_count = outcomes.size();
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> payments(m_count);
        for (auto& v : payments) v = (high > sampler.low) ? pay(rng) : sampler.low;
        Contract contract(std::move(payments));
        logs.push_back(mode == SimulationMode::kExpected
                           ? simulate_interaction(contract, setting, market, outcomes)
                           : simulate_interaction_sampled(contract, setting, market, outcomes, rng));
    }
    return logs;
}

}  // namespace pact
