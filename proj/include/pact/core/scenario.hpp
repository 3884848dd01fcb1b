#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pact/core/model.hpp"

namespace pact {

// A complete principal-agent instance: the hidden setting plus the
// principal-visible outcome valuations and market parameters.
struct Scenario {
    AgentSetting setting;
    OutcomeSpace outcomes;
    MarketParams market;
};

struct SimScenarioConfig {
    std::size_t m_count{2};
    std::size_t n_count{2};
    double beta_c{0.7};
    double beta_p{0.3};
    double valuation_low{0.0};
    double valuation_high{10.0};
    std::uint64_t rng_seed{0};
    // When set, valuations come from equal-width quality intervals over
    // [interval_low, interval_high] instead of uniform sampling.
    std::optional<double> alpha;
    double interval_low{0.9};
    double interval_high{1.8};
    // Multiplier on the independent U[0,1] cost component.
    double independent_cost_scale{1.0};

    void validate() const;
};

// Random scenario: p_n = softmax(N(0, I_M)), q_m ~ U[low, high],
// c_n = (1 - beta_p) * beta_c * (p_n . q) + beta_p * U[0,1] * scale, r_s = c_t = 0.
Scenario generate_sim_setting(const SimScenarioConfig& config);

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario, int indent = 2);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// Short stable digest (hex) of the canonical scenario serialization.
std::string scenario_digest(const Scenario& scenario);

// Logs as JSON Lines: {"contract": [...], "principal_utility": x, "agent_action": 1|-1}
std::vector<InteractionLog> parse_logs(std::istream& in);
std::vector<InteractionLog> load_logs(const std::filesystem::path& path);
void write_logs(std::ostream& out, const std::vector<InteractionLog>& logs);
void save_logs(const std::vector<InteractionLog>& logs, const std::filesystem::path& path);

// Hex SHA-256 of arbitrary bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace pact
