#include "pact/core/scenario.hpp"

#include <algorithm>
#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"

namespace pact {

using nlohmann::json;

void SimScenarioConfig::validate() const {
    if (m_count == 0 || n_count == 0) throw ModelError("scenario config: M and N must be positive");
    if (beta_c < 0.0 || beta_c > 1.0) throw ModelError("scenario config: beta_c must be in [0,1]");
    if (beta_p < 0.0 || beta_p > 1.0) throw ModelError("scenario config: beta_p must be in [0,1]");
    if (!(valuation_low < valuation_high))
        throw ModelError("scenario config: valuation_low must be < valuation_high");
    if (independent_cost_scale < 0.0)
        throw ModelError("scenario config: independent_cost_scale must be >= 0");
}

Scenario generate_sim_setting(const SimScenarioConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t m_count = config.m_count;
    std::vector<std::vector<double>> p(config.n_count, std::vector<double>(m_count));
    for (auto& row : p) {
        for (auto& v : row) v = gauss(rng);
        const double peak = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (auto& v : row) {
            v = std::exp(v - peak);
            total += v;
        }
        for (auto& v : row) v /= total;
    }

    OutcomeSpace outcomes = [&] {
        if (config.alpha)
            return OutcomeSpace::from_intervals(config.interval_low, config.interval_high, m_count,
                                                *config.alpha);
        std::uniform_real_distribution<double> val(config.valuation_low, config.valuation_high);
        std::vector<double> q(m_count);
        for (auto& v : q) v = val(rng);
        return OutcomeSpace::from_valuations(std::move(q));
    }();

    std::vector<double> costs(config.n_count);
    for (std::size_t n = 0; n < config.n_count; ++n) {
        const double correlated = config.beta_c * dot(p[n], outcomes.valuations());
        const double independent = unit(rng) * config.independent_cost_scale;
        costs[n] = (1.0 - config.beta_p) * correlated + config.beta_p * independent;
    }
    return {AgentSetting(std::move(p), std::move(costs)), std::move(outcomes), MarketParams{}};
}

namespace {

double require_number(const json& j, const char* key) {
    if (!j.contains(key)) throw ScenarioError(std::string("missing field '") + key + "'");
    if (!j.at(key).is_number()) throw ScenarioError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> require_vector(const json& j, const std::string& key) {
    if (!j.is_array()) throw ScenarioError("field '" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ScenarioError("field '" + key + "[" + std::to_string(i) + "]' must be a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");

    const auto m = static_cast<long long>(require_number(doc, "m"));
    const auto n = static_cast<long long>(require_number(doc, "n"));
    if (m < 1 || n < 1) throw ScenarioError("fields 'm' and 'n' must be positive");

    const bool has_interval = doc.contains("alpha") || doc.contains("outcome_range");
    const bool has_q = doc.contains("q");
    if (has_interval == has_q)
        throw ScenarioError("exactly one of ('alpha' + 'outcome_range') or 'q' must be present");

    OutcomeSpace outcomes = [&] {
        try {
            if (has_q) return OutcomeSpace::from_valuations(require_vector(doc.at("q"), "q"));
            if (!doc.contains("alpha") || !doc.contains("outcome_range"))
                throw ScenarioError("'alpha' and 'outcome_range' must appear together");
            const auto range = require_vector(doc.at("outcome_range"), "outcome_range");
            if (range.size() != 2) throw ScenarioError("'outcome_range' must be [low, high]");
            return OutcomeSpace::from_intervals(range[0], range[1], static_cast<std::size_t>(m),
                                                require_number(doc, "alpha"));
        } catch (const ModelError& e) {
            throw ScenarioError(e.what());
        }
    }();
    if (outcomes.size() != static_cast<std::size_t>(m))
        throw ScenarioError("dimension mismatch: 'q' has " + std::to_string(outcomes.size()) +
                            " entries, expected m = " + std::to_string(m));

    if (!doc.contains("P") || !doc.at("P").is_array()) throw ScenarioError("field 'P' must be an array");
    const json& pj = doc.at("P");
    if (pj.size() != static_cast<std::size_t>(n))
        throw ScenarioError("dimension mismatch: 'P' has " + std::to_string(pj.size()) +
                            " rows, expected n = " + std::to_string(n));
    std::vector<std::vector<double>> p;
    for (std::size_t row = 0; row < pj.size(); ++row) {
        auto values = require_vector(pj[row], "P[" + std::to_string(row) + "]");
        if (values.size() != static_cast<std::size_t>(m))
            throw ScenarioError("dimension mismatch: 'P[" + std::to_string(row) + "]' has " +
                                std::to_string(values.size()) + " entries, expected m = " +
                                std::to_string(m));
        double sum = 0.0;
        for (std::size_t col = 0; col < values.size(); ++col) {
            if (values[col] < 0.0 || values[col] > 1.0)
                throw ScenarioError("stochasticity violation: 'P[" + std::to_string(row) + "][" +
                                    std::to_string(col) + "]' is outside [0,1]");
            sum += values[col];
        }
        if (std::abs(sum - 1.0) > kStochasticTolerance) {
            std::ostringstream msg;
            msg << "stochasticity violation: row " << row << " of 'P' sums to "
                << std::setprecision(12) << sum;
            throw ScenarioError(msg.str());
        }
        p.push_back(std::move(values));
    }

    if (!doc.contains("c")) throw ScenarioError("missing field 'c'");
    auto costs = require_vector(doc.at("c"), "c");
    if (costs.size() != static_cast<std::size_t>(n))
        throw ScenarioError("dimension mismatch: 'c' has " + std::to_string(costs.size()) +
                            " entries, expected n = " + std::to_string(n));
    for (std::size_t i = 0; i < costs.size(); ++i)
        if (costs[i] < 0.0) throw ScenarioError("negative cost: 'c[" + std::to_string(i) + "]'");

    MarketParams market{require_number(doc, "r_s"), require_number(doc, "c_t")};
    if (market.subscription_fee < 0.0 || market.training_cost < 0.0)
        throw ScenarioError("'r_s' and 'c_t' must be nonnegative");

    try {
        return {AgentSetting(std::move(p), std::move(costs)), std::move(outcomes), market};
    } catch (const ModelError& e) {
        throw ScenarioError(e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string scenario_to_json(const Scenario& scenario, int indent) {
    json doc;
    doc["m"] = scenario.outcomes.size();
    doc["n"] = scenario.setting.action_count();
    if (scenario.outcomes.has_intervals()) {
        doc["alpha"] = scenario.outcomes.alpha();
        doc["outcome_range"] = {scenario.outcomes.intervals().front().lower,
                                scenario.outcomes.intervals().back().upper};
    } else {
        doc["q"] = scenario.outcomes.valuations();
    }
    doc["P"] = scenario.setting.p_matrix();
    doc["c"] = scenario.setting.costs();
    doc["r_s"] = scenario.market.subscription_fee;
    doc["c_t"] = scenario.market.training_cost;
    return doc.dump(indent);
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file " + path.string());
    out << scenario_to_json(scenario) << '\n';
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

std::string scenario_digest(const Scenario& scenario) {
    return sha256_hex(scenario_to_json(scenario, -1)).substr(0, 16);
}

std::vector<InteractionLog> parse_logs(std::istream& in) {
    std::vector<InteractionLog> logs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "log line " + std::to_string(line_no);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ScenarioError(where + ": parse error: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("contract") || !obj.contains("principal_utility") ||
            !obj.contains("agent_action"))
            throw ScenarioError(where + ": expected keys contract, principal_utility, agent_action");
        InteractionLog log;
        try {
            log.contract = Contract(require_vector(obj.at("contract"), "contract"));
        } catch (const ModelError& e) {
            throw ScenarioError(where + ": " + e.what());
        }
        log.principal_utility = require_number(obj, "principal_utility");
        const double action = require_number(obj, "agent_action");
        if (action == 1.0) {
            log.response = Response::kAccept;
        } else if (action == -1.0) {
            log.response = Response::kReject;
        } else {
            throw ScenarioError(where + ": agent_action must be 1 or -1");
        }
        logs.push_back(std::move(log));
    }
    return logs;
}

std::vector<InteractionLog> load_logs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open logs file " + path.string());
    return parse_logs(in);
}

void write_logs(std::ostream& out, const std::vector<InteractionLog>& logs) {
    for (const auto& log : logs) {
        json obj;
        obj["contract"] = log.contract.payments();
        obj["principal_utility"] = log.principal_utility;
        obj["agent_action"] = static_cast<int>(log.response);
        out << obj.dump() << '\n';
    }
}

void save_logs(const std::vector<InteractionLog>& logs, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write logs file " + path.string());
    write_logs(out, logs);
}

}  // namespace pact
