#include "pact/experiments/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pact/baselines/baselines.hpp"
#include "pact/evolution/evaluator.hpp"
#include "pact/evolution/seed_source.hpp"
#include "pact/inference/inference.hpp"

namespace pact::experiments {

namespace {

std::optional<double> ratio(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den;
}

}  // namespace

MetricsReport compute_metrics(const Contract& derived, const Scenario& truth) {
    return compute_metrics(derived, truth, design::optimize_contract(truth.setting, truth.outcomes, truth.market));
}

MetricsReport compute_metrics(const Contract& derived, const Scenario& truth,
                              const design::ContractSolution& oracle) {
    const auto& s = truth.setting;
    MetricsReport r;
    r.pi_t = principal_utility(derived, s, truth.market, truth.outcomes);
    r.pi_t_base = dot(s.row(0), truth.outcomes.valuations()) - truth.market.subscription_fee;
    r.pi_t_pct = ratio(r.pi_t - r.pi_t_base, r.pi_t_base);

    const double surplus = truth.market.subscription_surplus();
    const BestResponse br = best_response(derived, s, truth.market, truth.outcomes);
    r.pi_a = br.accepted ? br.contract_surplus + surplus : surplus;
    r.pi_a_base = surplus;
    r.pi_a_pct = ratio(r.pi_a - r.pi_a_base, r.pi_a_base);

    r.pi_t_opt = principal_utility(oracle.contract, s, truth.market, truth.outcomes);
    r.eta = ratio(r.pi_t, r.pi_t_opt);
    return r;
}

std::string to_string(Method method) {
    switch (method) {
        case Method::kSeed: return "seed";
        case Method::kBandit: return "bandit";
        case Method::kZeroShot: return "zero-shot";
        case Method::kEvolve: return "evolve";
        case Method::kOracle: return "oracle";
    }
    return "seed";
}

Method method_from_string(const std::string& name) {
    for (Method m : {Method::kSeed, Method::kBandit, Method::kZeroShot, Method::kEvolve, Method::kOracle})
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown method '" + name + "' (seed, bandit, zero-shot, evolve, oracle)");
}

std::vector<Method> parse_method_list(const std::string& csv) {
    std::vector<Method> out;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(method_from_string(item));
    if (out.empty()) throw std::invalid_argument("method list is empty");
    return out;
}

LlmKind llm_kind_from_string(const std::string& name) {
    if (name == "mock") return LlmKind::kMock;
    if (name == "replay") return LlmKind::kReplay;
    if (name == "live") return LlmKind::kLive;
    throw std::invalid_argument("unknown LLM backend '" + name + "' (mock, replay, live)");
}

std::uint64_t repeat_seed(std::uint64_t base, std::size_t repeat) {
    return base + 1000003ULL * static_cast<std::uint64_t>(repeat);
}

std::uint64_t log_seed(std::uint64_t scenario_seed) { return scenario_seed ^ 0x5bd1e995ULL; }

SimScenarioConfig sim_config(const ExperimentConfig& config) {
    SimScenarioConfig sim;
    sim.m_count = config.m;
    sim.n_count = config.n;
    sim.rng_seed = config.seed;
    sim.alpha = config.alpha;
    if (config.alpha) {
        // keep the independent cost share on the scale of the valuations
        const OutcomeSpace probe =
            OutcomeSpace::from_intervals(sim.interval_low, sim.interval_high, sim.m_count, *config.alpha);
        sim.independent_cost_scale = probe.max_valuation() / 10.0;
    }
    return sim;
}

Scenario make_scenario(const ExperimentConfig& config) {
    if (config.scenario_file) return load_scenario(*config.scenario_file);
    return generate_sim_setting(sim_config(config));
}

std::unique_ptr<evolution::MockLlm> make_seed_echo_llm(const std::string& seed_source) {
    auto mock = std::make_unique<evolution::MockLlm>();
    const std::string fenced = "```python\n" + seed_source + "\n```";
    mock->set_default_responder([fenced](evolution::LlmRole role, const std::string&) {
        if (role == evolution::LlmRole::kShortReflector || role == evolution::LlmRole::kLongReflector)
            return std::string("Keep the seed construction unchanged.");
        return fenced;
    });
    return mock;
}

std::unique_ptr<evolution::CandidateRunner> make_runner(const MethodParams& params, const MarketParams& market) {
    if (params.sandbox_command.empty()) return std::make_unique<evolution::NativeRunner>(market);
    evolution::SubprocessRunnerConfig cfg;
    cfg.command = params.sandbox_command;
    cfg.timeout_seconds = params.sandbox_timeout;
    return std::make_unique<evolution::SubprocessSandboxRunner>(cfg);
}

LlmStack::LlmStack(const MethodParams& params, const std::string& seed_source) {
    switch (params.llm) {
        case LlmKind::kMock: layers_.push_back(make_seed_echo_llm(seed_source)); break;
        case LlmKind::kReplay:
            if (params.transcript.empty())
                throw evolution::LlmConfigError("replay backend needs a transcript file");
            layers_.push_back(std::make_unique<evolution::ReplayLlm>(params.transcript));
            break;
        case LlmKind::kLive:
            layers_.push_back(std::make_unique<evolution::LiveLlm>(params.live));
            if (!params.transcript.empty())
                layers_.push_back(std::make_unique<evolution::RecordingLlm>(*layers_.back(), params.transcript));
            break;
    }
    if (params.max_llm_calls)
        layers_.push_back(std::make_unique<evolution::BudgetedLlm>(*layers_.back(), *params.max_llm_calls));
    top_ = layers_.back().get();
}

namespace {

std::string clean_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.k == 0) throw std::invalid_argument("K must be at least 1");
    ExperimentResult result;
    result.scenario = make_scenario(config);
    result.scenario_digest = scenario_digest(result.scenario);
    const Scenario& truth = result.scenario;
    const MethodParams& params = config.params;
    result.contract = Contract::zero(truth.outcomes.size());

    const auto logs = generate_random_logs(config.k, truth.setting, truth.market, truth.outcomes, {},
                                           log_seed(config.seed));
    const auto oracle = design::optimize_contract(truth.setting, truth.outcomes, truth.market);

    try {
        switch (config.method) {
            case Method::kOracle: result.contract = oracle.contract; break;
            case Method::kSeed: {
                const auto inferred =
                    inference::seed_solve(logs, truth.outcomes, truth.market, params.n_hat, 0);
                result.contract = design::optimize_contract(inferred.setting, truth.outcomes, truth.market).contract;
                break;
            }
            case Method::kBandit: {
                const std::size_t rounds = params.bandit_rounds ? params.bandit_rounds : config.k;
                result.contract = baselines::bandit_run(truth.setting, truth.outcomes, truth.market, rounds,
                                                        params.bandit_grid, config.seed)
                                      .best_contract;
                break;
            }
            case Method::kZeroShot: {
                auto runner = make_runner(params, truth.market);
                const std::string source =
                    params.zero_shot_source.empty() ? evolution::kReferenceSeedSource : params.zero_shot_source;
                auto transfer = baselines::zero_shot_transfer(source, logs, truth.outcomes, truth.market, *runner);
                result.contract = transfer.solution.contract;
                if (transfer.failed) result.status = "failed: " + transfer.failure;
                break;
            }
            case Method::kEvolve: {
                auto runner = make_runner(params, truth.market);
                LlmStack llm(params, evolution::kReferenceSeedSource);
                evolution::EvolutionOptions options;
                options.workers = params.evaluation_workers;
                const auto run = evolution::evolve(evolution::kReferenceSeedSource, logs, truth, params.evolution,
                                                   llm.backend(), *runner, config.seed, options);
                result.evolution_digest = run.digest;
                if (config.artifacts_dir) evolution::write_artifacts(run, *config.artifacts_dir);
                if (const auto* elitist = run.elitist_candidate()) {
                    evolution::EvaluationContext ctx{&logs, &truth};
                    const auto eval = evolution::evaluate_candidate(elitist->source(), *runner, ctx);
                    if (eval.ok) result.contract = eval.solution->contract;
                    else result.status = "failed: elitist re-evaluation " + eval.failure_kind;
                } else {
                    result.status = "failed: no candidate with finite fitness";
                }
                if (run.history.partial && result.status == "ok")
                    result.status = "partial: " + run.history.stop_reason;
                break;
            }
        }
    } catch (const std::exception& e) {
        result.contract = Contract::zero(truth.outcomes.size());
        result.status = std::string("failed: ") + e.what();
    }
    result.status = clean_status(result.status);
    result.metrics = compute_metrics(result.contract, truth, oracle);
    return result;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

std::string csv_row(const ExperimentConfig& config, const ExperimentResult& result) {
    const auto& m = result.metrics;
    std::ostringstream out;
    out << result.scenario_digest << ',' << to_string(config.method) << ',' << config.k << ','
        << result.scenario.outcomes.size() << ',' << result.scenario.setting.action_count() << ','
        << (config.alpha ? format_number(*config.alpha) : std::string("NA")) << ',' << config.repeat << ','
        << config.seed << ',' << format_number(m.pi_t) << ',' << format_optional(m.pi_t_pct) << ','
        << format_number(m.pi_a) << ',' << format_optional(m.pi_a_pct) << ',' << format_optional(m.eta) << ','
        << result.status;
    return out.str();
}

}  // namespace pact::experiments
