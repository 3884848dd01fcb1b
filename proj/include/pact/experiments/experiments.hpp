#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pact/core/scenario.hpp"
#include "pact/design/contract_design.hpp"
#include "pact/evolution/evolve.hpp"
#include "pact/evolution/llm.hpp"
#include "pact/evolution/sandbox.hpp"

namespace pact::experiments {

// Undefined ratios (zero denominators) are std::nullopt and print as "NA".
struct MetricsReport {
    double pi_t{0.0};       // principal utility of the derived contract
    double pi_t_base{0.0};  // default-action value p_1 . q - r_s
    std::optional<double> pi_t_pct;
    double pi_a{0.0};       // agent utility at the derived contract
    double pi_a_base{0.0};  // subscription surplus r_s - c_t
    std::optional<double> pi_a_pct;
    double pi_t_opt{0.0};   // principal utility of the full-information optimum
    std::optional<double> eta;
};

MetricsReport compute_metrics(const Contract& derived, const Scenario& truth);
// Same, reusing an already computed full-information optimum.
MetricsReport compute_metrics(const Contract& derived, const Scenario& truth,
                              const design::ContractSolution& oracle);

enum class Method { kSeed, kBandit, kZeroShot, kEvolve, kOracle };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
std::vector<Method> parse_method_list(const std::string& csv);

enum class LlmKind { kMock, kReplay, kLive };
LlmKind llm_kind_from_string(const std::string& name);

struct MethodParams {
    std::size_t n_hat{7};
    std::size_t bandit_grid{11};
    std::size_t bandit_rounds{0};  // 0: use K
    evolution::EvolutionParams evolution{};
    LlmKind llm{LlmKind::kMock};
    std::filesystem::path transcript;  // replay input / live recording output
    evolution::LiveLlmConfig live{};
    std::optional<std::size_t> max_llm_calls;
    std::vector<std::string> sandbox_command;  // empty: native in-process runner
    int sandbox_timeout{30};
    std::string zero_shot_source;  // empty: the reference seed source
    std::size_t evaluation_workers{1};
};

// One cell of a sweep: a scenario (simulated from M, N, alpha and the seed,
// or loaded from a file), K logs, one method.
struct ExperimentConfig {
    std::optional<std::filesystem::path> scenario_file;
    std::size_t k{100};
    std::size_t m{2};
    std::size_t n{2};
    std::optional<double> alpha;
    Method method{Method::kSeed};
    std::size_t repeat{0};
    std::uint64_t seed{0};
    MethodParams params{};
    std::optional<std::filesystem::path> artifacts_dir;  // evolve run artifacts
};

struct ExperimentResult {
    Scenario scenario;
    std::string scenario_digest;
    Contract contract;  // the derived contract r~ (null on failure)
    MetricsReport metrics;
    std::string status{"ok"};
    std::optional<std::string> evolution_digest;
};

// Simulation settings for a cell; alpha-based cells scale the independent
// cost share to the valuation range.
SimScenarioConfig sim_config(const ExperimentConfig& config);
Scenario make_scenario(const ExperimentConfig& config);
std::uint64_t log_seed(std::uint64_t scenario_seed);

ExperimentResult run_experiment(const ExperimentConfig& config);

// Seed of repeat r for a base seed.
std::uint64_t repeat_seed(std::uint64_t base, std::size_t repeat);

inline constexpr const char* kCsvHeader =
    "scenario_digest,method,K,M,N,alpha,repeat,seed,pi_T,pi_T_pct,pi_A,pi_A_pct,eta,status";

std::string format_number(double v);  // 9 significant digits
std::string format_optional(const std::optional<double>& v);
std::string csv_row(const ExperimentConfig& config, const ExperimentResult& result);

struct SweepConfig {
    std::vector<std::size_t> k{100};
    std::vector<std::size_t> m{2};
    std::vector<std::size_t> n{2};
    std::vector<std::optional<double>> alpha{std::nullopt};
    std::vector<Method> methods{Method::kSeed};
    std::size_t repeats{5};
    std::uint64_t seed{0};
    std::optional<std::filesystem::path> scenario_file;
    MethodParams params{};
    std::size_t workers{1};

    std::vector<ExperimentConfig> cells() const;  // fixed nesting order
};

// Reads {"K":[..],"M":[..],"N":[..],"alpha":[..|null],"methods":[..],
// "repeats":r,"seed":s} on top of `defaults`.
SweepConfig parse_sweep(const std::string& json_text, SweepConfig defaults = {});
SweepConfig load_sweep(const std::filesystem::path& path, SweepConfig defaults = {});

struct BenchOutput {
    std::filesystem::path csv;
    std::size_t rows{0};
    std::size_t failures{0};
};

// Runs every cell on a bounded pool and writes, in cell order, results.csv,
// contracts.jsonl and scenarios/<digest>.json under `out_dir`.
BenchOutput run_bench(const SweepConfig& sweep, const std::filesystem::path& out_dir);

struct ReplayReport {
    std::size_t rows{0};
    std::size_t mismatches{0};
    double max_abs_error{0.0};
    std::vector<std::string> problems;

    bool ok() const noexcept { return rows > 0 && mismatches == 0; }
};

// Re-simulates each CSV row from the stored scenario and contract.
ReplayReport replay_bench(const std::filesystem::path& out_dir, double tol = 1e-9);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& in);

// Mean metrics per (method, K, M, N, alpha) as an aligned text table.
std::string summarize(const CsvTable& table);

// Evolution plumbing shared by the CLI and the evolve method.
std::unique_ptr<evolution::MockLlm> make_seed_echo_llm(const std::string& seed_source);
std::unique_ptr<evolution::CandidateRunner> make_runner(const MethodParams& params, const MarketParams& market);

class LlmStack {
public:
    LlmStack(const MethodParams& params, const std::string& seed_source);
    evolution::LlmBackend& backend() { return *top_; }

private:
    std::vector<std::unique_ptr<evolution::LlmBackend>> layers_;
    evolution::LlmBackend* top_{nullptr};
};

}  // namespace pact::experiments
