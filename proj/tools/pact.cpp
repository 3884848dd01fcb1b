#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pact/baselines/baselines.hpp"
#include "pact/core/scenario.hpp"
#include "pact/design/contract_design.hpp"
#include "pact/evolution/evolve.hpp"
#include "pact/evolution/seed_source.hpp"
#include "pact/experiments/experiments.hpp"
#include "pact/inference/inference.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pact;

namespace {

struct Global {
    std::uint64_t seed{0};
    std::string out;
    std::size_t repeats{5};
};

void emit(const Global& g, const std::string& default_name, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text << '\n';
        return;
    }
    fs::path path(g.out);
    if (fs::is_directory(path)) path /= default_name;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text << '\n';
    std::cerr << "wrote " << path.string() << '\n';
}

json contract_json(const design::ContractSolution& s) {
    return json{{"contract", s.contract.payments()},
                {"target_action", s.target_action},
                {"predicted_principal_utility", s.predicted_principal_utility},
                {"null_contract", s.is_null()}};
}

struct SimOptions {
    std::size_t m{2};
    std::size_t n{2};
    std::optional<double> alpha;
    double beta_c{0.7};
    double beta_p{0.3};

    void add(CLI::App* cmd) {
        cmd->add_option("--m", m, "number of outcomes")->check(CLI::PositiveNumber);
        cmd->add_option("--n", n, "number of agent actions")->check(CLI::PositiveNumber);
        cmd->add_option("--alpha", alpha, "valuation scale (interval-based outcome space)");
        cmd->add_option("--beta-c", beta_c, "correlated cost weight");
        cmd->add_option("--beta-p", beta_p, "independent cost share");
    }

    Scenario make(std::uint64_t seed) const {
        experiments::ExperimentConfig cfg;
        cfg.m = m;
        cfg.n = n;
        cfg.alpha = alpha;
        cfg.seed = seed;
        SimScenarioConfig sim = experiments::sim_config(cfg);
        sim.beta_c = beta_c;
        sim.beta_p = beta_p;
        return generate_sim_setting(sim);
    }
};

Scenario scenario_from(const std::string& file, const SimOptions& sim, std::uint64_t seed) {
    return file.empty() ? sim.make(seed) : load_scenario(file);
}

std::vector<InteractionLog> logs_from(const std::string& file, const Scenario& s, std::size_t k,
                                      std::uint64_t seed) {
    if (!file.empty()) return load_logs(file);
    return generate_random_logs(k, s.setting, s.market, s.outcomes, {}, experiments::log_seed(seed));
}

std::vector<std::string> split_command(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string word;
    while (in >> word) out.push_back(word);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pact: principal-agent contract design from interaction logs"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--seed", g.seed, "base RNG seed");
    app.add_option("--out", g.out, "output file or directory");
    app.add_option("--repeats", g.repeats, "repeats per sweep cell")->check(CLI::PositiveNumber);

    // gen
    auto* gen = app.add_subcommand("gen", "simulate a scenario and its interaction logs");
    SimOptions gen_sim;
    gen_sim.add(gen);
    std::size_t gen_k = 100;
    std::string gen_scenario;
    std::string gen_mode = "expected";
    gen->add_option("--k", gen_k, "number of logs")->check(CLI::PositiveNumber);
    gen->add_option("--scenario", gen_scenario, "reuse an existing scenario file");
    gen->add_option("--mode", gen_mode, "log semantics")->check(CLI::IsMember({"expected", "sampled"}));

    // seed-solve
    auto* seed_cmd = app.add_subcommand("seed-solve", "infer an agent setting with the seed solver");
    std::string ss_scenario, ss_logs;
    std::size_t ss_n_hat = inference::kDefaultActionGuess;
    seed_cmd->add_option("--scenario", ss_scenario, "scenario file (valuations and market)")->required();
    seed_cmd->add_option("--logs", ss_logs, "logs file (JSON Lines)")->required();
    seed_cmd->add_option("--n-hat", ss_n_hat, "number of inferred actions")->check(CLI::PositiveNumber);

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "utility-maximizing contract for a setting");
    std::string opt_scenario;
    double opt_grid = 0.0;
    opt_cmd->add_option("--scenario", opt_scenario, "scenario file")->required();
    opt_cmd->add_option("--grid", opt_grid, "also brute-force on a grid with this step");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "check a setting against interaction logs");
    std::string val_scenario, val_logs;
    double val_tol = 1e-6;
    val_cmd->add_option("--scenario", val_scenario, "scenario file holding the setting to check")->required();
    val_cmd->add_option("--logs", val_logs, "logs file")->required();
    val_cmd->add_option("--tol", val_tol, "tolerance");

    // bandit
    auto* bandit_cmd = app.add_subcommand("bandit", "UCB1 over linear contracts");
    SimOptions bandit_sim;
    bandit_sim.add(bandit_cmd);
    std::string bandit_scenario, bandit_trace;
    std::size_t bandit_rounds = 300, bandit_grid = 11;
    bandit_cmd->add_option("--scenario", bandit_scenario, "scenario file (default: simulate)");
    bandit_cmd->add_option("--rounds", bandit_rounds, "interaction rounds");
    bandit_cmd->add_option("--grid", bandit_grid, "number of linear arms")->check(CLI::PositiveNumber);
    bandit_cmd->add_option("--trace", bandit_trace, "write the per-round CSV trace here");

    // evolve
    auto* evo_cmd = app.add_subcommand("evolve", "evolve solver candidates with an LLM backend");
    SimOptions evo_sim;
    evo_sim.add(evo_cmd);
    std::string evo_scenario, evo_logs, evo_llm = "mock", evo_transcript, evo_runner, evo_endpoint, evo_model;
    std::size_t evo_k = 100;
    evolution::EvolutionParams evo_params;
    std::optional<std::size_t> evo_max_calls;
    int evo_timeout = 30;
    std::size_t evo_workers = 1;
    evo_cmd->add_option("--scenario", evo_scenario, "true scenario file (default: simulate)");
    evo_cmd->add_option("--logs", evo_logs, "logs file (default: simulate K logs)");
    evo_cmd->add_option("--k", evo_k, "number of simulated logs")->check(CLI::PositiveNumber);
    evo_cmd->add_option("--llm", evo_llm, "LLM backend")->check(CLI::IsMember({"mock", "replay", "live"}));
    evo_cmd->add_option("--iters", evo_params.budget, "evaluation budget I")->check(CLI::PositiveNumber);
    evo_cmd->add_option("--init", evo_params.init_size, "initial population N_i")->check(CLI::PositiveNumber);
    evo_cmd->add_option("--select", evo_params.selection_size, "selection size N_s (even)");
    evo_cmd->add_option("--mutations", evo_params.mutation_count, "mutations per epoch N_m");
    evo_cmd->add_option("--max-llm-calls", evo_max_calls, "stop after this many LLM calls");
    evo_cmd->add_option("--transcript", evo_transcript, "replay input, or live recording output");
    evo_cmd->add_option("--endpoint", evo_endpoint, "live chat-completions URL");
    evo_cmd->add_option("--model", evo_model, "live model name");
    evo_cmd->add_option("--sandbox-runner", evo_runner, "sandbox runner command (default: native stub)");
    evo_cmd->add_option("--sandbox-timeout", evo_timeout, "per-candidate timeout in seconds");
    evo_cmd->add_option("--workers", evo_workers, "concurrent evaluations");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark sweep and write results.csv");
    std::string bench_sweep, bench_methods = "seed,bandit,oracle", bench_scenario, bench_runner;
    std::vector<std::size_t> bench_k{100}, bench_m{2}, bench_n{2};
    std::vector<double> bench_alpha;
    std::size_t bench_workers = 1, bench_iters = 200, bench_n_hat = inference::kDefaultActionGuess;
    bool bench_verify = false;
    bench_cmd->add_option("--sweep", bench_sweep, "sweep JSON file");
    bench_cmd->add_option("--k", bench_k, "K values")->delimiter(',');
    bench_cmd->add_option("--m", bench_m, "M values")->delimiter(',');
    bench_cmd->add_option("--n", bench_n, "N values")->delimiter(',');
    bench_cmd->add_option("--alpha", bench_alpha, "alpha values")->delimiter(',');
    bench_cmd->add_option("--methods", bench_methods, "comma-separated methods");
    bench_cmd->add_option("--scenario", bench_scenario, "fixed scenario file instead of simulation");
    bench_cmd->add_option("--workers", bench_workers, "concurrent cells");
    bench_cmd->add_option("--iters", bench_iters, "evolution budget for the evolve method");
    bench_cmd->add_option("--n-hat", bench_n_hat, "seed solver action guess");
    bench_cmd->add_option("--sandbox-runner", bench_runner, "sandbox runner command");
    bench_cmd->add_flag("--verify", bench_verify, "replay every row after writing");

    // report
    auto* report_cmd = app.add_subcommand("report", "summarize a results CSV");
    std::string report_csv;
    bool report_replay = false;
    report_cmd->add_option("--csv", report_csv, "results CSV")->required();
    report_cmd->add_flag("--replay", report_replay, "re-simulate rows from the sidecar files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // help and version requests exit 0; usage errors share exit code 2
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            const Scenario s = scenario_from(gen_scenario, gen_sim, g.seed);
            const auto logs = generate_random_logs(
                gen_k, s.setting, s.market, s.outcomes, {}, experiments::log_seed(g.seed),
                gen_mode == "sampled" ? SimulationMode::kSampled : SimulationMode::kExpected);
            const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
            fs::create_directories(dir);
            save_scenario(s, dir / "scenario.json");
            save_logs(logs, dir / "logs.jsonl");
            std::size_t accepted = 0;
            for (const auto& l : logs) accepted += l.accepted();
            std::cout << "scenario " << scenario_digest(s) << ": " << logs.size() << " logs (" << accepted
                      << " accepted) written to " << dir.string() << '\n';
            return 0;
        }
        if (seed_cmd->parsed()) {
            Scenario s = load_scenario(ss_scenario);
            const auto logs = load_logs(ss_logs);
            const auto result = inference::seed_solve(logs, s.outcomes, s.market, ss_n_hat, g.seed);
            s.setting = result.setting;
            emit(g, "inferred.json", scenario_to_json(s));
            std::cerr << "accepted " << result.accepted_logs << ", rejected " << result.rejected_logs
                      << ", skipped " << result.skipped_infeasible << (result.k_reduced ? ", k reduced" : "")
                      << '\n';
            return 0;
        }
        if (opt_cmd->parsed()) {
            const Scenario s = load_scenario(opt_scenario);
            json out = contract_json(design::optimize_contract(s.setting, s.outcomes, s.market));
            if (opt_grid > 0.0)
                out["grid"] = contract_json(design::brute_force_contract(s.setting, s.outcomes, s.market, opt_grid));
            emit(g, "contract.json", out.dump(2));
            return 0;
        }
        if (val_cmd->parsed()) {
            const Scenario s = load_scenario(val_scenario);
            const auto report =
                inference::validate_setting(s.setting, load_logs(val_logs), s.outcomes, s.market, val_tol);
            if (report.consistent()) {
                std::cout << "consistent\n";
                return 0;
            }
            std::cout << "inconsistent: utility-mismatch=" << report.utility_mismatches
                      << " ir-violation=" << report.ir_violations << " ic-violation=" << report.ic_violations
                      << " rejection-violation=" << report.rejection_violations << '\n';
            return 1;
        }
        if (bandit_cmd->parsed()) {
            const Scenario s = scenario_from(bandit_scenario, bandit_sim, g.seed);
            const auto r = baselines::bandit_run(s.setting, s.outcomes, s.market, bandit_rounds, bandit_grid, g.seed);
            if (!bandit_trace.empty()) {
                const fs::path trace_path(bandit_trace);
                if (trace_path.has_parent_path()) fs::create_directories(trace_path.parent_path());
                std::ofstream trace(trace_path);
                if (!trace) throw std::runtime_error("cannot write " + bandit_trace);
                baselines::write_trace_csv(trace, r.trace);
            }
            json out{{"best_arm", r.best_arm},
                     {"beta", baselines::linear_arm_betas(bandit_grid)[r.best_arm]},
                     {"contract", r.best_contract.payments()},
                     {"mean_reward", r.best_mean},
                     {"pull_counts", r.state.pull_counts}};
            emit(g, "bandit.json", out.dump(2));
            return 0;
        }
        if (evo_cmd->parsed()) {
            const Scenario s = scenario_from(evo_scenario, evo_sim, g.seed);
            const auto logs = logs_from(evo_logs, s, evo_k, g.seed);
            experiments::MethodParams mp;
            mp.llm = experiments::llm_kind_from_string(evo_llm);
            mp.transcript = evo_transcript;
            mp.max_llm_calls = evo_max_calls;
            if (!evo_endpoint.empty()) mp.live.endpoint = evo_endpoint;
            if (!evo_model.empty()) mp.live.model = evo_model;
            mp.sandbox_command = split_command(evo_runner);
            mp.sandbox_timeout = evo_timeout;
            auto runner = experiments::make_runner(mp, s.market);
            experiments::LlmStack llm(mp, evolution::kReferenceSeedSource);
            evolution::EvolutionOptions options;
            options.workers = evo_workers;
            const auto run = evolution::evolve(evolution::kReferenceSeedSource, logs, s, evo_params, llm.backend(),
                                               *runner, g.seed, options);
            if (!g.out.empty()) evolution::write_artifacts(run, g.out);
            const auto* e = run.elitist_candidate();
            std::cout << "evaluations " << run.history.evaluations << ", epochs " << run.history.epochs
                      << (run.history.partial ? " (partial)" : "") << "\nstop: " << run.history.stop_reason
                      << "\nelitist: "
                      << (e ? "#" + std::to_string(e->id()) + " fitness " + experiments::format_number(e->fitness())
                            : std::string("none"))
                      << "\ndigest " << run.digest << '\n';
            return 0;
        }
        if (bench_cmd->parsed()) {
            experiments::SweepConfig sweep;
            sweep.k = bench_k;
            sweep.m = bench_m;
            sweep.n = bench_n;
            if (!bench_alpha.empty()) {
                sweep.alpha.clear();
                for (double a : bench_alpha) sweep.alpha.emplace_back(a);
            }
            sweep.methods = experiments::parse_method_list(bench_methods);
            sweep.repeats = g.repeats;
            sweep.seed = g.seed;
            sweep.workers = bench_workers;
            if (!bench_scenario.empty()) sweep.scenario_file = bench_scenario;
            sweep.params.evolution.budget = bench_iters;
            sweep.params.n_hat = bench_n_hat;
            sweep.params.sandbox_command = split_command(bench_runner);
            if (!bench_sweep.empty()) sweep = experiments::load_sweep(bench_sweep, sweep);
            const fs::path dir = g.out.empty() ? fs::path("bench-out") : fs::path(g.out);
            const auto out = experiments::run_bench(sweep, dir);
            std::cout << out.rows << " rows written to " << out.csv.string();
            if (out.failures) std::cout << " (" << out.failures << " with non-ok status)";
            std::cout << '\n';
            if (bench_verify) {
                const auto replay = experiments::replay_bench(dir);
                std::cout << "replay: " << replay.rows << " rows, " << replay.mismatches << " mismatches\n";
                for (const auto& p : replay.problems) std::cerr << "  " << p << '\n';
                if (!replay.ok()) return 1;
            }
            return 0;
        }
        if (report_cmd->parsed()) {
            std::ifstream in(report_csv);
            if (!in) throw std::runtime_error("cannot open " + report_csv);
            std::cout << experiments::summarize(experiments::read_csv(in));
            if (report_replay) {
                const auto replay = experiments::replay_bench(fs::path(report_csv).parent_path());
                std::cout << "replay: " << replay.rows << " rows, " << replay.mismatches
                          << " mismatches, max |error| " << experiments::format_number(replay.max_abs_error) << '\n';
                for (const auto& p : replay.problems) std::cerr << "  " << p << '\n';
                if (!replay.ok()) return 1;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
