#include "pact/evolution/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"
#include "pact/evolution/prompts.hpp"

namespace pact::evolution {

using nlohmann::json;

std::string to_string(Origin origin) {
    switch (origin) {
        case Origin::kSeed: return "seed";
        case Origin::kInit: return "init";
        case Origin::kCrossover: return "crossover";
        case Origin::kMutation: return "mutation";
    }
    return "seed";
}

std::string to_string(CandidateState state) {
    switch (state) {
        case CandidateState::kPending: return "pending";
        case CandidateState::kEvaluated: return "evaluated";
        case CandidateState::kFailed: return "failed";
    }
    return "pending";
}

SolverCandidate::SolverCandidate(std::size_t id, std::string source, Origin origin,
                                 std::vector<std::size_t> parents, int epoch)
    : id_(id), source_(std::move(source)), origin_(origin), parents_(std::move(parents)), epoch_(epoch) {
    if (parents_.size() > 2) throw std::invalid_argument("a candidate has at most two parents");
}

double SolverCandidate::fitness() const {
    if (state_ != CandidateState::kEvaluated)
        throw std::logic_error("candidate " + std::to_string(id_) + " has no fitness");
    return fitness_;
}

double SolverCandidate::rank_key() const noexcept {
    return state_ == CandidateState::kEvaluated ? fitness_ : -std::numeric_limits<double>::infinity();
}

void SolverCandidate::set_fitness(double fitness) {
    if (state_ != CandidateState::kPending)
        throw std::logic_error("candidate " + std::to_string(id_) + " was already scored");
    if (!std::isfinite(fitness)) {
        set_failure("invalid-fitness", "non-finite fitness");
        return;
    }
    fitness_ = fitness;
    state_ = CandidateState::kEvaluated;
}

void SolverCandidate::set_failure(std::string kind, std::string detail) {
    if (state_ != CandidateState::kPending)
        throw std::logic_error("candidate " + std::to_string(id_) + " was already scored");
    failure_kind_ = std::move(kind);
    failure_detail_ = std::move(detail);
    state_ = CandidateState::kFailed;
}

std::pair<std::size_t, std::size_t> rank_select_pair(const std::vector<const SolverCandidate*>& population,
                                                     std::mt19937_64& rng) {
    if (population.size() < 2) throw DegeneratePopulation("selection needs at least two members");
    std::vector<std::size_t> order(population.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return population[a]->rank_key() > population[b]->rank_key();
    });
    const auto key = [&](std::size_t rank) { return population[order[rank]]->rank_key(); };
    if (key(0) == key(order.size() - 1))
        throw DegeneratePopulation("all members have identical fitness");

    std::vector<double> weights(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) weights[j] = static_cast<double>(order.size() - j);
    std::discrete_distribution<std::size_t> draw(weights.begin(), weights.end());
    for (int attempt = 0; attempt < kSelectionRetries; ++attempt) {
        const std::size_t a = draw(rng);
        const std::size_t b = draw(rng);
        if (a == b || key(a) == key(b)) continue;
        return a < b ? std::pair{order[a], order[b]} : std::pair{order[b], order[a]};
    }
    return {order.front(), order.back()};
}

void EvolutionParams::validate() const {
    if (init_size == 0) throw std::invalid_argument("init size N_i must be at least 1");
    if (selection_size == 0 || selection_size % 2 != 0)
        throw std::invalid_argument("selection size N_s must be a positive even number");
    if (budget == 0) throw std::invalid_argument("evaluation budget I must be at least 1");
}

namespace {

class Run {
public:
    Run(const std::vector<InteractionLog>& logs, const Scenario& truth, const EvolutionParams& params,
        LlmBackend& llm, CandidateRunner& runner, std::uint64_t rng_seed, const EvolutionOptions& options)
        : params_(params), llm_(llm), runner_(runner), rng_(rng_seed), options_(options) {
        context_.logs = &logs;
        context_.truth = &truth;
        context_.mode = options.fitness_mode;
        prompt_base_ = base_context(truth.outcomes, logs, options.func_name);
    }

    EvolutionResult operator()(const std::string& seed_source) {
        h_.candidates.emplace_back(0, seed_source, Origin::kSeed, std::vector<std::size_t>{}, 0);
        try {
            initialize(seed_source);
            while (h_.stop_reason.empty()) epoch();
        } catch (const LlmError& e) {
            flush();
            h_.partial = true;
            h_.stop_reason = std::string("llm: ") + e.what();
        }
        EvolutionResult result;
        result.elitist = elitist_;
        result.history = std::move(h_);
        result.digest = history_digest(result.history, result.elitist);
        return result;
    }

private:
    std::size_t remaining() const { return params_.budget - h_.evaluations - pending_.size(); }

    std::string ask(LlmRole role, PromptContext extra) {
        PromptContext ctx = prompt_base_;
        for (auto& [k, v] : extra) ctx[k] = std::move(v);
        const RenderedPrompt prompt = render_prompt(role, ctx);
        return llm_.complete(role, prompt.system, prompt.user);
    }

    void add_candidate(const std::string& completion, Origin origin, std::vector<std::size_t> parents) {
        const std::size_t id = h_.candidates.size();
        try {
            ExtractedCode code = extract_code(completion);
            h_.candidates.emplace_back(id, std::move(code.source), origin, std::move(parents), h_.epochs);
            h_.candidates.back().low_confidence = code.low_confidence;
        } catch (const PromptError& e) {
            h_.candidates.emplace_back(id, std::string{}, origin, std::move(parents), h_.epochs);
            h_.candidates.back().set_failure("empty-code", e.what());
        }
        pending_.push_back(id);
    }

    // Scores every pending candidate; each one consumes one evaluation.
    void flush() {
        std::vector<std::size_t> todo;
        for (std::size_t id : pending_)
            if (h_.candidates[id].state() == CandidateState::kPending) todo.push_back(id);
        std::vector<Evaluation> results(todo.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < todo.size(); i = next++) {
                try {
                    results[i] = evaluate_candidate(h_.candidates[todo[i]].source(), runner_, context_);
                } catch (const std::exception& e) {
                    results[i].failure_kind = "crash";
                    results[i].detail = e.what();
                }
            }
        };
        const std::size_t threads = std::min(std::max<std::size_t>(options_.workers, 1), todo.size());
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        for (std::size_t i = 0; i < todo.size(); ++i) {
            auto& c = h_.candidates[todo[i]];
            if (results[i].ok) c.set_fitness(results[i].fitness);
            else c.set_failure(results[i].failure_kind, results[i].detail);
        }
        h_.evaluations += pending_.size();
        for (std::size_t id : pending_) {
            const auto& c = h_.candidates[id];
            if (c.evaluated() && (!elitist_ || c.fitness() > h_.candidates[*elitist_].fitness())) elitist_ = id;
        }
        fresh_.insert(fresh_.end(), pending_.begin(), pending_.end());
        pending_.clear();
    }

    void initialize(const std::string& seed_source) {
        const std::size_t count = std::min(params_.init_size, remaining());
        for (std::size_t i = 0; i < count; ++i)
            add_candidate(ask(LlmRole::kGenerator, {{"seed_func", seed_source}}), Origin::kInit, {});
        flush();
        population_ = std::move(fresh_);
        fresh_.clear();
        h_.elitist_trace.push_back(elitist_);
        if (remaining() == 0) h_.stop_reason = "budget exhausted";
    }

    void epoch() {
        ++h_.epochs;
        std::vector<const SolverCandidate*> members;
        for (std::size_t id : population_) members.push_back(&h_.candidates[id]);

        // selection and short reflections
        std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (worse, better) ids
        std::vector<std::string> thetas;
        const std::size_t pair_count = std::min(params_.selection_size / 2, remaining());
        for (std::size_t i = 0; i < pair_count; ++i) {
            std::pair<std::size_t, std::size_t> pick;
            try {
                pick = rank_select_pair(members, rng_);
            } catch (const DegeneratePopulation&) {
                pairs.clear();
                break;
            }
            pairs.emplace_back(members[pick.second]->id(), members[pick.first]->id());
        }
        for (const auto& [worse, better] : pairs) {
            std::string theta = ask(LlmRole::kShortReflector,
                                    {{"worse_code", h_.candidates[worse].source()},
                                     {"better_code", h_.candidates[better].source()}});
            h_.reflections.push_back({ReflectionRecord::Kind::kShort, h_.epochs, theta, {worse, better}});
            thetas.push_back(std::move(theta));
        }

        // crossover
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto [worse, better] = pairs[i];
            add_candidate(ask(LlmRole::kCrossover, {{"worse_code", h_.candidates[worse].source()},
                                                    {"better_code", h_.candidates[better].source()},
                                                    {"reflection", thetas[i]}}),
                          Origin::kCrossover, {worse, better});
        }
        flush();

        // long reflection
        if (!thetas.empty()) {
            std::string joined;
            for (const auto& t : thetas) joined += (joined.empty() ? "" : "\n") + t;
            long_reflection_ = ask(LlmRole::kLongReflector,
                                   {{"prior_reflection", long_reflection_}, {"new_reflection", joined}});
            h_.reflections.push_back({ReflectionRecord::Kind::kLong, h_.epochs, long_reflection_, {}});
        }

        // mutation of the elitist
        const std::size_t mutations = std::min(params_.mutation_count, remaining());
        const std::size_t base = elitist_.value_or(0);
        for (std::size_t i = 0; i < mutations; ++i)
            add_candidate(ask(LlmRole::kMutation, {{"reflection", long_reflection_},
                                                   {"elitist_code", h_.candidates[base].source()}}),
                          Origin::kMutation, {base});
        flush();

        h_.elitist_trace.push_back(elitist_);
        if (fresh_.empty()) {
            h_.stop_reason = "epoch produced no candidates";
            return;
        }
        population_ = std::move(fresh_);
        fresh_.clear();
        if (remaining() == 0) h_.stop_reason = "budget exhausted";
    }

    const EvolutionParams& params_;
    LlmBackend& llm_;
    CandidateRunner& runner_;
    std::mt19937_64 rng_;
    EvolutionOptions options_;
    EvaluationContext context_;
    PromptContext prompt_base_;

    EvolutionHistory h_;
    std::optional<std::size_t> elitist_;
    std::vector<std::size_t> population_;  // Omega_o
    std::vector<std::size_t> fresh_;       // Omega_n
    std::vector<std::size_t> pending_;
    std::string long_reflection_;
};

}  // namespace

EvolutionResult evolve(const std::string& seed_source, const std::vector<InteractionLog>& logs,
                       const Scenario& truth, const EvolutionParams& params, LlmBackend& llm,
                       CandidateRunner& runner, std::uint64_t rng_seed, const EvolutionOptions& options) {
    params.validate();
    return Run(logs, truth, params, llm, runner, rng_seed, options)(seed_source);
}

namespace {

json candidate_json(const SolverCandidate& c) {
    json j{{"id", c.id()},
           {"origin", to_string(c.origin())},
           {"parents", c.parents()},
           {"epoch", c.epoch()},
           {"state", to_string(c.state())},
           {"fitness", c.evaluated() ? json(c.fitness()) : json(nullptr)},
           {"low_confidence", c.low_confidence},
           {"source_sha256", sha256_hex(c.source())}};
    if (c.state() == CandidateState::kFailed) {
        j["failure_kind"] = c.failure_kind();
        j["failure_detail"] = c.failure_detail();
    }
    return j;
}

json reflection_json(const ReflectionRecord& r) {
    return json{{"kind", r.kind == ReflectionRecord::Kind::kShort ? "short" : "long"},
                {"epoch", r.epoch},
                {"text", r.text},
                {"candidates", r.candidates}};
}

json history_object(const EvolutionHistory& h, std::optional<std::size_t> elitist) {
    json candidates = json::array();
    for (const auto& c : h.candidates) candidates.push_back(candidate_json(c));
    json reflections = json::array();
    for (const auto& r : h.reflections) reflections.push_back(reflection_json(r));
    json trace = json::array();
    for (const auto& e : h.elitist_trace) trace.push_back(e ? json(*e) : json(nullptr));
    return json{{"candidates", std::move(candidates)},
                {"reflections", std::move(reflections)},
                {"elitist_trace", std::move(trace)},
                {"elitist", elitist ? json(*elitist) : json(nullptr)},
                {"evaluations", h.evaluations},
                {"epochs", h.epochs},
                {"partial", h.partial},
                {"stop_reason", h.stop_reason}};
}

std::string padded(std::size_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%03zu", id);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

std::string history_to_json(const EvolutionHistory& history, std::optional<std::size_t> elitist, int indent) {
    return history_object(history, elitist).dump(indent);
}

std::string history_digest(const EvolutionHistory& history, std::optional<std::size_t> elitist) {
    return sha256_hex(history_to_json(history, elitist));
}

void write_artifacts(const EvolutionResult& result, const std::filesystem::path& dir) {
    const auto cdir = dir / "candidates";
    std::filesystem::create_directories(cdir);
    for (const auto& c : result.history.candidates) {
        write_file(cdir / (padded(c.id()) + ".src"), c.source());
        write_file(cdir / (padded(c.id()) + ".meta.json"), candidate_json(c).dump(2) + "\n");
    }
    std::string lines;
    for (const auto& r : result.history.reflections) lines += reflection_json(r).dump() + "\n";
    write_file(dir / "reflections.jsonl", lines);
    if (const auto* e = result.elitist_candidate()) write_file(dir / "elitist.src", e->source());
    json h = history_object(result.history, result.elitist);
    h["digest"] = result.digest;
    write_file(dir / "history.json", h.dump(2) + "\n");
}

}  // namespace pact::evolution
