#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pact/core/scenario.hpp"
#include "pact/evolution/evaluator.hpp"
#include "pact/evolution/llm.hpp"
#include "pact/evolution/sandbox.hpp"

namespace pact::evolution {

enum class Origin { kSeed, kInit, kCrossover, kMutation };
enum class CandidateState { kPending, kEvaluated, kFailed };

std::string to_string(Origin origin);
std::string to_string(CandidateState state);

class SolverCandidate {
public:
    SolverCandidate(std::size_t id, std::string source, Origin origin, std::vector<std::size_t> parents,
                    int epoch);

    std::size_t id() const noexcept { return id_; }
    const std::string& source() const noexcept { return source_; }
    Origin origin() const noexcept { return origin_; }
    const std::vector<std::size_t>& parents() const noexcept { return parents_; }
    int epoch() const noexcept { return epoch_; }
    CandidateState state() const noexcept { return state_; }
    bool evaluated() const noexcept { return state_ == CandidateState::kEvaluated; }
    double fitness() const;  // throws unless evaluated
    // -inf for failed or pending candidates, so failures rank below any finite fitness
    double rank_key() const noexcept;
    const std::string& failure_kind() const noexcept { return failure_kind_; }
    const std::string& failure_detail() const noexcept { return failure_detail_; }

    bool low_confidence{false};  // code extracted without a fence

    // Each candidate is scored exactly once; a second call throws.
    void set_fitness(double fitness);
    void set_failure(std::string kind, std::string detail);

private:
    std::size_t id_;
    std::string source_;
    Origin origin_;
    std::vector<std::size_t> parents_;
    int epoch_;
    CandidateState state_{CandidateState::kPending};
    double fitness_{0.0};
    std::string failure_kind_;
    std::string failure_detail_;
};

class DegeneratePopulation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSelectionRetries = 20;

// Rank-proportional selection: sorted by fitness descending, the rank-j member
// (j = 0 best) is drawn with weight pop_size - j. Returns (better, worse)
// indices into `population` of two members with distinct fitness.
std::pair<std::size_t, std::size_t> rank_select_pair(const std::vector<const SolverCandidate*>& population,
                                                     std::mt19937_64& rng);

struct EvolutionParams {
    std::size_t init_size{10};       // N_i
    std::size_t selection_size{10};  // N_s, even; N_s / 2 pairs per epoch
    std::size_t mutation_count{2};   // N_m
    std::size_t budget{200};         // I, total candidate evaluations

    void validate() const;
};

struct ReflectionRecord {
    enum class Kind { kShort, kLong };
    Kind kind{Kind::kShort};
    int epoch{0};
    std::string text;
    std::vector<std::size_t> candidates;  // (worse, better) for short reflections
};

struct EvolutionOptions {
    FitnessMode fitness_mode{FitnessMode::kTrueUtility};
    std::size_t workers{1};  // concurrent evaluations per batch
    std::string func_name{"agent_solver"};
};

struct EvolutionHistory {
    std::vector<SolverCandidate> candidates;  // index == id; id 0 is the seed
    std::vector<ReflectionRecord> reflections;
    // Elitist id after initialization (entry 0) and after each epoch.
    std::vector<std::optional<std::size_t>> elitist_trace;
    std::size_t evaluations{0};
    int epochs{0};
    bool partial{false};
    std::string stop_reason;
};

struct EvolutionResult {
    std::optional<std::size_t> elitist;  // none when no candidate has finite fitness
    EvolutionHistory history;
    std::string digest;

    const SolverCandidate* elitist_candidate() const {
        return elitist ? &history.candidates.at(*elitist) : nullptr;
    }
};

EvolutionResult evolve(const std::string& seed_source, const std::vector<InteractionLog>& logs,
                       const Scenario& truth, const EvolutionParams& params, LlmBackend& llm,
                       CandidateRunner& runner, std::uint64_t rng_seed,
                       const EvolutionOptions& options = {});

std::string history_to_json(const EvolutionHistory& history, std::optional<std::size_t> elitist,
                            int indent = -1);
// SHA-256 of the compact canonical history serialization.
std::string history_digest(const EvolutionHistory& history, std::optional<std::size_t> elitist);

// candidates/NNN.src, candidates/NNN.meta.json, reflections.jsonl,
// elitist.src, history.json
void write_artifacts(const EvolutionResult& result, const std::filesystem::path& dir);

}  // namespace pact::evolution
