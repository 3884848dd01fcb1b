#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pact/core/model.hpp"
#include "pact/evolution/llm.hpp"

namespace pact::evolution {

class PromptError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using PromptContext = std::map<std::string, std::string>;

struct RenderedPrompt {
    LlmRole role{LlmRole::kGenerator};
    std::string system;
    std::string user;
};

namespace templates {
extern const char* const kCoderSystem;      // generator, crossover, mutation
extern const char* const kReflectorSystem;  // short and long reflectors
extern const char* const kGeneratorUser;
extern const char* const kShortReflectorUser;
extern const char* const kCrossoverUser;
extern const char* const kLongReflectorUser;
extern const char* const kMutationUser;
extern const char* const kProblemDescription;
extern const char* const kFunctionDescription;  // uses {len_w}
extern const char* const kFunctionSignature;    // uses {version}
}  // namespace templates

// Replaces every {name} in `text` from `context`. Substituted values are not
// rescanned. Throws PromptError naming the first unresolved placeholder.
std::string fill_template(const std::string& text, const PromptContext& context);

const char* user_template(LlmRole role);
const char* system_template(LlmRole role);

RenderedPrompt render_prompt(LlmRole role, const PromptContext& context);

inline constexpr const char* kDefaultFunctionName = "agent_solver";

std::string function_signature(int version);
std::string format_valuations(const std::vector<double>& q);
// Python-literal rendering of the log list handed to candidate solvers.
std::string format_logs(const std::vector<InteractionLog>& logs);

// Shared placeholders for a solver-writing instance: func_name,
// problem_desc, func_desc, v, contract_logs, func_signature0/1.
PromptContext base_context(const OutcomeSpace& outcomes, const std::vector<InteractionLog>& logs,
                           const std::string& func_name = kDefaultFunctionName);

struct ExtractedCode {
    std::string source;
    bool low_confidence{false};  // no code fence found
};

// Contents of the first fenced code block, or the whole text (flagged) when
// there is none. Throws PromptError on an empty extraction.
ExtractedCode extract_code(const std::string& completion);

}  // namespace pact::evolution
