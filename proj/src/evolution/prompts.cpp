#include "pact/evolution/prompts.hpp"

#include <cctype>
#include <sstream>

namespace pact::evolution {

namespace templates {

const char* const kCoderSystem =
    "You are an expert in online learning contract design. Infer a valid agent setting from "
    "historical interaction logs to augment the principal’s utility under the agent’s IR "
    "and IC constraints.\n"
    "\n"
    "Output Python code only, formatted as a Python code block: ```python ...```.";

const char* const kReflectorSystem =
    "You are an expert in online learning contract design. Your task is to give hints to help "
    "infer a better agent setting that not only fits all historical interaction logs but also "
    "augments the principal’s utility under the agent’s IR and IC constraints.";

const char* const kGeneratorUser =
    "Write a {func_name} function for {problem_desc}:\n"
    "\n"
    "{func_desc}\n"
    "\n"
    "The ‘v’ example is shown as:\n"
    "{v}\n"
    "\n"
    "The ‘content’ example is shown as:\n"
    "{contract_logs}.\n"
    "\n"
    "{seed_func}\n"
    "\n"
    "Refer to the format of a trivial design above. Be very creative and give {func_name}_v2.\n"
    "Output code only and enclose your code in a Python block:\n"
    "```python ...```.";

const char* const kShortReflectorUser =
    "Below are two {func_name} functions for {problem_desc}:\n"
    "\n"
    "{func_desc}\n"
    "\n"
    "You are provided with two code versions below, where the second version performs better "
    "than the first one.\n"
    "\n"
    "[Worse code]\n"
    "{worse_code}\n"
    "\n"
    "[Better code]\n"
    "{better_code}\n"
    "\n"
    "You respond with some hints for inferring better agent settings, based on the two code "
    "versions and using less than 20 words.";

const char* const kCrossoverUser =
    "Write a {func_name} function for {problem_desc}:\n"
    "\n"
    "{func_desc}\n"
    "\n"
    "The ‘v’ example is shown as:\n"
    "{v}\n"
    "\n"
    "The ‘content’ example is shown as:\n"
    "{contract_logs}.\n"
    "\n"
    "[Worse code]\n"
    "{func_signature0}\n"
    "{worse_code}\n"
    "\n"
    "[Better code]\n"
    "{func_signature1}\n"
    "{better_code}\n"
    "\n"
    "[Reflection]\n"
    "{reflection}\n"
    "\n"
    "[Improved code]\n"
    "Please write an improved function {func_name}_v2, according to the reflection.";

const char* const kLongReflectorUser =
    "Below is your prior long-term reflection on designing agent setting solver for "
    "{problem_desc}:\n"
    "\n"
    "{prior_reflection}\n"
    "\n"
    "Below are some newly gained insights.\n"
    "\n"
    "{new_reflection}\n"
    "\n"
    "Write constructive hints for inferring better agent settings, based on prior reflections "
    "and new insights, using less than 50 words.";

const char* const kMutationUser =
    "Write a {func_name} function for {problem_desc}:\n"
    "\n"
    "{func_desc}\n"
    "\n"
    "The ‘v’ example is shown as:\n"
    "{v}\n"
    "\n"
    "The ‘content’ example is shown as:\n"
    "{contract_logs}.\n"
    "\n"
    "[Prior reflection]\n"
    "{reflection}\n"
    "\n"
    "[Code]\n"
    "{func_signature1}\n"
    "{elitist_code}\n"
    "\n"
    "[Improved code]\n"
    "Please write a mutated function {func_name}_v2, according to the reflection.";

const char* const kProblemDescription =
    "Inferring a valid agent setting via agent_solver that satisfies all historical interaction "
    "logs between the principal and agent in the online contract design problem.";

const char* const kFunctionDescription =
    "The agent_solver function takes a principal’s reward v and historical interaction logs "
    "content as inputs.\n"
    "\n"
    "Each log includes:\n"
    "- Contract: a {len_w}-dimensional payment vector for {len_w} outcomes;\n"
    "- Principal Utility: the principal’s utility under the contract (zero if the agent "
    "rejects);\n"
    "- Agent Action: 1 for acceptance (expected utility ≥0) and -1 for rejection (expected "
    "utility <0).\n"
    "\n"
    "The function returns an inferred valid agent setting as an n × ({len_w} + 1) matrix:\n"
    "- n (number of actions) is chosen to sufficiently explain the data;\n"
    "- Each row corresponds to one possible agent action;\n"
    "- The first {len_w} columns are probabilities over the {len_w} outcomes (summing to 1);\n"
    "- The final column is the nonnegative cost of performing that action.";

const char* const kFunctionSignature =
    "def agent_solver_v{version}(v: np.ndarray, content: list[dict]) -> np.ndarray:";

}  // namespace templates

std::string fill_template(const std::string& text, const PromptContext& context) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            std::size_t j = i + 1;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            if (j < text.size() && text[j] == '}' && j > i + 1) {
                const std::string name = text.substr(i + 1, j - i - 1);
                auto it = context.find(name);
                if (it == context.end()) throw PromptError("unresolved placeholder {" + name + "}");
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

const char* user_template(LlmRole role) {
    switch (role) {
        case LlmRole::kGenerator: return templates::kGeneratorUser;
        case LlmRole::kShortReflector: return templates::kShortReflectorUser;
        case LlmRole::kCrossover: return templates::kCrossoverUser;
        case LlmRole::kLongReflector: return templates::kLongReflectorUser;
        case LlmRole::kMutation: return templates::kMutationUser;
    }
    return "";
}

const char* system_template(LlmRole role) {
    switch (role) {
        case LlmRole::kShortReflector:
        case LlmRole::kLongReflector: return templates::kReflectorSystem;
        default: return templates::kCoderSystem;
    }
}

RenderedPrompt render_prompt(LlmRole role, const PromptContext& context) {
    return {role, system_template(role), fill_template(user_template(role), context)};
}

std::string function_signature(int version) {
    return fill_template(templates::kFunctionSignature, {{"version", std::to_string(version)}});
}

namespace {

void write_number(std::ostringstream& out, double v) {
    std::ostringstream tmp;
    tmp.precision(10);
    tmp << v;
    std::string s = tmp.str();
    // keep the Python literal a float
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    out << s;
}

void write_vector(std::ostringstream& out, const std::vector<double>& values) {
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ", ";
        write_number(out, values[i]);
    }
    out << ']';
}

}  // namespace

std::string format_valuations(const std::vector<double>& q) {
    std::ostringstream out;
    write_vector(out, q);
    return out.str();
}

std::string format_logs(const std::vector<InteractionLog>& logs) {
    std::ostringstream out;
    out << '[';
    for (std::size_t k = 0; k < logs.size(); ++k) {
        if (k) out << ", ";
        out << "{'Contract': ";
        write_vector(out, logs[k].contract.payments());
        out << ", 'Principal Utility': ";
        write_number(out, logs[k].principal_utility);
        out << ", 'Agent Action': " << static_cast<int>(logs[k].response) << '}';
    }
    out << ']';
    return out.str();
}

PromptContext base_context(const OutcomeSpace& outcomes, const std::vector<InteractionLog>& logs,
                           const std::string& func_name) {
    PromptContext ctx;
    ctx["func_name"] = func_name;
    ctx["problem_desc"] = templates::kProblemDescription;
    ctx["func_desc"] = fill_template(templates::kFunctionDescription,
                                     {{"len_w", std::to_string(outcomes.size())}});
    ctx["v"] = format_valuations(outcomes.valuations());
    ctx["contract_logs"] = format_logs(logs);
    ctx["func_signature0"] = function_signature(0);
    ctx["func_signature1"] = function_signature(1);
    return ctx;
}

ExtractedCode extract_code(const std::string& completion) {
    const auto open = completion.find("```");
    if (open != std::string::npos) {
        auto body_start = completion.find('\n', open + 3);
        if (body_start != std::string::npos) {
            ++body_start;
            const auto close = completion.find("```", body_start);
            std::string body = completion.substr(
                body_start, close == std::string::npos ? std::string::npos : close - body_start);
            while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
            if (body.find_first_not_of(" \t\r\n") == std::string::npos)
                throw PromptError("empty code extraction");
            return {body, false};
        }
    }
    if (completion.find_first_not_of(" \t\r\n") == std::string::npos)
        throw PromptError("empty code extraction");
    return {completion, true};
}

}  // namespace pact::evolution
