#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace pact::evolution {

enum class LlmRole { kGenerator, kShortReflector, kCrossover, kLongReflector, kMutation };

std::string to_string(LlmRole role);
LlmRole role_from_string(const std::string& name);

class LlmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class LlmConfigError : public LlmError {
public:
    using LlmError::LlmError;
};
class LlmTransportError : public LlmError {
public:
    using LlmError::LlmError;
};
class LlmEmptyCompletion : public LlmError {
public:
    using LlmError::LlmError;
};
// Scripted or recorded responses ran out.
class LlmExhausted : public LlmError {
public:
    using LlmError::LlmError;
};
class LlmBudgetExceeded : public LlmError {
public:
    using LlmError::LlmError;
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    // Returns non-empty completion text or throws an LlmError.
    virtual std::string complete(LlmRole role, const std::string& system, const std::string& user) = 0;
};

// Scripted responses: per-role FIFO queues, then an optional per-role (or
// catch-all) responder.
class MockLlm : public LlmBackend {
public:
    using Responder = std::function<std::string(LlmRole, const std::string& user)>;

    void enqueue(LlmRole role, std::string response);
    void set_responder(LlmRole role, Responder responder);
    void set_default_responder(Responder responder);

    std::string complete(LlmRole role, const std::string& system, const std::string& user) override;

private:
    std::map<LlmRole, std::deque<std::string>> queues_;
    std::map<LlmRole, Responder> responders_;
    Responder fallback_;
};

struct TranscriptEntry {
    LlmRole role{LlmRole::kGenerator};
    std::string system;
    std::string user;
    std::string response;
};

std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& path);
void append_transcript(const std::filesystem::path& path, const TranscriptEntry& entry);

// Serves recorded answers keyed by (role, system, user); repeated prompts
// are answered in recorded order. Never touches the network.
class ReplayLlm : public LlmBackend {
public:
    explicit ReplayLlm(const std::vector<TranscriptEntry>& transcript);
    explicit ReplayLlm(const std::filesystem::path& path) : ReplayLlm(load_transcript(path)) {}

    std::string complete(LlmRole role, const std::string& system, const std::string& user) override;

private:
    std::map<std::tuple<LlmRole, std::string, std::string>, std::deque<std::string>> answers_;
};

// Forwards to another backend and appends every exchange to a transcript file.
class RecordingLlm : public LlmBackend {
public:
    RecordingLlm(LlmBackend& inner, std::filesystem::path path) : inner_(inner), path_(std::move(path)) {}
    std::string complete(LlmRole role, const std::string& system, const std::string& user) override;

private:
    LlmBackend& inner_;
    std::filesystem::path path_;
};

inline constexpr const char* kDefaultApiKeyVariable = "PACT_LLM_API_KEY";

struct LiveLlmConfig {
    std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
    std::string model{"gpt-4.1-mini-2025-04-14"};
    std::string api_key_env{kDefaultApiKeyVariable};
    int attempts{3};
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::seconds timeout{120};
    double temperature{1.0};
};

// Chat-completions style HTTP backend. The API key is read from the
// environment variable named in the config and is never logged.
class LiveLlm : public LlmBackend {
public:
    explicit LiveLlm(LiveLlmConfig config);
    std::string complete(LlmRole role, const std::string& system, const std::string& user) override;

private:
    LiveLlmConfig config_;
    std::string api_key_;
    std::string base_;  // scheme://host[:port]
    std::string path_;
};

// Enforces a maximum number of calls across all roles.
class BudgetedLlm : public LlmBackend {
public:
    BudgetedLlm(LlmBackend& inner, std::size_t max_calls) : inner_(inner), max_calls_(max_calls) {}
    std::string complete(LlmRole role, const std::string& system, const std::string& user) override;
    std::size_t calls() const noexcept { return calls_; }

private:
    LlmBackend& inner_;
    std::size_t max_calls_;
    std::size_t calls_{0};
};

}  // namespace pact::evolution
