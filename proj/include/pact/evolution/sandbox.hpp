#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pact/core/model.hpp"

namespace pact::evolution {

using Matrix = std::vector<std::vector<double>>;

// What a candidate solver sees: the valuation vector and the log list, with
// the record keys "Contract", "Principal Utility", "Agent Action".
struct SandboxRequest {
    std::vector<double> v;
    std::vector<InteractionLog> content;
};

std::string request_to_json(const SandboxRequest& request);
SandboxRequest parse_request(const std::string& text);

enum class SandboxErrorKind { kCrash, kTimeout, kMalformed, kBudget };

std::string to_string(SandboxErrorKind kind);
std::optional<SandboxErrorKind> error_kind_from_string(const std::string& name);

struct SandboxError {
    SandboxErrorKind kind{SandboxErrorKind::kCrash};
    std::string detail;

    bool operator==(const SandboxError&) const = default;
};

// Exactly one of setting / error is present.
struct SandboxResponse {
    std::optional<Matrix> setting;
    std::optional<SandboxError> error;

    static SandboxResponse success(Matrix m) { return {std::move(m), std::nullopt}; }
    static SandboxResponse failure(SandboxErrorKind kind, std::string detail) {
        return {std::nullopt, SandboxError{kind, std::move(detail)}};
    }
    bool ok() const noexcept { return setting.has_value(); }
    bool operator==(const SandboxResponse&) const = default;
};

std::string response_to_json(const SandboxResponse& response);
// Malformed wire text is reported as an error(malformed) response.
SandboxResponse parse_response(const std::string& text);

class CandidateRunner {
public:
    virtual ~CandidateRunner() = default;
    virtual SandboxResponse run(const std::string& source, const SandboxRequest& request) = 0;
};

struct SubprocessRunnerConfig {
    // Runner command, e.g. {"sandbox-runner"} or {"python3", "runner.py"}.
    std::vector<std::string> command;
    int timeout_seconds{30};
    // Extra time before the host kills a runner that ignores its own limit.
    std::chrono::milliseconds grace{std::chrono::seconds(5)};
    std::filesystem::path scratch_dir{std::filesystem::temp_directory_path()};
};

// Spawns `<command> --source <file> --timeout <sec>` per candidate, writes
// the request to its stdin and reads one response from its stdout.
class SubprocessSandboxRunner : public CandidateRunner {
public:
    explicit SubprocessSandboxRunner(SubprocessRunnerConfig config);
    SandboxResponse run(const std::string& source, const SandboxRequest& request) override;

    const SubprocessRunnerConfig& config() const noexcept { return config_; }

private:
    SubprocessRunnerConfig config_;
};

// In-process stand-in for the sandbox: candidate sources are looked up by
// exact text (ignoring surrounding whitespace) and mapped to native solvers.
// The reference seed source is pre-registered.
class NativeRunner : public CandidateRunner {
public:
    using Solver = std::function<Matrix(const SandboxRequest&)>;

    explicit NativeRunner(MarketParams market = {});

    void register_solver(const std::string& source, Solver solver);
    bool knows(const std::string& source) const;
    SandboxResponse run(const std::string& source, const SandboxRequest& request) override;

private:
    MarketParams market_;
    std::map<std::string, Solver> solvers_;
};

// Native equivalent of the reference seed source: seed_solve with the given
// action guess, returned in wire layout (rows p_n followed by c_n).
Matrix native_seed_matrix(const SandboxRequest& request, const MarketParams& market,
                          std::size_t action_guess = 7);

Matrix setting_to_matrix(const AgentSetting& setting);

}  // namespace pact::evolution
