#include "pact/evolution/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "pact/evolution/seed_source.hpp"
#include "pact/inference/inference.hpp"

extern char** environ;

namespace pact::evolution {

using nlohmann::json;

std::string request_to_json(const SandboxRequest& request) {
    json content = json::array();
    for (const auto& log : request.content)
        content.push_back(json{{"Contract", log.contract.payments()},
                               {"Principal Utility", log.principal_utility},
                               {"Agent Action", static_cast<int>(log.response)}});
    return json{{"v", request.v}, {"content", std::move(content)}}.dump();
}

SandboxRequest parse_request(const std::string& text) {
    const json j = json::parse(text);
    SandboxRequest request;
    request.v = j.at("v").get<std::vector<double>>();
    for (const auto& rec : j.at("content")) {
        const int action = rec.at("Agent Action").get<int>();
        if (action != 1 && action != -1) throw ModelError("'Agent Action' must be 1 or -1");
        request.content.push_back({Contract(rec.at("Contract").get<std::vector<double>>()),
                                   rec.at("Principal Utility").get<double>(),
                                   action == 1 ? Response::kAccept : Response::kReject});
    }
    return request;
}

std::string to_string(SandboxErrorKind kind) {
    switch (kind) {
        case SandboxErrorKind::kCrash: return "crash";
        case SandboxErrorKind::kTimeout: return "timeout";
        case SandboxErrorKind::kMalformed: return "malformed";
        case SandboxErrorKind::kBudget: return "budget";
    }
    return "crash";
}

std::optional<SandboxErrorKind> error_kind_from_string(const std::string& name) {
    for (auto kind : {SandboxErrorKind::kCrash, SandboxErrorKind::kTimeout, SandboxErrorKind::kMalformed,
                      SandboxErrorKind::kBudget})
        if (to_string(kind) == name) return kind;
    return std::nullopt;
}

std::string response_to_json(const SandboxResponse& response) {
    if (response.ok()) return json{{"setting", *response.setting}}.dump();
    const auto& err = response.error.value();
    return json{{"error", {{"kind", to_string(err.kind)}, {"detail", err.detail}}}}.dump();
}

SandboxResponse parse_response(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        return SandboxResponse::failure(SandboxErrorKind::kMalformed,
                                        std::string("unparsable runner response: ") + e.what());
    }
    if (!j.is_object())
        return SandboxResponse::failure(SandboxErrorKind::kMalformed, "runner response is not an object");
    const bool has_setting = j.contains("setting");
    const bool has_error = j.contains("error");
    if (has_setting == has_error)
        return SandboxResponse::failure(SandboxErrorKind::kMalformed,
                                        "runner response must carry exactly one of setting/error");
    try {
        if (has_error) {
            const auto& e = j.at("error");
            const auto kind = error_kind_from_string(e.at("kind").get<std::string>());
            if (!kind)
                return SandboxResponse::failure(SandboxErrorKind::kMalformed,
                                                "unknown error kind " + e.at("kind").dump());
            return SandboxResponse::failure(*kind, e.value("detail", std::string{}));
        }
        return SandboxResponse::success(j.at("setting").get<Matrix>());
    } catch (const json::exception& e) {
        return SandboxResponse::failure(SandboxErrorKind::kMalformed,
                                        std::string("runner response has wrong shape: ") + e.what());
    }
}

namespace {

struct Pipe {
    int fd[2]{-1, -1};
    Pipe() {
        if (::pipe2(fd, O_CLOEXEC) != 0) throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
    }
    ~Pipe() { close_both(); }
    void close_end(int i) {
        if (fd[i] >= 0) ::close(fd[i]);
        fd[i] = -1;
    }
    void close_both() {
        close_end(0);
        close_end(1);
    }
};

class TempSource {
public:
    TempSource(const std::filesystem::path& dir, const std::string& source) {
        static std::atomic<unsigned> counter{0};
        path_ = dir / ("pact-candidate-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter++) + ".py");
        std::ofstream out(path_);
        if (!out) throw std::runtime_error("cannot write candidate source to " + path_.string());
        out << source;
    }
    ~TempSource() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string head(const std::string& text, std::size_t limit = 2000) {
    return text.size() <= limit ? text : text.substr(0, limit) + "...";
}

}  // namespace

SubprocessSandboxRunner::SubprocessSandboxRunner(SubprocessRunnerConfig config) : config_(std::move(config)) {
    if (config_.command.empty()) throw std::invalid_argument("sandbox runner command is empty");
    if (config_.timeout_seconds <= 0) throw std::invalid_argument("sandbox timeout must be positive");
    // a runner that exits early must not take the host down with SIGPIPE
    ::signal(SIGPIPE, SIG_IGN);
}

SandboxResponse SubprocessSandboxRunner::run(const std::string& source, const SandboxRequest& request) {
    TempSource file(config_.scratch_dir, source);
    std::vector<std::string> args = config_.command;
    args.insert(args.end(), {"--source", file.path().string(), "--timeout",
                             std::to_string(config_.timeout_seconds)});
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    Pipe in, out, err;
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in.fd[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err.fd[1], STDERR_FILENO);
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    // own process group so a timeout kills the runner's children too
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);

    pid_t pid = -1;
    const int rc = ::posix_spawnp(&pid, argv[0], &actions, &attr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    in.close_end(0);
    out.close_end(1);
    err.close_end(1);
    if (rc != 0)
        return SandboxResponse::failure(SandboxErrorKind::kCrash,
                                        "cannot start sandbox runner '" + args[0] + "': " + std::strerror(rc));

    const std::string payload = request_to_json(request) + "\n";
    std::size_t written = 0;
    ::fcntl(in.fd[1], F_SETFL, O_NONBLOCK);

    std::string stdout_text, stderr_text;
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::seconds(config_.timeout_seconds) + config_.grace;
    bool timed_out = false;
    char buffer[4096];
    while (out.fd[0] >= 0 || err.fd[0] >= 0) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            timed_out = true;
            break;
        }
        std::vector<pollfd> fds;
        if (in.fd[1] >= 0) fds.push_back({in.fd[1], POLLOUT, 0});
        if (out.fd[0] >= 0) fds.push_back({out.fd[0], POLLIN, 0});
        if (err.fd[0] >= 0) fds.push_back({err.fd[0], POLLIN, 0});
        const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        const int ready = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(wait, 200)));
        if (ready < 0 && errno != EINTR) break;
        for (const auto& p : fds) {
            if (p.revents == 0) continue;
            if (p.fd == in.fd[1]) {
                if (p.revents & (POLLERR | POLLHUP)) {
                    in.close_end(1);
                    continue;
                }
                const ssize_t n = ::write(in.fd[1], payload.data() + written, payload.size() - written);
                if (n > 0) written += static_cast<std::size_t>(n);
                if (n < 0 && errno != EAGAIN) in.close_end(1);
                if (written == payload.size()) in.close_end(1);
                continue;
            }
            const ssize_t n = ::read(p.fd, buffer, sizeof buffer);
            if (n > 0) {
                (p.fd == out.fd[0] ? stdout_text : stderr_text).append(buffer, static_cast<std::size_t>(n));
            } else if (n == 0 || errno != EAGAIN) {
                if (p.fd == out.fd[0]) out.close_end(0);
                else err.close_end(0);
            }
        }
    }
    in.close_end(1);

    int status = 0;
    if (timed_out) {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        return SandboxResponse::failure(SandboxErrorKind::kTimeout,
                                        "runner exceeded " + std::to_string(config_.timeout_seconds) +
                                            " s (killed by host)");
    }
    ::waitpid(pid, &status, 0);

    if (WIFSIGNALED(status))
        return SandboxResponse::failure(SandboxErrorKind::kCrash,
                                        "runner killed by signal " + std::to_string(WTERMSIG(status)) +
                                            (stderr_text.empty() ? "" : ": " + head(stderr_text)));
    const int code = WEXITSTATUS(status);
    if (code == 2)
        return SandboxResponse::failure(SandboxErrorKind::kCrash,
                                        "runner protocol error" +
                                            (stderr_text.empty() ? "" : ": " + head(stderr_text)));
    if (code != 0)
        return SandboxResponse::failure(SandboxErrorKind::kCrash,
                                        "runner exited with code " + std::to_string(code) +
                                            (stderr_text.empty() ? "" : ": " + head(stderr_text)));
    return parse_response(stdout_text);
}

namespace {

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

NativeRunner::NativeRunner(MarketParams market) : market_(market) {
    register_solver(kReferenceSeedSource,
                    [this](const SandboxRequest& r) { return native_seed_matrix(r, market_); });
}

void NativeRunner::register_solver(const std::string& source, Solver solver) {
    solvers_[trimmed(source)] = std::move(solver);
}

bool NativeRunner::knows(const std::string& source) const { return solvers_.count(trimmed(source)) > 0; }

SandboxResponse NativeRunner::run(const std::string& source, const SandboxRequest& request) {
    auto it = solvers_.find(trimmed(source));
    if (it == solvers_.end())
        return SandboxResponse::failure(SandboxErrorKind::kCrash,
                                        "native runner: no native implementation for this source");
    try {
        return SandboxResponse::success(it->second(request));
    } catch (const std::exception& e) {
        return SandboxResponse::failure(SandboxErrorKind::kCrash, e.what());
    }
}

Matrix setting_to_matrix(const AgentSetting& setting) {
    Matrix m;
    for (std::size_t n = 0; n < setting.action_count(); ++n) {
        const auto row = setting.row(n);
        std::vector<double> r(row.begin(), row.end());
        r.push_back(setting.cost(n));
        m.push_back(std::move(r));
    }
    return m;
}

Matrix native_seed_matrix(const SandboxRequest& request, const MarketParams& market,
                          std::size_t action_guess) {
    const OutcomeSpace outcomes = OutcomeSpace::from_valuations(request.v);
    const auto result = inference::seed_solve(request.content, outcomes, market, action_guess, 0);
    return setting_to_matrix(result.setting);
}

}  // namespace pact::evolution
