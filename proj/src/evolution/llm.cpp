#include "httplib.h"

#include "pact/evolution/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace pact::evolution {

using nlohmann::json;

std::string to_string(LlmRole role) {
    switch (role) {
        case LlmRole::kGenerator: return "generator";
        case LlmRole::kShortReflector: return "short-reflector";
        case LlmRole::kCrossover: return "crossover";
        case LlmRole::kLongReflector: return "long-reflector";
        case LlmRole::kMutation: return "mutation";
    }
    return "unknown";
}

LlmRole role_from_string(const std::string& name) {
    for (LlmRole role : {LlmRole::kGenerator, LlmRole::kShortReflector, LlmRole::kCrossover,
                         LlmRole::kLongReflector, LlmRole::kMutation})
        if (to_string(role) == name) return role;
    throw std::invalid_argument("unknown LLM role '" + name + "'");
}

void MockLlm::enqueue(LlmRole role, std::string response) { queues_[role].push_back(std::move(response)); }

void MockLlm::set_responder(LlmRole role, Responder responder) { responders_[role] = std::move(responder); }

void MockLlm::set_default_responder(Responder responder) { fallback_ = std::move(responder); }

std::string MockLlm::complete(LlmRole role, const std::string&, const std::string& user) {
    std::string text;
    if (auto q = queues_.find(role); q != queues_.end() && !q->second.empty()) {
        text = std::move(q->second.front());
        q->second.pop_front();
    } else if (auto r = responders_.find(role); r != responders_.end()) {
        text = r->second(role, user);
    } else if (fallback_) {
        text = fallback_(role, user);
    } else {
        throw LlmExhausted("mock backend has no response for role " + to_string(role));
    }
    if (text.empty()) throw LlmEmptyCompletion("mock backend returned an empty completion");
    return text;
}

std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LlmConfigError("cannot open transcript " + path.string());
    std::vector<TranscriptEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        entries.push_back({role_from_string(j.at("role").get<std::string>()),
                           j.at("system").get<std::string>(), j.at("user").get<std::string>(),
                           j.at("response").get<std::string>()});
    }
    return entries;
}

void append_transcript(const std::filesystem::path& path, const TranscriptEntry& entry) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw LlmConfigError("cannot write transcript " + path.string());
    json j{{"role", to_string(entry.role)},
           {"system", entry.system},
           {"user", entry.user},
           {"response", entry.response}};
    out << j.dump() << '\n';
}

ReplayLlm::ReplayLlm(const std::vector<TranscriptEntry>& transcript) {
    for (const auto& e : transcript) answers_[{e.role, e.system, e.user}].push_back(e.response);
}

std::string ReplayLlm::complete(LlmRole role, const std::string& system, const std::string& user) {
    auto it = answers_.find({role, system, user});
    if (it == answers_.end() || it->second.empty())
        throw LlmExhausted("replay transcript has no recorded answer for this " + to_string(role) +
                           " prompt");
    std::string text = std::move(it->second.front());
    it->second.pop_front();
    if (text.empty()) throw LlmEmptyCompletion("recorded completion is empty");
    return text;
}

std::string RecordingLlm::complete(LlmRole role, const std::string& system, const std::string& user) {
    std::string text = inner_.complete(role, system, user);
    append_transcript(path_, {role, system, user, text});
    return text;
}

LiveLlm::LiveLlm(LiveLlmConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw LlmConfigError("live LLM: endpoint URL is not configured");
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
        throw LlmConfigError("live LLM: environment variable " + config_.api_key_env + " is not set");
    api_key_ = key;

    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw LlmConfigError("live LLM: endpoint must be an http(s) URL");
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    base_ = config_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
    if (config_.attempts < 1) config_.attempts = 1;
}

std::string LiveLlm::complete(LlmRole, const std::string& system, const std::string& user) {
    const json body{{"model", config_.model},
                    {"temperature", config_.temperature},
                    {"messages",
                     json::array({json{{"role", "system"}, {"content", system}},
                                  json{{"role", "user"}, {"content", user}}})}};
    const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

    std::string last_error;
    auto backoff = config_.initial_backoff;
    for (int attempt = 0; attempt < config_.attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(base_);
        client.set_read_timeout(config_.timeout);
        client.set_connection_timeout(std::chrono::seconds(10));
        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        try {
            const json reply = json::parse(res->body);
            const auto& content = reply.at("choices").at(0).at("message").at("content");
            std::string text = content.is_string() ? content.get<std::string>() : std::string{};
            if (text.empty()) throw LlmEmptyCompletion("live LLM returned an empty completion");
            return text;
        } catch (const json::exception& e) {
            last_error = std::string("malformed reply: ") + e.what();
        }
    }
    throw LlmTransportError("live LLM failed after " + std::to_string(config_.attempts) +
                            " attempts: " + last_error);
}

std::string BudgetedLlm::complete(LlmRole role, const std::string& system, const std::string& user) {
    if (calls_ >= max_calls_)
        throw LlmBudgetExceeded("LLM call budget of " + std::to_string(max_calls_) + " exhausted");
    ++calls_;
    return inner_.complete(role, system, user);
}

}  // namespace pact::evolution
