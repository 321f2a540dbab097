#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "treasure/harness.hpp"

namespace treasure {

// Rejection carrying the HTTP status and JSON body to send back.
class ApiError : public std::runtime_error {
public:
    ApiError(int status, const std::string& message, nlohmann::json extra = nlohmann::json::object());
    int status() const { return status_; }
    const nlohmann::json& body() const { return body_; }

private:
    int status_;
    nlohmann::json body_;
};

using Clock = std::chrono::steady_clock;

struct ServiceConfig {
    std::filesystem::path log_dir = "logs";
    std::uint64_t master_seed = 0;
    std::chrono::seconds idle_timeout{30 * 60};
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
    // Overrides the timestamp in log file names (tests).
    std::function<std::string()> stamp;
};

struct Session;

// All participant sessions. Requests to different sessions run in parallel;
// requests to one session are serialized by that session's mutex.
class SessionManager {
public:
    SessionManager(ServiceConfig config, Fixtures fixtures);
    ~SessionManager();

    // {"token", "plan": {...}, "state": ViewState}
    nlohmann::json create_session(const std::string& participant_id);
    nlohmann::json get_state(const std::string& token);
    nlohmann::json post_move(const std::string& token, const std::string& cell);
    // Next map's ViewState, or {"complete": true, ...} after the last map.
    nlohmann::json post_questionnaire(const std::string& token, int trust, int self_confidence);
    std::string export_csv(const std::string& token);

    // Seals and drops sessions idle for longer than the timeout. Returns how many.
    std::size_t expire_idle();

    std::filesystem::path log_path(const std::string& token);
    const Fixtures& fixtures() const { return fixtures_; }

private:
    std::shared_ptr<Session> find(const std::string& token);

    ServiceConfig config_;
    Fixtures fixtures_;
    std::shared_mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
    std::unordered_set<std::string> participants_;
    int next_index_ = 0;
};

// 128 random bits as 32 hex characters.
std::string new_token();

}  // namespace treasure
