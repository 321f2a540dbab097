#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "treasure/harness.hpp"

namespace treasure {

constexpr int kLogSchemaVersion = 1;

// Append-only newline-delimited JSON, one record per event, flushed on every
// write. The first record is a header carrying the schema version.
//
// Record types: header, plan, trial_start, step_open, step, questionnaire,
// seal, complete, abandoned.
class SessionLog {
public:
    SessionLog() = default;
    // Creates <dir>/<participant>_<stamp>.ndjson and writes the header.
    SessionLog(const std::filesystem::path& dir, const std::string& participant_id, const std::string& stamp);

    void append(const nlohmann::json& record);
    const std::filesystem::path& path() const { return path_; }
    bool is_open() const { return out_.is_open(); }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

// Timestamp for file names, e.g. 20261016T093012Z.
std::string utc_stamp();

// Filesystem-safe rendering of a participant id.
std::string safe_file_token(const std::string& text);

struct LoggedSession {
    int schema = 0;
    SessionPlan plan;
    std::vector<TrialRecord> trials;  // in presentation order, possibly unsealed
    bool complete = false;
    bool abandoned = false;
};

// Rebuilds the plan and trial records from a session log.
LoggedSession read_session_log(const std::filesystem::path& path);

}  // namespace treasure
