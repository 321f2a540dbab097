#include "treasure/event_log.hpp"

#include <cctype>
#include <chrono>
#include <ctime>
#include <optional>

namespace treasure {

SessionLog::SessionLog(const std::filesystem::path& dir, const std::string& participant_id,
                       const std::string& stamp) {
    std::filesystem::create_directories(dir);
    path_ = dir / (safe_file_token(participant_id) + "_" + stamp + ".ndjson");
    out_.open(path_, std::ios::out | std::ios::app);
    if (!out_) throw HarnessError("cannot open log " + path_.string());
    append({{"type", "header"}, {"schema", kLogSchemaVersion}, {"participantId", participant_id}, {"created", stamp}});
}

void SessionLog::append(const nlohmann::json& record) {
    if (!out_.is_open()) return;
    out_ << record.dump() << '\n';
    out_.flush();
    if (!out_) throw HarnessError("write to " + path_.string() + " failed");
}

std::string utc_stamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

std::string safe_file_token(const std::string& text) {
    std::string out;
    for (unsigned char c : text) out += (std::isalnum(c) || c == '-' || c == '_') ? static_cast<char>(c) : '_';
    return out.empty() ? "_" : out;
}

LoggedSession read_session_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw HarnessError("cannot open log " + path.string());
    LoggedSession s;
    std::vector<MapSlot> slots;
    std::optional<nlohmann::json> opened;  // last step_open, if any
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            // A crash mid-write leaves at most one torn trailing line.
            break;
        }
        const std::string type = rec.value("type", "");
        if (lineno == 1 && type != "header") throw HarnessError("log does not start with a header record");
        if (type == "header") {
            s.schema = rec.at("schema").get<int>();
            if (s.schema != kLogSchemaVersion) throw HarnessError("unsupported log schema");
        } else if (type == "plan") {
            s.plan = SessionPlan::from_json(rec.at("plan"));
            slots = s.plan.slots();
        } else if (type == "trial_start") {
            const auto slot = rec.at("slot").get<std::size_t>();
            if (slot >= slots.size()) throw HarnessError("trial_start for unknown slot");
            s.trials.push_back(TrialRecord::open(slots[slot]));
        } else if (type == "step_open") {
            opened = rec.at("recommended");
        } else if (type == "step") {
            if (s.trials.empty()) throw HarnessError("step before any trial");
            auto& t = s.trials.back();
            const auto step = StepRecord::from_json(rec.at("step"));
            if (opened && *opened != rec.at("step").at("recommended"))
                throw HarnessError("step recommendation differs from the one shown when it opened");
            opened.reset();
            t = record_step(t, step.options, step.recommended, step.chosen, step.score_delta,
                            rec.at("terminal").get<bool>());
        } else if (type == "questionnaire") {
            if (s.trials.empty()) throw HarnessError("questionnaire before any trial");
            auto& t = s.trials.back();
            t = submit_questionnaire(t, rec.at("trust").get<int>(), rec.at("selfConfidence").get<int>());
        } else if (type == "seal") {
            if (s.trials.empty() || !s.trials.back().sealed) throw HarnessError("seal without questionnaire");
            if (rec.at("finalScore").get<int>() != s.trials.back().final_score)
                throw HarnessError("sealed score disagrees with logged steps");
        } else if (type == "complete") {
            s.complete = true;
        } else if (type == "abandoned") {
            s.abandoned = true;
        }
    }
    return s;
}

}  // namespace treasure
