#include "treasure/service.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <random>

#include "treasure/event_log.hpp"
#include "treasure/logic.hpp"
#include "treasure/pipeline.hpp"

namespace treasure {

ApiError::ApiError(int status, const std::string& message, nlohmann::json extra)
    : std::runtime_error(message), status_(status), body_(std::move(extra)) {
    body_["error"] = message;
}

std::string new_token() {
    std::random_device rd;
    std::string out;
    for (int i = 0; i < 4; ++i) {
        char buf[9];
        std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
        out += buf;
    }
    return out;
}

struct Session {
    std::mutex mutex;
    std::string token;
    SessionPlan plan;
    std::vector<MapSlot> slots;
    std::size_t slot = 0;

    MapSpec map;
    GameState game;
    KnowledgeBase kb;
    // Options and recommendation are fixed when a step opens, so re-polls agree.
    std::vector<OptionAssessment> options;
    std::optional<Position> recommendation;
    TrialRecord trial;
    std::vector<TrialRecord> done;

    std::mt19937_64 rng;
    SessionLog log;
    Clock::time_point last_active;
    bool complete = false;
};

namespace {

void open_step(Session& s) {
    s.options.clear();
    s.recommendation.reset();
    if (s.game.terminal()) return;
    s.options = assess_options(s.kb, legal_moves(s.game));
    if (s.slots[s.slot].assistant) s.recommendation = recommend(s.options, s.rng);
    nlohmann::json opts = nlohmann::json::array();
    for (const auto& o : s.options) opts.push_back(assessment_to_json(o));
    s.log.append({{"type", "step_open"},
                  {"slot", s.slot},
                  {"stepIndex", s.trial.steps.size()},
                  {"options", opts},
                  {"recommended", s.recommendation ? nlohmann::json(s.recommendation->to_string()) : nullptr}});
}

void load_slot(Session& s, const Fixtures& fixtures) {
    const MapSlot& slot = s.slots[s.slot];
    s.map = fixtures.find(slot.map_id);
    s.game = initial_state(s.map);
    s.kb = KnowledgeBase(s.map.start).tell(s.map.start, percept_at(s.map, s.map.start), Event::Plain);
    s.trial = TrialRecord::open(slot);
    s.log.append({{"type", "trial_start"},
                  {"slot", s.slot},
                  {"mapId", slot.map_id},
                  {"phase", to_string(slot.phase)},
                  {"condition", slot.condition.to_string()},
                  {"assistant", slot.assistant},
                  {"trialIndex", slot.trial_index}});
    open_step(s);
}

nlohmann::json cell_view(const Session& s, Position p) {
    const Percept pc = percept_at(s.map, p);
    nlohmann::json c{{"cell", p.to_string()}, {"breeze", pc.breeze}, {"stench", pc.stench}};
    c["pitFallen"] = (s.game.fallen_pits & p.bit()) != 0;
    c["gold"] = s.game.status == Status::Won && s.game.current == p;
    c["wumpus"] = s.game.status == Status::Dead && s.game.current == p;
    return c;
}

// Only what the participant may see: visited cells and their percepts, the
// frontier, the recommendation and, under the display condition, the rationale.
nlohmann::json view(const Session& s) {
    const MapSlot& slot = s.slots[s.slot];
    nlohmann::json cells = nlohmann::json::array();
    for (Position p : cells_of(s.game.visited)) cells.push_back(cell_view(s, p));
    nlohmann::json frontier = nlohmann::json::array();
    for (const auto& o : s.options) frontier.push_back(o.pos.to_string());

    nlohmann::json v{{"participantId", s.plan.participant_id},
                     {"mapIndex", s.slot + 1},
                     {"mapCount", s.slots.size()},
                     {"phase", to_string(slot.phase)},
                     {"trialIndex", slot.trial_index},
                     {"condition", {{"rationaleDisplay", slot.condition.rationale_display}}},
                     {"assistant", slot.assistant},
                     {"status", to_string(s.game.status)},
                     {"score", s.game.score},
                     {"current", s.game.current.to_string()},
                     {"cells", cells},
                     {"frontier", frontier},
                     {"awaitingQuestionnaire", s.game.terminal()}};
    if (s.recommendation) {
        v["recommendation"] = s.recommendation->to_string();
        if (slot.condition.rationale_display)
            v["rationale"] = rationale_to_json(build_rationale(s.options, *s.recommendation));
    }
    return v;
}

nlohmann::json completion(const Session& s) {
    nlohmann::json maps = nlohmann::json::array();
    for (const auto& t : s.done)
        maps.push_back({{"mapId", t.map_id}, {"phase", to_string(t.phase)}, {"finalScore", t.final_score}});
    return {{"complete", true}, {"participantId", s.plan.participant_id}, {"maps", maps}};
}

nlohmann::json frontier_json(const Session& s) {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& o : s.options) f.push_back(o.pos.to_string());
    return f;
}

}  // namespace

SessionManager::SessionManager(ServiceConfig config, Fixtures fixtures)
    : config_(std::move(config)), fixtures_(std::move(fixtures)) {
    if (!config_.stamp) config_.stamp = utc_stamp;
}

SessionManager::~SessionManager() = default;

std::shared_ptr<Session> SessionManager::find(const std::string& token) {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(token);
    if (it == sessions_.end()) throw ApiError(404, "unknown session");
    return it->second;
}

nlohmann::json SessionManager::create_session(const std::string& participant_id) {
    if (participant_id.empty()) throw ApiError(422, "participantId must be nonempty");
    auto s = std::make_shared<Session>();
    int index = 0;
    {
        std::unique_lock lock(mutex_);
        if (!participants_.insert(participant_id).second)
            throw ApiError(409, "participant already has a session", {{"participantId", participant_id}});
        index = next_index_++;
        do {
            s->token = new_token();
        } while (sessions_.count(s->token) != 0);
        sessions_.emplace(s->token, s);
    }
    std::lock_guard guard(s->mutex);
    try {
        s->rng.seed(derive_seed(config_.master_seed, static_cast<std::uint64_t>(index)));
        s->plan = plan_session(participant_id, index, fixtures_, s->rng);
        s->slots = s->plan.slots();
        s->log = SessionLog(config_.log_dir, participant_id, config_.stamp());
        s->log.append({{"type", "plan"}, {"plan", s->plan.to_json()}});
        load_slot(*s, fixtures_);
        s->last_active = config_.now();
    } catch (...) {
        std::unique_lock lock(mutex_);
        sessions_.erase(s->token);
        participants_.erase(participant_id);
        throw;
    }
    return {{"token", s->token}, {"plan", s->plan.to_json()}, {"state", view(*s)}};
}

nlohmann::json SessionManager::get_state(const std::string& token) {
    auto s = find(token);
    std::lock_guard guard(s->mutex);
    s->last_active = config_.now();
    if (s->complete) return completion(*s);
    return view(*s);
}

nlohmann::json SessionManager::post_move(const std::string& token, const std::string& cell) {
    auto s = find(token);
    std::lock_guard guard(s->mutex);
    s->last_active = config_.now();
    if (s->complete) throw ApiError(409, "session complete");
    if (s->game.terminal())
        throw ApiError(409, "map finished", {{"next", "questionnaire"}});
    const auto pos = Position::parse(cell);
    if (!pos || (frontier_mask(s->game) & pos->bit()) == 0)
        throw ApiError(422, "illegal move", {{"cell", cell}, {"frontier", frontier_json(*s)}});

    // Build everything first; commit only after the log write succeeds.
    GameState game = apply_move(s->game, s->map, *pos);
    const Step& step = game.steps.back();
    KnowledgeBase kb = s->kb.tell(*pos, percept_at(s->map, *pos), step.event);
    TrialRecord trial = record_step(s->trial, s->options, s->recommendation, *pos, step.delta, game.terminal());
    s->log.append({{"type", "step"},
                   {"slot", s->slot},
                   {"step", trial.steps.back().to_json()},
                   {"event", to_string(step.event)},
                   {"score", game.score},
                   {"status", to_string(game.status)},
                   {"terminal", game.terminal()}});

    s->game = std::move(game);
    s->kb = std::move(kb);
    s->trial = std::move(trial);
    open_step(*s);
    return view(*s);
}

nlohmann::json SessionManager::post_questionnaire(const std::string& token, int trust, int self_confidence) {
    auto s = find(token);
    std::lock_guard guard(s->mutex);
    s->last_active = config_.now();
    if (s->complete) throw ApiError(409, "session complete");
    TrialRecord sealed;
    try {
        sealed = submit_questionnaire(s->trial, trust, self_confidence);
    } catch (const OrderError& e) {
        throw ApiError(409, e.what());
    } catch (const RatingError& e) {
        throw ApiError(422, e.what(), {{"range", {kLikertMin, kLikertMax}}});
    }
    s->log.append({{"type", "questionnaire"}, {"slot", s->slot}, {"trust", trust}, {"selfConfidence", self_confidence}});
    nlohmann::json seal{{"type", "seal"}, {"slot", s->slot}, {"finalScore", sealed.final_score}};
    seal["acceptanceRate"] =
        sealed.acceptance_rate ? nlohmann::json(boost::rational_cast<double>(*sealed.acceptance_rate)) : nullptr;
    s->log.append(seal);

    s->done.push_back(std::move(sealed));
    ++s->slot;
    if (s->slot == s->slots.size()) {
        s->complete = true;
        s->log.append({{"type", "complete"}});
        auto csv_path = s->log.path();
        csv_path.replace_extension(".csv");
        std::ofstream(csv_path) << export_session(s->plan, s->done);
        s->slot = s->slots.size() - 1;  // keep slot valid for view helpers
        return completion(*s);
    }
    load_slot(*s, fixtures_);
    return view(*s);
}

std::string SessionManager::export_csv(const std::string& token) {
    auto s = find(token);
    std::lock_guard guard(s->mutex);
    if (!s->complete) throw ApiError(409, "session not complete");
    return export_session(s->plan, s->done);
}

std::size_t SessionManager::expire_idle() {
    const auto now = config_.now();
    std::unique_lock lock(mutex_);
    std::size_t dropped = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        Session& s = *it->second;
        std::lock_guard guard(s.mutex);
        if (now - s.last_active > config_.idle_timeout) {
            if (!s.complete) s.log.append({{"type", "abandoned"}, {"slot", s.slot}});
            it = sessions_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    return dropped;
}

std::filesystem::path SessionManager::log_path(const std::string& token) {
    auto s = find(token);
    std::lock_guard guard(s->mutex);
    return s->log.path();
}

}  // namespace treasure
