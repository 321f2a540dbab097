#include "treasure/harness.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "treasure/map_io.hpp"

namespace treasure {

std::string Condition::to_string() const { return rationale_display ? "display" : "no-display"; }

Condition Condition::parse(const std::string& text) {
    if (text == "display") return display();
    if (text == "no-display") return no_display();
    throw HarnessError("unknown condition '" + text + "'");
}

const char* to_string(Phase p) { return p == Phase::Training ? "training" : "test"; }

namespace {

std::vector<NamedMap> load_dir(const std::filesystem::path& dir) {
    std::vector<NamedMap> out;
    if (!std::filesystem::is_directory(dir)) return out;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back({f.stem().string(), read_map_file(f)});
    return out;
}

}  // namespace

Fixtures Fixtures::load(const std::filesystem::path& dir) {
    Fixtures f;
    f.training = load_dir(dir / "training");
    f.test = load_dir(dir / "test");
    if (f.training.size() != kTrainingMaps || f.test.size() != kTestMaps)
        throw FixtureError("fixture set in " + dir.string() + " has " + std::to_string(f.training.size()) +
                           " training and " + std::to_string(f.test.size()) + " test maps; need 5 and 10");
    return f;
}

const MapSpec& Fixtures::find(const std::string& id) const {
    for (const auto* set : {&training, &test})
        for (const auto& m : *set)
            if (m.id == id) return m.map;
    throw FixtureError("no fixture map '" + id + "'");
}

std::vector<MapSlot> SessionPlan::slots() const {
    std::vector<MapSlot> out;
    for (std::size_t i = 0; i < training_maps.size(); ++i) {
        // Practice map 1 is played alone; 2-3 preview the first condition, 4-5 the second.
        const Condition c = i < 3 ? condition_order[0] : condition_order[1];
        out.push_back({training_maps[i], Phase::Training, c, i != 0, static_cast<int>(i) + 1});
    }
    for (std::size_t i = 0; i < test_maps.size(); ++i) {
        const Condition c = i < kMapsPerCondition ? condition_order[0] : condition_order[1];
        out.push_back({test_maps[i], Phase::Test, c, true, static_cast<int>(i % kMapsPerCondition) + 1});
    }
    return out;
}

nlohmann::json SessionPlan::to_json() const {
    return {{"participantId", participant_id},
            {"participantIndex", participant_index},
            {"conditionOrder", {condition_order[0].to_string(), condition_order[1].to_string()}},
            {"trainingMaps", training_maps},
            {"testMaps", test_maps}};
}

SessionPlan SessionPlan::from_json(const nlohmann::json& j) {
    SessionPlan p;
    p.participant_id = j.at("participantId").get<std::string>();
    p.participant_index = j.at("participantIndex").get<int>();
    p.condition_order = {Condition::parse(j.at("conditionOrder").at(0).get<std::string>()),
                         Condition::parse(j.at("conditionOrder").at(1).get<std::string>())};
    p.training_maps = j.at("trainingMaps").get<std::vector<std::string>>();
    p.test_maps = j.at("testMaps").get<std::vector<std::string>>();
    return p;
}

SessionPlan plan_session(std::string participant_id, int participant_index, const Fixtures& fixtures,
                         std::mt19937_64& rng) {
    if (fixtures.training.size() != kTrainingMaps || fixtures.test.size() != kTestMaps)
        throw FixtureError("plan_session needs 5 training and 10 test maps");
    if (participant_index < 0) throw HarnessError("participant index must be non-negative");

    SessionPlan plan;
    plan.participant_id = std::move(participant_id);
    plan.participant_index = participant_index;
    if (participant_index % 2 == 1) plan.condition_order = {Condition::no_display(), Condition::display()};
    for (const auto& m : fixtures.training) plan.training_maps.push_back(m.id);
    for (const auto& m : fixtures.test) plan.test_maps.push_back(m.id);
    std::shuffle(plan.test_maps.begin(), plan.test_maps.end(), rng);
    return plan;
}

nlohmann::json StepRecord::to_json() const {
    nlohmann::json opts = nlohmann::json::array();
    for (const auto& o : options) opts.push_back(assessment_to_json(o));
    return {{"stepIndex", step_index},
            {"options", opts},
            {"recommended", recommended ? nlohmann::json(recommended->to_string()) : nlohmann::json(nullptr)},
            {"chosen", chosen.to_string()},
            {"accepted", accepted},
            {"scoreDelta", score_delta}};
}

StepRecord StepRecord::from_json(const nlohmann::json& j) {
    StepRecord s;
    s.step_index = j.at("stepIndex").get<int>();
    for (const auto& o : j.at("options")) s.options.push_back(assessment_from_json(o));
    if (!j.at("recommended").is_null()) s.recommended = parse_cell(j.at("recommended").get<std::string>());
    s.chosen = parse_cell(j.at("chosen").get<std::string>());
    s.accepted = j.at("accepted").get<bool>();
    s.score_delta = j.at("scoreDelta").get<int>();
    return s;
}

TrialRecord TrialRecord::open(const MapSlot& slot) {
    TrialRecord t;
    t.map_id = slot.map_id;
    t.phase = slot.phase;
    t.condition = slot.condition;
    t.assistant = slot.assistant;
    t.trial_index = slot.trial_index;
    return t;
}

std::optional<Rational> compute_acceptance_rate(const std::vector<StepRecord>& steps) {
    std::int64_t offered = 0, accepted = 0;
    for (const auto& s : steps) {
        if (!s.recommended) continue;
        ++offered;
        if (s.accepted) ++accepted;
    }
    if (offered == 0) return std::nullopt;
    return Rational(accepted, offered);
}

TrialRecord record_step(const TrialRecord& trial, const std::vector<OptionAssessment>& options,
                        std::optional<Position> recommended, Position chosen, int score_delta, bool terminal) {
    if (trial.sealed) throw OrderError("trial " + trial.map_id + " is sealed");
    if (trial.finished) throw OrderError("map " + trial.map_id + " is over; questionnaire pending");
    auto has = [&](Position p) {
        return std::any_of(options.begin(), options.end(), [&](const OptionAssessment& o) { return o.pos == p; });
    };
    if (!has(chosen)) throw HarnessError("chosen cell " + chosen.to_string() + " is not an offered option");
    if (recommended && !has(*recommended))
        throw HarnessError("recommended cell " + recommended->to_string() + " is not an offered option");

    TrialRecord next = trial;
    StepRecord step;
    step.step_index = static_cast<int>(trial.steps.size());
    step.options = options;
    step.recommended = recommended;
    step.chosen = chosen;
    step.accepted = recommended && *recommended == chosen;
    step.score_delta = score_delta;
    next.steps.push_back(std::move(step));
    next.final_score += score_delta;
    next.finished = terminal;
    next.acceptance_rate = compute_acceptance_rate(next.steps);
    return next;
}

TrialRecord submit_questionnaire(const TrialRecord& trial, int trust, int self_confidence) {
    if (trial.sealed) throw OrderError("questionnaire for " + trial.map_id + " already submitted");
    if (!trial.finished) throw OrderError("map " + trial.map_id + " is still in progress");
    for (int r : {trust, self_confidence})
        if (r < kLikertMin || r > kLikertMax)
            throw RatingError("rating " + std::to_string(r) + " is outside 1..9");
    TrialRecord next = trial;
    next.trust = trust;
    next.self_confidence = self_confidence;
    next.sealed = true;
    return next;
}

std::vector<ExportRow> export_rows(const SessionPlan& plan, const std::vector<TrialRecord>& trials) {
    std::vector<std::string> unsealed;
    for (const auto& t : trials)
        if (!t.sealed) unsealed.push_back(t.map_id);
    if (!unsealed.empty()) {
        std::string names;
        for (const auto& n : unsealed) names += (names.empty() ? "" : ", ") + n;
        throw HarnessError("unsealed trials: " + names);
    }
    std::vector<ExportRow> rows;
    for (const auto& t : trials) {
        if (t.phase != Phase::Test) continue;
        ExportRow r;
        r.participant_id = plan.participant_id;
        r.condition = t.condition;
        r.trial_index = t.trial_index;
        r.map_id = t.map_id;
        r.trust = *t.trust;
        r.self_confidence = *t.self_confidence;
        if (t.acceptance_rate) r.acceptance_rate = boost::rational_cast<double>(*t.acceptance_rate);
        r.final_score = t.final_score;
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

int to_int(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw HarnessError("bad integer field '" + s + "'");
    return v;
}

}  // namespace

std::string export_session(const SessionPlan& plan, const std::vector<TrialRecord>& trials) {
    std::ostringstream out;
    out << kExportHeader << "\n";
    for (const auto& r : export_rows(plan, trials)) {
        out << csv_field(r.participant_id) << ',' << r.condition.to_string() << ',' << r.trial_index << ','
            << csv_field(r.map_id) << ',' << r.trust << ',' << r.self_confidence << ','
            << (r.acceptance_rate ? shortest(*r.acceptance_rate) : std::string()) << ',' << r.final_score << "\n";
    }
    return out.str();
}

std::vector<ExportRow> parse_export(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != kExportHeader) throw HarnessError("export header mismatch");
    std::vector<ExportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw HarnessError("export row has " + std::to_string(f.size()) + " fields");
        ExportRow r;
        r.participant_id = f[0];
        r.condition = Condition::parse(f[1]);
        r.trial_index = to_int(f[2]);
        r.map_id = f[3];
        r.trust = to_int(f[4]);
        r.self_confidence = to_int(f[5]);
        if (!f[6].empty()) {
            double v = 0;
            auto [p, ec] = std::from_chars(f[6].data(), f[6].data() + f[6].size(), v);
            if (ec != std::errc{}) throw HarnessError("bad acceptanceRate '" + f[6] + "'");
            r.acceptance_rate = v;
        }
        r.final_score = to_int(f[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace treasure
