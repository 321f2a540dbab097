#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "support.hpp"
#include "treasure/event_log.hpp"
#include "treasure/harness.hpp"
#include "treasure/pipeline.hpp"

using namespace treasure;
using namespace treasure::testing;

namespace {

// Plays a slot's map to the end, following the recommendation with
// probability `follow`, and returns the finished trial.
TrialRecord play(const MapSlot& slot, const MapSpec& map, std::mt19937_64& rng, double follow = 0.7,
                 SessionLog* log = nullptr, std::size_t slot_index = 0) {
    TrialRecord t = TrialRecord::open(slot);
    if (log) log->append({{"type", "trial_start"}, {"slot", slot_index}});
    GameState s = initial_state(map);
    KnowledgeBase kb = KnowledgeBase(map.start).tell(map.start, percept_at(map, map.start), Event::Plain);
    while (!s.terminal()) {
        const auto opts = assess_options(kb, legal_moves(s));
        std::optional<Position> rec;
        if (slot.assistant) rec = recommend(opts, rng);
        Position pick = opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)].pos;
        if (rec && std::bernoulli_distribution(follow)(rng)) pick = *rec;
        s = apply_move(s, map, pick);
        kb = kb.tell(pick, percept_at(map, pick), s.steps.back().event);
        t = record_step(t, opts, rec, pick, s.steps.back().delta, s.terminal());
        if (log) log->append({{"type", "step"}, {"slot", slot_index}, {"step", t.steps.back().to_json()},
                              {"terminal", s.terminal()}});
    }
    CHECK(t.final_score == s.score);
    return t;
}

StepRecord step_with(bool offered, bool accepted) {
    StepRecord s;
    if (offered) s.recommended = at("A2");
    s.chosen = accepted ? at("A2") : at("B1");
    s.accepted = offered && accepted;
    return s;
}

}  // namespace

TEST_CASE("fixtures load in file order") {
    const Fixtures f = Fixtures::load(fixture_dir());
    REQUIRE(f.training.size() == 5);
    REQUIRE(f.test.size() == 10);
    CHECK(f.training.front().id == "training-1");
    CHECK(f.test.front().id == "test-01");
    CHECK(f.test.back().id == "test-10");
    CHECK(f.find("test-03") == f.test[2].map);
    CHECK_THROWS_AS(f.find("nope"), FixtureError);
    CHECK_THROWS_AS(Fixtures::load(scratch_dir("empty-fixtures")), FixtureError);
}

TEST_CASE("condition names") {
    CHECK(Condition::display().to_string() == "display");
    CHECK(Condition::no_display().to_string() == "no-display");
    CHECK(Condition::parse("no-display") == Condition::no_display());
    CHECK_THROWS_AS(Condition::parse("maybe"), HarnessError);
}

TEST_CASE("session plans") {
    const Fixtures f = Fixtures::load(fixture_dir());
    std::mt19937_64 rng(1);
    std::set<std::vector<std::string>> orders;
    for (int i = 0; i < 40; ++i) {
        const SessionPlan p = plan_session("P" + std::to_string(i), i, f, rng);
        CHECK(p.condition_order[0] == (i % 2 == 0 ? Condition::display() : Condition::no_display()));
        CHECK(p.condition_order[1] != p.condition_order[0]);
        auto sorted = p.test_maps;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::string> ids;
        for (const auto& m : f.test) ids.push_back(m.id);
        CHECK(sorted == ids);
        CHECK(p.training_maps == std::vector<std::string>{"training-1", "training-2", "training-3", "training-4",
                                                          "training-5"});
        orders.insert(p.test_maps);

        const auto slots = p.slots();
        REQUIRE(slots.size() == 15);
        CHECK_FALSE(slots[0].assistant);
        for (std::size_t s = 1; s < slots.size(); ++s) CHECK(slots[s].assistant);
        CHECK(slots[1].condition == p.condition_order[0]);
        CHECK(slots[2].condition == p.condition_order[0]);
        CHECK(slots[3].condition == p.condition_order[1]);
        CHECK(slots[4].condition == p.condition_order[1]);
        for (std::size_t s = 5; s < 15; ++s) {
            CHECK(slots[s].phase == Phase::Test);
            CHECK(slots[s].condition == p.condition_order[s < 10 ? 0 : 1]);
            CHECK(slots[s].trial_index == static_cast<int>((s - 5) % 5) + 1);
            CHECK(slots[s].map_id == p.test_maps[s - 5]);
        }
        CHECK(SessionPlan::from_json(p.to_json()) == p);
    }
    CHECK(orders.size() > 30);

    std::mt19937_64 a(9), b(9);
    CHECK(plan_session("X", 3, f, a) == plan_session("X", 3, f, b));
    CHECK_THROWS_AS(plan_session("X", 0, Fixtures{}, a), FixtureError);
}

TEST_CASE("each test map is seen equally often under both conditions") {
    const Fixtures f = Fixtures::load(fixture_dir());
    std::mt19937_64 rng(5);
    std::map<std::string, std::array<int, 2>> seen;
    for (int i = 0; i < 400; ++i) {
        const SessionPlan p = plan_session("P", i, f, rng);
        for (const auto& s : p.slots())
            if (s.phase == Phase::Test) ++seen[s.map_id][s.condition.rationale_display ? 1 : 0];
    }
    for (const auto& [id, c] : seen) {
        CHECK(c[0] + c[1] == 400);
        CHECK(std::abs(c[0] - c[1]) < 80);
    }
}

TEST_CASE("acceptance rate") {
    std::vector<StepRecord> steps;
    CHECK_FALSE(compute_acceptance_rate(steps));
    for (int i = 0; i < 7; ++i) steps.push_back(step_with(true, true));
    for (int i = 0; i < 3; ++i) steps.push_back(step_with(true, false));
    steps.push_back(step_with(false, false));
    REQUIRE(compute_acceptance_rate(steps));
    CHECK(*compute_acceptance_rate(steps) == Rational(7, 10));
    CHECK_FALSE(compute_acceptance_rate({step_with(false, false)}));
}

TEST_CASE("recording steps") {
    const MapSpec m = example_map();
    const KnowledgeBase kb = observe(m, {});
    const auto opts = assess_options(kb, legal_moves(initial_state(m)));
    MapSlot slot{"test-01", Phase::Test, Condition::display(), true, 1};
    TrialRecord t = TrialRecord::open(slot);

    t = record_step(t, opts, at("A2"), at("A2"), -10, false);
    CHECK(t.steps.back().accepted);
    CHECK(t.steps.back().step_index == 0);
    CHECK(*t.acceptance_rate == Rational(1));
    t = record_step(t, opts, at("A2"), at("B1"), -10, false);
    CHECK_FALSE(t.steps.back().accepted);
    CHECK(*t.acceptance_rate == Rational(1, 2));
    CHECK(t.final_score == -20);
    CHECK_THROWS_AS(record_step(t, opts, at("A2"), at("D4"), -10, false), HarnessError);
    CHECK_THROWS_AS(submit_questionnaire(t, 5, 5), OrderError);

    t = record_step(t, opts, std::nullopt, at("B1"), 490, true);
    CHECK(t.finished);
    CHECK(*t.acceptance_rate == Rational(1, 2));
    CHECK_THROWS_AS(record_step(t, opts, at("A2"), at("A2"), -10, false), OrderError);

    CHECK_THROWS_AS(submit_questionnaire(t, 0, 5), RatingError);
    CHECK_THROWS_AS(submit_questionnaire(t, 5, 10), RatingError);
    const TrialRecord sealed = submit_questionnaire(t, 1, 9);
    CHECK(sealed.sealed);
    CHECK(*sealed.trust == 1);
    CHECK(*sealed.self_confidence == 9);
    CHECK_THROWS_AS(submit_questionnaire(sealed, 5, 5), OrderError);
    CHECK_THROWS_AS(record_step(sealed, opts, at("A2"), at("A2"), -10, false), OrderError);

    const StepRecord back = StepRecord::from_json(t.steps[0].to_json());
    CHECK(back == t.steps[0]);
    CHECK(StepRecord::from_json(t.steps[2].to_json()) == t.steps[2]);
}

TEST_CASE("acceptance rate always matches a recount of the steps") {
    const Fixtures f = Fixtures::load(fixture_dir());
    std::mt19937_64 rng(12);
    for (int i = 0; i < 300; ++i) {
        const auto& nm = f.test[static_cast<std::size_t>(i) % f.test.size()];
        const double follow = std::uniform_real_distribution<double>(0, 1)(rng);
        const TrialRecord t = play({nm.id, Phase::Test, Condition::display(), true, 1}, nm.map, rng, follow);
        std::int64_t offered = 0, took = 0;
        for (const auto& s : t.steps) {
            offered += s.recommended.has_value();
            took += s.recommended && *s.recommended == s.chosen;
        }
        REQUIRE(t.acceptance_rate);
        CHECK(*t.acceptance_rate == Rational(took, offered));
    }
    const auto& nm = f.training.front();
    const TrialRecord alone = play({nm.id, Phase::Training, Condition::display(), false, 1}, nm.map, rng);
    CHECK_FALSE(alone.acceptance_rate);
}

TEST_CASE("export") {
    const Fixtures f = Fixtures::load(fixture_dir());
    std::mt19937_64 rng(21);
    const SessionPlan plan = plan_session("P,\"7\"", 1, f, rng);
    std::vector<TrialRecord> trials;
    for (const auto& slot : plan.slots()) {
        trials.push_back(play(slot, f.find(slot.map_id), rng));
        if (trials.size() < 15) trials.back() = submit_questionnaire(trials.back(), 3, 8);
    }

    try {
        export_session(plan, trials);
        FAIL("expected HarnessError");
    } catch (const HarnessError& e) {
        CHECK(std::string(e.what()).find(trials.back().map_id) != std::string::npos);
    }

    trials.back() = submit_questionnaire(trials.back(), 4, 6);
    const std::string csv = export_session(plan, trials);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "participantId,condition,trialIndex,mapId,trust,selfConfidence,acceptanceRate,finalScore");
    const auto rows = parse_export(csv);
    REQUIRE(rows.size() == 10);
    CHECK(rows == export_rows(plan, trials));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TrialRecord& t = trials[5 + i];
        CHECK(rows[i].participant_id == "P,\"7\"");
        CHECK(rows[i].map_id == t.map_id);
        CHECK(rows[i].condition == (i < 5 ? Condition::no_display() : Condition::display()));
        CHECK(rows[i].final_score == t.final_score);
        REQUIRE(rows[i].acceptance_rate);
        CHECK(*rows[i].acceptance_rate == boost::rational_cast<double>(*t.acceptance_rate));
    }
    CHECK(csv.find("\"P,\"\"7\"\"\"") != std::string::npos);
    CHECK_THROWS_AS(parse_export("bad header\n"), HarnessError);
}

TEST_CASE("export row format") {
    SessionPlan plan;
    plan.participant_id = "p01";
    TrialRecord t;
    t.map_id = "test-04";
    t.phase = Phase::Test;
    t.condition = Condition::display();
    t.trial_index = 2;
    t.final_score = 430;
    t.acceptance_rate = Rational(2, 3);
    t.trust = 7;
    t.self_confidence = 5;
    t.finished = t.sealed = true;
    TrialRecord none = t;
    none.acceptance_rate.reset();
    TrialRecord practice = t;
    practice.phase = Phase::Training;
    CHECK(export_session(plan, {practice, t, none}) ==
          std::string(kExportHeader) + "\n" + "p01,display,2,test-04,7,5,0.6666666666666666,430\n" +
              "p01,display,2,test-04,7,5,,430\n");
}

TEST_CASE("session log replays to the same records") {
    const Fixtures f = Fixtures::load(fixture_dir());
    const auto dir = scratch_dir("harness-log");
    std::mt19937_64 rng(3);
    const SessionPlan plan = plan_session("P 9/x", 0, f, rng);
    std::vector<TrialRecord> trials;
    std::filesystem::path path;
    {
        SessionLog log(dir, plan.participant_id, "20260101T000000Z");
        path = log.path();
        CHECK(path.filename() == "P_9_x_20260101T000000Z.ndjson");
        log.append({{"type", "plan"}, {"plan", plan.to_json()}});
        const auto slots = plan.slots();
        for (std::size_t i = 0; i < slots.size(); ++i) {
            trials.push_back(play(slots[i], f.find(slots[i].map_id), rng, 0.6, &log, i));
            trials.back() = submit_questionnaire(trials.back(), 5, 6);
            log.append({{"type", "questionnaire"}, {"slot", i}, {"trust", 5}, {"selfConfidence", 6}});
            log.append({{"type", "seal"}, {"slot", i}, {"finalScore", trials.back().final_score}});
        }
        log.append({{"type", "complete"}});
    }
    const LoggedSession s = read_session_log(path);
    CHECK(s.schema == kLogSchemaVersion);
    CHECK(s.plan == plan);
    CHECK(s.trials == trials);
    CHECK(s.complete);
    CHECK_FALSE(s.abandoned);

    // chosen cells replay through the engine to the logged score
    for (const auto& t : s.trials) {
        std::vector<Position> moves;
        for (const auto& st : t.steps) moves.push_back(st.chosen);
        CHECK(replay(f.find(t.map_id), moves).score == t.final_score);
    }

    // a torn trailing line is ignored
    std::ofstream(path, std::ios::app) << "{\"type\":\"ste";
    CHECK(read_session_log(path).trials == trials);
}

TEST_CASE("log readers reject foreign files") {
    const auto dir = scratch_dir("harness-bad");
    std::ofstream(dir / "x.ndjson") << "{\"type\":\"plan\"}\n";
    CHECK_THROWS_AS(read_session_log(dir / "x.ndjson"), HarnessError);
    std::ofstream(dir / "y.ndjson") << "{\"type\":\"header\",\"schema\":99}\n";
    CHECK_THROWS_AS(read_session_log(dir / "y.ndjson"), HarnessError);
    CHECK_THROWS_AS(read_session_log(dir / "missing.ndjson"), HarnessError);
}
