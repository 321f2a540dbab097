#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "treasure/advisor.hpp"
#include "treasure/world.hpp"

namespace treasure {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
// Out-of-sequence action: stepping a finished or sealed trial, rating too early, rating twice.
class OrderError : public HarnessError {
public:
    using HarnessError::HarnessError;
};
class RatingError : public HarnessError {
public:
    using HarnessError::HarnessError;
};
class FixtureError : public HarnessError {
public:
    using HarnessError::HarnessError;
};

struct Condition {
    bool rationale_display = false;

    static constexpr Condition display() { return Condition{true}; }
    static constexpr Condition no_display() { return Condition{false}; }
    // "display" / "no-display"
    std::string to_string() const;
    static Condition parse(const std::string& text);
    friend bool operator==(Condition, Condition) = default;
};

enum class Phase { Training, Test };
const char* to_string(Phase p);

struct NamedMap {
    std::string id;
    MapSpec map;
};

// Five practice maps (presented in file order) and ten test maps.
struct Fixtures {
    std::vector<NamedMap> training;
    std::vector<NamedMap> test;

    // Reads <dir>/training/*.json and <dir>/test/*.json, sorted by file name.
    static Fixtures load(const std::filesystem::path& dir);
    const MapSpec& find(const std::string& id) const;
};

constexpr int kTrainingMaps = 5;
constexpr int kTestMaps = 10;
constexpr int kMapsPerCondition = kTestMaps / 2;

// One map in a session's presentation sequence.
struct MapSlot {
    std::string map_id;
    Phase phase = Phase::Test;
    Condition condition;
    bool assistant = true;  // false only for the first practice map
    int trial_index = 0;    // 1-based, within phase and condition
};

struct SessionPlan {
    std::string participant_id;
    int participant_index = 0;
    std::array<Condition, 2> condition_order{Condition::display(), Condition::no_display()};
    std::vector<std::string> training_maps;  // fixed order
    std::vector<std::string> test_maps;      // shuffled; first five under condition_order[0]

    std::vector<MapSlot> slots() const;
    nlohmann::json to_json() const;
    static SessionPlan from_json(const nlohmann::json& j);
    friend bool operator==(const SessionPlan&, const SessionPlan&) = default;
};

// Even participants see the rationale display first, odd ones second.
SessionPlan plan_session(std::string participant_id, int participant_index, const Fixtures& fixtures,
                         std::mt19937_64& rng);

struct StepRecord {
    int step_index = 0;
    std::vector<OptionAssessment> options;
    std::optional<Position> recommended;  // absent when the assistant is off
    Position chosen;
    bool accepted = false;
    int score_delta = 0;

    nlohmann::json to_json() const;
    static StepRecord from_json(const nlohmann::json& j);
    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct TrialRecord {
    std::string map_id;
    Phase phase = Phase::Test;
    Condition condition;
    bool assistant = true;
    int trial_index = 0;
    std::vector<StepRecord> steps;
    int final_score = 0;
    bool finished = false;
    std::optional<Rational> acceptance_rate;
    std::optional<int> trust;
    std::optional<int> self_confidence;
    bool sealed = false;

    static TrialRecord open(const MapSlot& slot);
    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Accepted steps over steps that carried a recommendation; absent when there were none.
std::optional<Rational> compute_acceptance_rate(const std::vector<StepRecord>& steps);

// Appends a step. `terminal` marks the move that ended the map.
// Throws HarnessError if `chosen` is not one of `options`, OrderError once the
// map is over.
TrialRecord record_step(const TrialRecord& trial, const std::vector<OptionAssessment>& options,
                        std::optional<Position> recommended, Position chosen, int score_delta, bool terminal);

constexpr int kLikertMin = 1;
constexpr int kLikertMax = 9;

// Stores both ratings and seals the trial.
TrialRecord submit_questionnaire(const TrialRecord& trial, int trust, int self_confidence);

// Analysis export: one row per sealed test trial.
inline constexpr const char* kExportHeader =
    "participantId,condition,trialIndex,mapId,trust,selfConfidence,acceptanceRate,finalScore";

struct ExportRow {
    std::string participant_id;
    Condition condition;
    int trial_index = 0;
    std::string map_id;
    int trust = 0;
    int self_confidence = 0;
    std::optional<double> acceptance_rate;
    int final_score = 0;
    friend bool operator==(const ExportRow&, const ExportRow&) = default;
};

std::vector<ExportRow> export_rows(const SessionPlan& plan, const std::vector<TrialRecord>& trials);
// Throws HarnessError naming every unsealed trial.
std::string export_session(const SessionPlan& plan, const std::vector<TrialRecord>& trials);
std::vector<ExportRow> parse_export(const std::string& csv);

}  // namespace treasure
