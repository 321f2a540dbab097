#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <json.hpp>

#include "treasure/logic.hpp"

namespace treasure {

using Rational = boost::rational<std::int64_t>;

// Rounded half away from zero to `places` decimals, e.g. 400/3 -> "133.33".
std::string to_decimal(const Rational& r, int places = 2);

enum class CaseId : int {
    KnownWumpus = 1,
    KnownPit = 2,
    Safe = 3,
    MaybePit = 4,
    MaybeWumpus = 5,
    Unknown = 6,
};

// Outcome distribution for stepping onto a cell: wumpus, pit, gold, nothing.
struct OutcomeProbs {
    Rational wumpus;
    Rational pit;
    Rational gold;
    Rational nothing;

    friend bool operator==(const OutcomeProbs&, const OutcomeProbs&) = default;
};

struct OptionAssessment {
    Position pos;
    CaseId case_id = CaseId::Unknown;
    OutcomeProbs probs;
    Rational expected_score;

    friend bool operator==(const OptionAssessment&, const OptionAssessment&) = default;
};

struct RationaleRow {
    std::vector<Position> positions;
    OutcomeProbs probs;
    Rational expected_score;
    bool starred = false;

    friend bool operator==(const RationaleRow&, const RationaleRow&) = default;
};

// Throws EngineFault for the two impossible combinations with a Yes.
CaseId classify(HazardJudgment j);

const OutcomeProbs& case_probs(CaseId c);

// Event-weighted sum: wumpus -1000, pit -100, gold +500, nothing 0. The
// uncovering cost is common to every option and left out.
Rational expected_score(const OutcomeProbs& probs);

std::vector<OptionAssessment> assess_options(const KnowledgeBase& kb, const std::vector<Position>& frontier);

// Uniform draw among the options tied for the highest expected score.
Position recommend(const std::vector<OptionAssessment>& assessments, std::mt19937_64& rng);

std::vector<Position> argmax_set(const std::vector<OptionAssessment>& assessments);

// Rows group options with identical outcome vectors, sorted by descending
// expected score; cells within a row are in column-then-row order. The row
// holding `recommended` is starred.
std::vector<RationaleRow> build_rationale(const std::vector<OptionAssessment>& assessments, Position recommended);

// Wire payload: [{cells, pWumpus, pPit, pGold, pNothing, expectedScore, starred}]
// with every number a 2-decimal string.
nlohmann::json rationale_to_json(const std::vector<RationaleRow>& rows);

nlohmann::json assessment_to_json(const OptionAssessment& a);
OptionAssessment assessment_from_json(const nlohmann::json& j);

}  // namespace treasure
