#include "treasure/advisor.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>

namespace treasure {

std::string to_decimal(const Rational& r, int places) {
    std::int64_t scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const std::int64_t num = r.numerator() * scale;
    const std::int64_t den = r.denominator();  // always positive
    std::int64_t q = num / den;
    const std::int64_t rem = num % den;
    if (2 * std::llabs(rem) >= den) q += num < 0 ? -1 : 1;

    const bool negative = q < 0;
    const std::int64_t mag = std::llabs(q);
    std::string out = negative ? "-" : "";
    out += std::to_string(mag / scale);
    if (places > 0) {
        std::string frac = std::to_string(mag % scale);
        out += "." + std::string(static_cast<std::size_t>(places) - frac.size(), '0') + frac;
    }
    return out;
}

CaseId classify(HazardJudgment j) {
    if (j.wumpus == Tri::Yes) {
        if (j.pit != Tri::No) throw EngineFault("impossible judgment: wumpus entailed without pit excluded");
        return CaseId::KnownWumpus;
    }
    if (j.pit == Tri::Yes) {
        if (j.wumpus != Tri::No) throw EngineFault("impossible judgment: pit entailed without wumpus excluded");
        return CaseId::KnownPit;
    }
    if (j.pit == Tri::No && j.wumpus == Tri::No) return CaseId::Safe;
    if (j.pit == Tri::Unknown && j.wumpus == Tri::No) return CaseId::MaybePit;
    if (j.pit == Tri::No && j.wumpus == Tri::Unknown) return CaseId::MaybeWumpus;
    return CaseId::Unknown;
}

const OutcomeProbs& case_probs(CaseId c) {
    static const Rational z{0}, one{1}, half{1, 2}, third{1, 3}, quarter{1, 4};
    static const std::array<OutcomeProbs, 6> table{{
        {one, z, z, z},
        {z, one, z, z},
        {z, z, half, half},
        {z, third, third, third},
        {third, z, third, third},
        {quarter, quarter, quarter, quarter},
    }};
    return table.at(static_cast<std::size_t>(static_cast<int>(c) - 1));
}

Rational expected_score(const OutcomeProbs& probs) {
    return probs.wumpus * kWumpusPenalty + probs.pit * kPitPenalty + probs.gold * kGoldReward;
}

std::vector<OptionAssessment> assess_options(const KnowledgeBase& kb, const std::vector<Position>& frontier) {
    std::vector<OptionAssessment> out;
    out.reserve(frontier.size());
    for (Position p : frontier) {
        const CaseId c = classify(judge(kb, p));
        const OutcomeProbs& probs = case_probs(c);
        out.push_back(OptionAssessment{p, c, probs, expected_score(probs)});
    }
    return out;
}

std::vector<Position> argmax_set(const std::vector<OptionAssessment>& assessments) {
    std::vector<Position> best;
    if (assessments.empty()) return best;
    const auto top = std::max_element(assessments.begin(), assessments.end(), [](const auto& a, const auto& b) {
                         return a.expected_score < b.expected_score;
                     })->expected_score;
    for (const auto& a : assessments)
        if (a.expected_score == top) best.push_back(a.pos);
    return best;
}

Position recommend(const std::vector<OptionAssessment>& assessments, std::mt19937_64& rng) {
    const auto best = argmax_set(assessments);
    if (best.empty()) throw std::invalid_argument("recommend: no options");
    if (best.size() == 1) return best.front();
    std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
    return best[pick(rng)];
}

std::vector<RationaleRow> build_rationale(const std::vector<OptionAssessment>& assessments, Position recommended) {
    // CaseId determines the outcome vector one-to-one, so it doubles as the grouping key.
    std::map<CaseId, RationaleRow> groups;
    bool found = false;
    for (const auto& a : assessments) {
        auto [it, inserted] = groups.try_emplace(a.case_id);
        RationaleRow& row = it->second;
        if (inserted) {
            row.probs = a.probs;
            row.expected_score = a.expected_score;
        }
        row.positions.push_back(a.pos);
        if (a.pos == recommended) {
            row.starred = true;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("build_rationale: recommended cell is not an option");

    std::vector<RationaleRow> rows;
    for (auto& [id, row] : groups) {
        std::sort(row.positions.begin(), row.positions.end());
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const RationaleRow& a, const RationaleRow& b) {
        if (a.expected_score != b.expected_score) return a.expected_score > b.expected_score;
        return a.positions.front() < b.positions.front();
    });
    return rows;
}

nlohmann::json rationale_to_json(const std::vector<RationaleRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (Position p : row.positions) cells.push_back(p.to_string());
        out.push_back({{"cells", cells},
                       {"pWumpus", to_decimal(row.probs.wumpus)},
                       {"pPit", to_decimal(row.probs.pit)},
                       {"pGold", to_decimal(row.probs.gold)},
                       {"pNothing", to_decimal(row.probs.nothing)},
                       {"expectedScore", to_decimal(row.expected_score)},
                       {"starred", row.starred}});
    }
    return out;
}

nlohmann::json assessment_to_json(const OptionAssessment& a) {
    return {{"cell", a.pos.to_string()},
            {"case", static_cast<int>(a.case_id)},
            {"expectedScore", to_decimal(a.expected_score)}};
}

OptionAssessment assessment_from_json(const nlohmann::json& j) {
    const auto pos = Position::parse(j.at("cell").get<std::string>());
    const int id = j.at("case").get<int>();
    if (!pos || id < 1 || id > 6) throw std::invalid_argument("malformed option record");
    const auto c = static_cast<CaseId>(id);
    return OptionAssessment{*pos, c, case_probs(c), expected_score(case_probs(c))};
}

}  // namespace treasure
