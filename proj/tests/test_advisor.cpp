#include <doctest.h>

#include <set>

#include "support.hpp"
#include "treasure/advisor.hpp"
#include "treasure/pipeline.hpp"

using namespace treasure;
using namespace treasure::testing;

namespace {

OptionAssessment option(const char* cell, CaseId c) {
    return OptionAssessment{at(cell), c, case_probs(c), expected_score(case_probs(c))};
}

}  // namespace

TEST_CASE("classification covers the six possible judgments") {
    CHECK(classify({Tri::No, Tri::Yes}) == CaseId::KnownWumpus);
    CHECK(classify({Tri::Yes, Tri::No}) == CaseId::KnownPit);
    CHECK(classify({Tri::No, Tri::No}) == CaseId::Safe);
    CHECK(classify({Tri::Unknown, Tri::No}) == CaseId::MaybePit);
    CHECK(classify({Tri::No, Tri::Unknown}) == CaseId::MaybeWumpus);
    CHECK(classify({Tri::Unknown, Tri::Unknown}) == CaseId::Unknown);
    CHECK_THROWS_AS(classify({Tri::Yes, Tri::Yes}), EngineFault);
    CHECK_THROWS_AS(classify({Tri::Yes, Tri::Unknown}), EngineFault);
    CHECK_THROWS_AS(classify({Tri::Unknown, Tri::Yes}), EngineFault);
}

TEST_CASE("outcome table rows") {
    CHECK(case_probs(CaseId::KnownWumpus) == OutcomeProbs{Rational(1), Rational(0), Rational(0), Rational(0)});
    CHECK(case_probs(CaseId::Safe) == OutcomeProbs{Rational(0), Rational(0), Rational(1, 2), Rational(1, 2)});
    CHECK(case_probs(CaseId::Unknown) == OutcomeProbs{Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)});
    for (int c = 1; c <= 6; ++c) {
        const auto& p = case_probs(static_cast<CaseId>(c));
        CHECK(p.wumpus + p.pit + p.gold + p.nothing == Rational(1));
        for (const Rational& x : {p.wumpus, p.pit, p.gold, p.nothing}) CHECK((x >= Rational(0) && x <= Rational(1)));
    }
}

TEST_CASE("expected scores match the table exactly") {
    const Rational expected[] = {-1000, -100, 250, Rational(400, 3), Rational(-500, 3), -150};
    const char* shown[] = {"-1000.00", "-100.00", "250.00", "133.33", "-166.67", "-150.00"};
    for (int c = 1; c <= 6; ++c) {
        const Rational s = expected_score(case_probs(static_cast<CaseId>(c)));
        CHECK(s == expected[c - 1]);
        CHECK(to_decimal(s) == shown[c - 1]);
    }
    CHECK(expected_score({Rational(0), Rational(0), Rational(0), Rational(1)}) == Rational(0));
    // strict ordering of the six rows
    CHECK(Rational(250) > Rational(400, 3));
    CHECK(Rational(400, 3) > Rational(-100));
    CHECK(Rational(-100) > Rational(-150));
    CHECK(Rational(-150) > Rational(-500, 3));
    CHECK(Rational(-500, 3) > Rational(-1000));
}

TEST_CASE("decimal rendering rounds half away from zero") {
    CHECK(to_decimal(Rational(1, 3)) == "0.33");
    CHECK(to_decimal(Rational(2, 3)) == "0.67");
    CHECK(to_decimal(Rational(-2, 3)) == "-0.67");
    CHECK(to_decimal(Rational(1, 8)) == "0.13");
    CHECK(to_decimal(Rational(-1, 8)) == "-0.13");
    CHECK(to_decimal(Rational(1, 2)) == "0.50");
    CHECK(to_decimal(Rational(-1, 400)) == "0.00");
}

TEST_CASE("assessing the opening position") {
    const MapSpec quiet = make_map("D4", "C3", {"D1"});
    const auto opts = assess_options(observe(quiet, {}), legal_moves(initial_state(quiet)));
    REQUIRE(opts.size() == 2);
    for (const auto& o : opts) {
        CHECK(o.case_id == CaseId::Safe);
        CHECK(o.expected_score == Rational(250));
    }

    const MapSpec breezy = make_map("D4", "C3", {"B1"});
    const auto b = assess_options(observe(breezy, {}), legal_moves(initial_state(breezy)));
    REQUIRE(b.size() == 2);
    for (const auto& o : b) {
        CHECK(o.case_id == CaseId::MaybePit);
        CHECK(to_decimal(o.expected_score) == "133.33");
    }

    const MapSpec m = example_map();
    const KnowledgeBase kb = observe(m, cells({"A2", "A3", "B2"}));
    for (const auto& o : assess_options(kb, legal_moves(replay(m, cells({"A2", "A3", "B2"})))))
        if (o.pos == at("B3")) CHECK(o.expected_score == Rational(-1000));
}

TEST_CASE("recommendation draws from the argmax set") {
    std::mt19937_64 rng(1);
    const std::vector<OptionAssessment> unique{option("A2", CaseId::MaybePit), option("C1", CaseId::Safe),
                                               option("B2", CaseId::Unknown)};
    for (int i = 0; i < 100; ++i) CHECK(recommend(unique, rng) == at("C1"));

    std::vector<OptionAssessment> all;
    const char* names[] = {"A2", "A3", "B1", "B2", "C1", "C2"};
    for (int c = 1; c <= 6; ++c) all.push_back(option(names[c - 1], static_cast<CaseId>(c)));
    CHECK(recommend(all, rng) == at("B1"));

    // Never a known wumpus when anything else is on offer.
    const std::vector<OptionAssessment> grim{option("A2", CaseId::KnownWumpus), option("B1", CaseId::MaybeWumpus)};
    CHECK(recommend(grim, rng) == at("B1"));

    CHECK_THROWS(recommend({}, rng));
}

TEST_CASE("two-way ties split evenly over seeded draws") {
    const std::vector<OptionAssessment> tie{option("A2", CaseId::MaybePit), option("B1", CaseId::MaybePit),
                                            option("C1", CaseId::Unknown)};
    int a2 = 0;
    const int draws = 10000;
    for (int seed = 0; seed < draws; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        const Position p = recommend(tie, rng);
        CHECK((p == at("A2") || p == at("B1")));
        a2 += p == at("A2");
    }
    const double f = static_cast<double>(a2) / draws;
    CHECK(f == doctest::Approx(0.5).epsilon(0.1));  // 0.5 +- 0.05
}

TEST_CASE("uncovering cost does not move the argmax") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<OptionAssessment> opts;
        const auto n = std::uniform_int_distribution<int>(1, 8)(rng);
        for (int i = 0; i < n; ++i) {
            auto c = static_cast<CaseId>(std::uniform_int_distribution<int>(1, 6)(rng));
            opts.push_back(option(Position::from_index(i).to_string().c_str(), c));
        }
        auto shifted = opts;
        for (auto& o : shifted) o.expected_score += kUncoverCost;
        CHECK(argmax_set(opts) == argmax_set(shifted));
    }
}

TEST_CASE("rationale rows") {
    SUBCASE("equal vectors share a row") {
        const auto rows = build_rationale({option("B1", CaseId::MaybePit), option("A2", CaseId::MaybePit)}, at("B1"));
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].positions == cells({"A2", "B1"}));
        CHECK(to_decimal(rows[0].expected_score) == "133.33");
        CHECK(rows[0].starred);
    }
    SUBCASE("rows sort by expected score") {
        const auto rows = build_rationale({option("C1", CaseId::Unknown), option("A3", CaseId::Safe)}, at("A3"));
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].positions == cells({"A3"}));
        CHECK(rows[0].expected_score == Rational(250));
        CHECK(rows[0].starred);
        CHECK(rows[1].positions == cells({"C1"}));
        CHECK(rows[1].expected_score == Rational(-150));
        CHECK_FALSE(rows[1].starred);
    }
    SUBCASE("single option") {
        const auto rows = build_rationale({option("A2", CaseId::Unknown)}, at("A2"));
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].starred);
    }
    SUBCASE("recommendation must be an option") {
        CHECK_THROWS(build_rationale({option("A2", CaseId::Unknown)}, at("B1")));
    }
}

TEST_CASE("rationale partitions the frontier with one starred maximum") {
    std::mt19937_64 rng(77);
    for (int game = 0; game < 200; ++game) {
        const MapSpec m = generate_map(rng, {0, 4});
        self_play(m, rng, [&](const GameState&, const KnowledgeBase&, const std::vector<OptionAssessment>& opts,
                              Position rec) {
            const auto rows = build_rationale(opts, rec);
            std::multiset<int> seen;
            int stars = 0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i > 0) CHECK(rows[i - 1].expected_score > rows[i].expected_score);
                for (Position p : rows[i].positions) seen.insert(p.index());
                for (const auto& o : opts)
                    for (Position p : rows[i].positions)
                        if (o.pos == p) CHECK(o.probs == rows[i].probs);
                stars += rows[i].starred;
            }
            CHECK(stars == 1);
            CHECK(seen.size() == opts.size());
            CHECK(std::set<int>(seen.begin(), seen.end()).size() == opts.size());
            CHECK(rows.front().starred);
        });
    }
}

TEST_CASE("rationale wire payload") {
    const auto rows = build_rationale({option("C1", CaseId::Unknown), option("B1", CaseId::MaybePit),
                                       option("A2", CaseId::MaybePit)},
                                      at("A2"));
    const auto j = rationale_to_json(rows);
    CHECK(j.dump() ==
          R"([{"cells":["A2","B1"],"expectedScore":"133.33","pGold":"0.33","pNothing":"0.33","pPit":"0.33","pWumpus":"0.00","starred":true},)"
          R"({"cells":["C1"],"expectedScore":"-150.00","pGold":"0.25","pNothing":"0.25","pPit":"0.25","pWumpus":"0.25","starred":false}])");
}
