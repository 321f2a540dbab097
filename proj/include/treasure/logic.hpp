#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treasure/world.hpp"

namespace treasure {

enum class LiteralKind { Pit, NoPit, Wumpus, NoWumpus };

struct Literal {
    LiteralKind kind;
    Position pos;

    // "P(B,1)", "¬P(B,1)", "W(B,1)", "¬W(B,1)"
    std::string to_string() const;
    friend bool operator==(const Literal&, const Literal&) = default;
};

// Raised when the knowledge base has no model. Legal play never gets here.
class EngineFault : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DuplicateObservation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Per-cell sets of entailed literals, as masks.
struct Entailed {
    bool satisfiable = false;
    CellMask pit = 0;
    CellMask no_pit = 0;
    CellMask wumpus = 0;
    CellMask no_wumpus = 0;

    CellMask of(LiteralKind kind) const;
    friend bool operator==(const Entailed&, const Entailed&) = default;
};

// Percept history plus hard facts about visited cells. The axioms (breeze and
// stench biconditionals, exactly one wumpus, no cell holding both a pit and the
// wumpus) are implicit in how worlds are enumerated.
//
// Values are immutable: tell() returns a new snapshot with its inference
// already computed, so queries are plain lookups.
class KnowledgeBase {
public:
    KnowledgeBase() { refresh(); }
    // The start cell is known hazard-free before anything is observed there.
    explicit KnowledgeBase(Position safe_start);

    KnowledgeBase tell(Position pos, Percept percept, Event event) const;

    bool entails(Literal literal) const;
    const Entailed& entailed() const;

    CellMask observed() const { return observed_; }
    std::optional<Percept> percept(Position p) const { return percepts_[p.index()]; }
    CellMask known_pits() const { return pit_facts_; }
    CellMask known_pit_free() const { return pit_free_facts_; }
    CellMask known_wumpus_free() const { return wumpus_free_facts_; }
    std::optional<Position> known_wumpus() const { return wumpus_fact_; }

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

private:
    void refresh();

    CellMask observed_ = 0;
    std::array<std::optional<Percept>, kCellCount> percepts_{};
    CellMask pit_facts_ = 0;
    CellMask pit_free_facts_ = 0;
    CellMask wumpus_free_facts_ = 0;
    std::optional<Position> wumpus_fact_;
    Entailed entailed_;
};

// Free-function forms.
inline KnowledgeBase tell(const KnowledgeBase& kb, Position pos, Percept percept, Event event) {
    return kb.tell(pos, percept, event);
}
inline bool entails(const KnowledgeBase& kb, Literal literal) { return kb.entails(literal); }

enum class Tri { No, Yes, Unknown };
const char* to_string(Tri t);

struct HazardJudgment {
    Tri pit = Tri::Unknown;
    Tri wumpus = Tri::Unknown;
    friend bool operator==(HazardJudgment, HazardJudgment) = default;
};

HazardJudgment judge(const KnowledgeBase& kb, Position pos);

// Every entailed literal over the whole board, in cell order then P, ¬P, W, ¬W.
std::vector<std::string> dump_entailed(const KnowledgeBase& kb);

// Independent oracle: enumerates every (wumpus cell, pit subset of the whole
// board) world and checks each axiom and observation directly. Slow; tests only.
enum class OracleVerdict { Entailed, NotEntailed, Unsatisfiable };

class BruteForceOracle {
public:
    explicit BruteForceOracle(const KnowledgeBase& kb);
    bool satisfiable() const { return models_ > 0; }
    long long model_count() const { return models_; }
    OracleVerdict verdict(Literal literal) const;

private:
    long long models_ = 0;
    // Cells where the literal's polarity is realised in at least one model.
    CellMask can_pit_ = 0, can_no_pit_ = 0, can_wumpus_ = 0, can_no_wumpus_ = 0;
};

OracleVerdict brute_force_entails(const KnowledgeBase& kb, Literal literal);

}  // namespace treasure
