#include "treasure/logic.hpp"

#include <bit>
#include <cstdlib>

namespace treasure {

std::string Literal::to_string() const {
    const std::string cell = std::string(1, static_cast<char>('A' + pos.col)) + "," + std::to_string(pos.row + 1);
    switch (kind) {
        case LiteralKind::Pit: return "P(" + cell + ")";
        case LiteralKind::NoPit: return "¬P(" + cell + ")";
        case LiteralKind::Wumpus: return "W(" + cell + ")";
        case LiteralKind::NoWumpus: return "¬W(" + cell + ")";
    }
    return "?";
}

CellMask Entailed::of(LiteralKind kind) const {
    switch (kind) {
        case LiteralKind::Pit: return pit;
        case LiteralKind::NoPit: return no_pit;
        case LiteralKind::Wumpus: return wumpus;
        case LiteralKind::NoWumpus: return no_wumpus;
    }
    return 0;
}

KnowledgeBase::KnowledgeBase(Position safe_start) {
    pit_free_facts_ = safe_start.bit();
    wumpus_free_facts_ = safe_start.bit();
    refresh();
}

KnowledgeBase KnowledgeBase::tell(Position pos, Percept percept, Event event) const {
    if ((observed_ & pos.bit()) != 0) throw DuplicateObservation("already observed " + pos.to_string());
    KnowledgeBase next = *this;
    next.observed_ |= pos.bit();
    next.percepts_[pos.index()] = percept;
    switch (event) {
        case Event::Plain:
        case Event::Gold:
            next.pit_free_facts_ |= pos.bit();
            next.wumpus_free_facts_ |= pos.bit();
            break;
        case Event::PitFall:
            next.pit_facts_ |= pos.bit();
            next.wumpus_free_facts_ |= pos.bit();
            break;
        case Event::Wumpus:
            next.wumpus_fact_ = pos;
            next.pit_free_facts_ |= pos.bit();
            break;
    }
    next.refresh();
    return next;
}

// Enumerates worlds as (wumpus cell) x (pit assignment over the cells some
// observation constrains). Pits elsewhere are unconstrained except that they
// cannot share the wumpus cell, so those cells are folded in analytically.
void KnowledgeBase::refresh() {
    const CellMask pit_decided = pit_facts_ | pit_free_facts_;
    const CellMask constrained = expand(observed_) & ~pit_decided;
    const CellMask free_cells = kAllCells & ~pit_decided & ~constrained;

    CellMask can_pit = 0, can_no_pit = 0, can_w = 0, can_no_w = 0;
    bool any = false;

    const CellMask wumpus_candidates =
        wumpus_fact_ ? (wumpus_fact_->bit() & ~wumpus_free_facts_) : (kAllCells & ~wumpus_free_facts_);

    for (CellMask wm = wumpus_candidates; wm != 0; wm &= wm - 1) {
        const int w = std::countr_zero(wm);
        const CellMask wbit = CellMask{1} << w;
        if ((pit_facts_ & wbit) != 0) continue;

        bool stench_ok = true;
        for (CellMask om = observed_; om != 0 && stench_ok; om &= om - 1) {
            const int v = std::countr_zero(om);
            stench_ok = percepts_[v]->stench == ((kNeighbors[v] & wbit) != 0);
        }
        if (!stench_ok) continue;

        const CellMask pit_choices = constrained & ~wbit;
        for (CellMask sub = pit_choices;; sub = (sub - 1) & pit_choices) {
            const CellMask pits = pit_facts_ | sub;
            bool breeze_ok = true;
            for (CellMask om = observed_; om != 0 && breeze_ok; om &= om - 1) {
                const int v = std::countr_zero(om);
                breeze_ok = percepts_[v]->breeze == ((kNeighbors[v] & pits) != 0);
            }
            if (breeze_ok) {
                any = true;
                can_pit |= pits | (free_cells & ~wbit);
                can_no_pit |= (kAllCells & ~pits);
                can_w |= wbit;
                can_no_w |= kAllCells & ~wbit;
            }
            if (sub == 0) break;
        }
    }

    entailed_ = Entailed{};
    entailed_.satisfiable = any;
    if (any) {
        entailed_.pit = kAllCells & ~can_no_pit;
        entailed_.no_pit = kAllCells & ~can_pit;
        entailed_.wumpus = kAllCells & ~can_no_w;
        entailed_.no_wumpus = kAllCells & ~can_w;
    }
}

const Entailed& KnowledgeBase::entailed() const {
    if (!entailed_.satisfiable) throw EngineFault("knowledge base is unsatisfiable");
    return entailed_;
}

bool KnowledgeBase::entails(Literal literal) const { return (entailed().of(literal.kind) & literal.pos.bit()) != 0; }

const char* to_string(Tri t) {
    switch (t) {
        case Tri::No: return "N";
        case Tri::Yes: return "Y";
        case Tri::Unknown: return "NA";
    }
    return "?";
}

HazardJudgment judge(const KnowledgeBase& kb, Position pos) {
    const Entailed& e = kb.entailed();
    const CellMask b = pos.bit();
    auto tri = [b](CellMask yes, CellMask no) {
        if ((yes & b) != 0) return Tri::Yes;
        if ((no & b) != 0) return Tri::No;
        return Tri::Unknown;
    };
    return HazardJudgment{tri(e.pit, e.no_pit), tri(e.wumpus, e.no_wumpus)};
}

std::vector<std::string> dump_entailed(const KnowledgeBase& kb) {
    const Entailed& e = kb.entailed();
    std::vector<std::string> out;
    for (int i = 0; i < kCellCount; ++i) {
        const Position p = Position::from_index(i);
        for (LiteralKind k : {LiteralKind::Pit, LiteralKind::NoPit, LiteralKind::Wumpus, LiteralKind::NoWumpus})
            if ((e.of(k) & p.bit()) != 0) out.push_back(Literal{k, p}.to_string());
    }
    return out;
}

BruteForceOracle::BruteForceOracle(const KnowledgeBase& kb) {
    std::array<std::optional<Percept>, kCellCount> seen{};
    for (int i = 0; i < kCellCount; ++i) seen[i] = kb.percept(Position::from_index(i));
    const auto wumpus_fact = kb.known_wumpus();

    for (int w = 0; w < kCellCount; ++w) {
        const Position wp = Position::from_index(w);
        for (CellMask pits = 0; pits <= kAllCells; ++pits) {
            if ((pits & wp.bit()) != 0) continue;  // pit and wumpus never share a cell
            bool ok = (pits & kb.known_pit_free()) == 0 && (pits & kb.known_pits()) == kb.known_pits() &&
                      (kb.known_wumpus_free() & wp.bit()) == 0 && (!wumpus_fact || *wumpus_fact == wp);
            for (int v = 0; v < kCellCount && ok; ++v) {
                if (!seen[v]) continue;
                const Position vp = Position::from_index(v);
                bool breeze = false, stench = false;
                for (int q = 0; q < kCellCount; ++q) {
                    const Position qp = Position::from_index(q);
                    if (std::abs(qp.col - vp.col) + std::abs(qp.row - vp.row) != 1) continue;
                    breeze = breeze || (pits & qp.bit()) != 0;
                    stench = stench || q == w;
                }
                ok = seen[v]->breeze == breeze && seen[v]->stench == stench;
            }
            if (!ok) continue;
            ++models_;
            can_pit_ |= pits;
            can_no_pit_ |= kAllCells & ~pits;
            can_wumpus_ |= wp.bit();
            can_no_wumpus_ |= kAllCells & ~wp.bit();
        }
    }
}

OracleVerdict BruteForceOracle::verdict(Literal literal) const {
    if (models_ == 0) return OracleVerdict::Unsatisfiable;
    CellMask counter = 0;
    switch (literal.kind) {
        case LiteralKind::Pit: counter = can_no_pit_; break;
        case LiteralKind::NoPit: counter = can_pit_; break;
        case LiteralKind::Wumpus: counter = can_no_wumpus_; break;
        case LiteralKind::NoWumpus: counter = can_wumpus_; break;
    }
    return (counter & literal.pos.bit()) != 0 ? OracleVerdict::NotEntailed : OracleVerdict::Entailed;
}

OracleVerdict brute_force_entails(const KnowledgeBase& kb, Literal literal) {
    return BruteForceOracle(kb).verdict(literal);
}

}  // namespace treasure
