#include "treasure/world.hpp"

#include <bit>
#include <cctype>

namespace treasure {

std::optional<Position> Position::parse(std::string_view text) {
    if (text.size() < 2) return std::nullopt;
    const int col = std::toupper(static_cast<unsigned char>(text[0])) - 'A';
    int row = 0;
    for (char c : text.substr(1)) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        row = row * 10 + (c - '0');
        if (row > kGridSide) return std::nullopt;
    }
    Position p{col, row - 1};
    if (!p.valid()) return std::nullopt;
    return p;
}

std::string Position::to_string() const {
    return std::string(1, static_cast<char>('A' + col)) + std::to_string(row + 1);
}

void validate(const MapSpec& map) {
    for (Position p : {map.start, map.gold, map.wumpus})
        if (!p.valid()) throw InvalidMap("position off the grid");
    if ((map.pits & ~kAllCells) != 0) throw InvalidMap("pit off the grid");
    if (map.gold == map.start) throw InvalidMap("gold on the start cell");
    if (map.wumpus == map.start) throw InvalidMap("wumpus on the start cell");
    if (map.gold == map.wumpus) throw InvalidMap("gold and wumpus share a cell");
    if (map.is_pit(map.start)) throw InvalidMap("pit on the start cell");
    if (map.is_pit(map.gold)) throw InvalidMap("pit on the gold cell");
    if (map.is_pit(map.wumpus)) throw InvalidMap("pit on the wumpus cell");
}

Percept percept_at(const MapSpec& map, Position pos) {
    const CellMask around = kNeighbors[pos.index()];
    return Percept{(around & map.pits) != 0, (around & map.wumpus.bit()) != 0};
}

const char* to_string(Status s) {
    switch (s) {
        case Status::InProgress: return "in_progress";
        case Status::Won: return "won";
        case Status::Dead: return "dead";
    }
    return "?";
}

const char* to_string(Event e) {
    switch (e) {
        case Event::Plain: return "plain";
        case Event::PitFall: return "pit";
        case Event::Gold: return "gold";
        case Event::Wumpus: return "wumpus";
    }
    return "?";
}

GameState initial_state(const MapSpec& map) {
    GameState s;
    s.start = map.start;
    s.current = map.start;
    s.visited = map.start.bit();
    return s;
}

CellMask frontier_mask(const GameState& state) {
    if (state.terminal()) return 0;
    return expand(state.visited);
}

std::vector<Position> legal_moves(const GameState& state) { return cells_of(frontier_mask(state)); }

GameState apply_move(const GameState& state, const MapSpec& map, Position pos) {
    if (state.terminal()) throw IllegalMove("illegal move: game is over");
    if (!pos.valid() || (frontier_mask(state) & pos.bit()) == 0)
        throw IllegalMove("illegal move: " + (pos.valid() ? pos.to_string() : std::string("off-grid")) +
                          " is not on the frontier");

    GameState next = state;
    Step step{pos, kUncoverCost, Event::Plain};
    if (pos == map.gold) {
        step.delta += kGoldReward;
        step.event = Event::Gold;
        next.status = Status::Won;
    } else if (pos == map.wumpus) {
        step.delta += kWumpusPenalty;
        step.event = Event::Wumpus;
        next.status = Status::Dead;
    } else if (map.is_pit(pos) && (state.fallen_pits & pos.bit()) == 0) {
        step.delta += kPitPenalty;
        step.event = Event::PitFall;
        next.fallen_pits |= pos.bit();
    }
    next.visited |= pos.bit();
    next.current = pos;
    next.score += step.delta;
    next.steps.push_back(step);
    return next;
}

GameState replay(const MapSpec& map, const std::vector<Position>& choices) {
    GameState s = initial_state(map);
    for (std::size_t i = 0; i < choices.size(); ++i) {
        try {
            s = apply_move(s, map, choices[i]);
        } catch (const IllegalMove& e) {
            throw ReplayError(i, "choice " + std::to_string(i) + ": " + e.what());
        }
    }
    return s;
}

int closed_form_score(const GameState& state) {
    return kUncoverCost * (std::popcount(state.visited) - 1) + (state.status == Status::Won ? kGoldReward : 0) +
           (state.status == Status::Dead ? kWumpusPenalty : 0) + kPitPenalty * std::popcount(state.fallen_pits);
}

}  // namespace treasure
