#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "treasure/grid.hpp"

namespace treasure {

// Event scores. Uncovering a cell always costs kUncoverCost, on top of
// whatever the cell holds.
constexpr int kUncoverCost = -10;
constexpr int kGoldReward = 500;
constexpr int kPitPenalty = -100;
constexpr int kWumpusPenalty = -1000;

struct MapSpec {
    Position start{0, 0};
    Position gold{};
    Position wumpus{};
    CellMask pits = 0;

    bool is_pit(Position p) const { return (pits & p.bit()) != 0; }
    friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

class InvalidMap : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Throws InvalidMap when cells collide or the start is hazardous.
void validate(const MapSpec& map);

struct Percept {
    bool breeze = false;
    bool stench = false;
    friend bool operator==(Percept, Percept) = default;
};

Percept percept_at(const MapSpec& map, Position pos);

enum class Status { InProgress, Won, Dead };

enum class Event { Plain, PitFall, Gold, Wumpus };

const char* to_string(Status s);
const char* to_string(Event e);

struct Step {
    Position cell;
    int delta = 0;
    Event event = Event::Plain;
    friend bool operator==(const Step&, const Step&) = default;
};

struct GameState {
    Position start{0, 0};
    Position current{0, 0};  // last chosen cell; display only
    CellMask visited = 0;
    CellMask fallen_pits = 0;
    int score = 0;
    Status status = Status::InProgress;
    std::vector<Step> steps;

    bool terminal() const { return status != Status::InProgress; }
    bool is_visited(Position p) const { return (visited & p.bit()) != 0; }
    friend bool operator==(const GameState&, const GameState&) = default;
};

class IllegalMove : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ReplayError : public IllegalMove {
public:
    ReplayError(std::size_t index, const std::string& what) : IllegalMove(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

GameState initial_state(const MapSpec& map);

// Frontier: unvisited cells 4-adjacent to the visited region. Empty once terminal.
CellMask frontier_mask(const GameState& state);
std::vector<Position> legal_moves(const GameState& state);

// Returns the successor state; throws IllegalMove (input untouched) when pos is
// not on the frontier or the game is over.
GameState apply_move(const GameState& state, const MapSpec& map, Position pos);

// Fold of apply_move. The first illegal choice throws ReplayError carrying its index.
GameState replay(const MapSpec& map, const std::vector<Position>& choices);

// Score implied by the state's sets and status alone.
int closed_form_score(const GameState& state);

}  // namespace treasure
