#pragma once

#include <filesystem>
#include <optional>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "treasure/harness.hpp"
#include "treasure/logic.hpp"
#include "treasure/world.hpp"

namespace treasure::testing {

Position at(const char* cell);
std::vector<Position> cells(std::initializer_list<const char*> names);

MapSpec make_map(const char* gold, const char* wumpus, std::initializer_list<const char*> pits,
                 const char* start = "A1");

// The example board: pit C1, wumpus B3, gold D3.
MapSpec example_map();

// Uniformly random frontier choices until the game ends or `max_moves` is hit.
std::vector<Position> random_playout(const MapSpec& map, std::mt19937_64& rng, int max_moves = kCellCount);

// Knowledge base after observing the given cells of `map` in order.
KnowledgeBase observe(const MapSpec& map, const std::vector<Position>& order);

// Exhaustive search over simple start-to-gold paths avoiding the wumpus:
// the best score 500 - sum(entry costs). Independent of the Dijkstra route.
int brute_force_optimal(const MapSpec& map);

// A different hidden world that agrees with `map` on every visited cell and
// produces the same percepts there. nullopt if sampling found none.
std::optional<MapSpec> alternate_world(const MapSpec& map, CellMask visited, std::mt19937_64& rng);

// Fixture set whose first practice map is won by moving to A2 and whose other
// fourteen maps are all `map`.
Fixtures single_map_fixtures(const MapSpec& map);

// Every cell name listed under "cells" in a state payload.
std::vector<std::string> payload_cells(const nlohmann::json& state);

std::filesystem::path fixture_dir();
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace treasure::testing
