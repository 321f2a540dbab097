#include "support.hpp"

#include <cstdlib>
#include <unistd.h>
#include <functional>
#include <stdexcept>

namespace treasure::testing {

Position at(const char* cell) {
    auto p = Position::parse(cell);
    if (!p) throw std::invalid_argument(std::string("bad cell ") + cell);
    return *p;
}

std::vector<Position> cells(std::initializer_list<const char*> names) {
    std::vector<Position> out;
    for (const char* n : names) out.push_back(at(n));
    return out;
}

MapSpec make_map(const char* gold, const char* wumpus, std::initializer_list<const char*> pits, const char* start) {
    MapSpec m;
    m.start = at(start);
    m.gold = at(gold);
    m.wumpus = at(wumpus);
    for (const char* p : pits) m.pits |= at(p).bit();
    validate(m);
    return m;
}

MapSpec example_map() { return make_map("D3", "B3", {"C1"}); }

std::vector<Position> random_playout(const MapSpec& map, std::mt19937_64& rng, int max_moves) {
    std::vector<Position> choices;
    GameState s = initial_state(map);
    while (!s.terminal() && static_cast<int>(choices.size()) < max_moves) {
        const auto moves = legal_moves(s);
        const Position p = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
        choices.push_back(p);
        s = apply_move(s, map, p);
    }
    return choices;
}

KnowledgeBase observe(const MapSpec& map, const std::vector<Position>& order) {
    KnowledgeBase kb(map.start);
    GameState s = initial_state(map);
    kb = kb.tell(map.start, percept_at(map, map.start), Event::Plain);
    for (Position p : order) {
        s = apply_move(s, map, p);
        kb = kb.tell(p, percept_at(map, p), s.steps.back().event);
    }
    return kb;
}

int brute_force_optimal(const MapSpec& map) {
    int best = -1000000;
    std::vector<bool> on_path(kCellCount, false);
    std::function<void(Position, int)> walk = [&](Position here, int cost) {
        if (here == map.gold) {
            best = std::max(best, 500 - cost);
            return;
        }
        for (int d = 0; d < 4; ++d) {
            static const int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
            const Position next{here.col + dc[d], here.row + dr[d]};
            if (!next.valid() || on_path[next.index()] || next == map.wumpus) continue;
            on_path[next.index()] = true;
            walk(next, cost + 10 + (map.is_pit(next) ? 100 : 0));
            on_path[next.index()] = false;
        }
    };
    on_path[map.start.index()] = true;
    walk(map.start, 0);
    return best;
}

std::optional<MapSpec> alternate_world(const MapSpec& map, CellMask visited, std::mt19937_64& rng) {
    const std::vector<Position> hidden = cells_of(kAllCells & ~visited);
    if (hidden.size() < 2) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, hidden.size() - 1);
    for (int attempt = 0; attempt < 20000; ++attempt) {
        MapSpec alt = map;
        alt.gold = hidden[pick(rng)];
        alt.wumpus = hidden[pick(rng)];
        if (alt.gold == alt.wumpus) continue;
        alt.pits = map.pits & visited;
        for (Position p : hidden)
            if (p != alt.gold && p != alt.wumpus && std::bernoulli_distribution(0.2)(rng)) alt.pits |= p.bit();
        if (alt == map) continue;
        bool same = true;
        for (Position v : cells_of(visited)) same = same && percept_at(alt, v) == percept_at(map, v);
        if (same) return alt;
    }
    return std::nullopt;
}

Fixtures single_map_fixtures(const MapSpec& map) {
    Fixtures f;
    f.training.push_back({"training-1", make_map("A2", "D4", {})});
    for (int i = 2; i <= 5; ++i) f.training.push_back({"training-" + std::to_string(i), map});
    for (int i = 1; i <= 10; ++i) f.test.push_back({"test-" + std::to_string(i), map});
    return f;
}

std::vector<std::string> payload_cells(const nlohmann::json& state) {
    std::vector<std::string> out;
    for (const auto& c : state.at("cells")) out.push_back(c.at("cell").get<std::string>());
    return out;
}

std::filesystem::path fixture_dir() {
    if (const char* env = std::getenv("TREASURE_FIXTURES")) return env;
    return "fixtures";
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("treasure-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace treasure::testing
