#include "treasure/map_io.hpp"

#include <fstream>
#include <sstream>

namespace treasure {

using nlohmann::json;

Position parse_cell(const std::string& text) {
    auto p = Position::parse(text);
    if (!p) throw MapFormatError("not a grid cell: '" + text + "'");
    return *p;
}

json map_to_json(const MapSpec& map) {
    json pits = json::array();
    for (Position p : cells_of(map.pits)) pits.push_back(p.to_string());
    return json{{"start", map.start.to_string()},
                {"gold", map.gold.to_string()},
                {"wumpus", map.wumpus.to_string()},
                {"pits", pits}};
}

MapSpec map_from_json(const json& j) {
    if (!j.is_object()) throw MapFormatError("map record must be an object");
    auto cell = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) throw MapFormatError(std::string("missing field '") + key + "'");
        return parse_cell(j[key].get<std::string>());
    };
    MapSpec map;
    map.start = cell("start");
    map.gold = cell("gold");
    map.wumpus = cell("wumpus");
    if (j.contains("pits")) {
        if (!j["pits"].is_array()) throw MapFormatError("'pits' must be an array");
        for (const auto& p : j["pits"]) {
            if (!p.is_string()) throw MapFormatError("pit entries must be cell strings");
            const Position pos = parse_cell(p.get<std::string>());
            if (map.is_pit(pos)) throw MapFormatError("duplicate pit " + pos.to_string());
            map.pits |= pos.bit();
        }
    }
    try {
        validate(map);
    } catch (const InvalidMap& e) {
        throw MapFormatError(e.what());
    }
    return map;
}

std::string format_map(const MapSpec& map) {
    nlohmann::ordered_json j;
    j["start"] = map.start.to_string();
    j["gold"] = map.gold.to_string();
    j["wumpus"] = map.wumpus.to_string();
    j["pits"] = map_to_json(map)["pits"];
    return j.dump() + "\n";
}

MapSpec parse_map(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw MapFormatError(e.what());
    }
    return map_from_json(j);
}

MapSpec read_map_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MapFormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_map(buf.str());
}

void write_map_file(const std::filesystem::path& path, const MapSpec& map) {
    std::ofstream out(path);
    if (!out) throw MapFormatError("cannot write " + path.string());
    out << format_map(map);
}

}  // namespace treasure
