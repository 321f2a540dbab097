#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "treasure/world.hpp"

namespace treasure {

class MapFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// {"start":"A1","gold":"C3","wumpus":"B3","pits":["C1"]}
// Cells are read case-insensitively and written uppercase, pits in index order.
nlohmann::json map_to_json(const MapSpec& map);
MapSpec map_from_json(const nlohmann::json& j);

std::string format_map(const MapSpec& map);
MapSpec parse_map(const std::string& text);

MapSpec read_map_file(const std::filesystem::path& path);
void write_map_file(const std::filesystem::path& path, const MapSpec& map);

// Throws MapFormatError on anything that is not a grid cell.
Position parse_cell(const std::string& text);

}  // namespace treasure
