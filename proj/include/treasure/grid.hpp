#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace treasure {

// The board is square. Everything downstream is written against kGridSide;
// only the 4x4 board is exercised in practice.
constexpr int kGridSide = 4;
constexpr int kCellCount = kGridSide * kGridSide;

// One bit per cell, bit i <-> Position::from_index(i).
using CellMask = std::uint32_t;
static_assert(kCellCount <= 32, "CellMask holds at most 32 cells");

constexpr CellMask kAllCells = kCellCount == 32 ? ~CellMask{0} : (CellMask{1} << kCellCount) - 1;

// Column 0..3 is displayed A..D, row 0..3 is displayed 1..4.
// Cell index orders column-major so that sorting by index is column-then-row.
struct Position {
    int col = 0;
    int row = 0;

    constexpr int index() const { return col * kGridSide + row; }
    constexpr CellMask bit() const { return CellMask{1} << index(); }
    constexpr bool valid() const { return col >= 0 && col < kGridSide && row >= 0 && row < kGridSide; }

    static constexpr Position from_index(int i) { return Position{i / kGridSide, i % kGridSide}; }

    // "B3" style; column letter case-insensitive.
    static std::optional<Position> parse(std::string_view text);
    std::string to_string() const;

    friend constexpr bool operator==(Position, Position) = default;
    friend constexpr auto operator<=>(Position a, Position b) { return a.index() <=> b.index(); }
};

constexpr CellMask neighbor_mask(Position p) {
    CellMask m = 0;
    if (p.col > 0) m |= Position{p.col - 1, p.row}.bit();
    if (p.col + 1 < kGridSide) m |= Position{p.col + 1, p.row}.bit();
    if (p.row > 0) m |= Position{p.col, p.row - 1}.bit();
    if (p.row + 1 < kGridSide) m |= Position{p.col, p.row + 1}.bit();
    return m;
}

inline constexpr std::array<CellMask, kCellCount> kNeighbors = [] {
    std::array<CellMask, kCellCount> table{};
    for (int i = 0; i < kCellCount; ++i) table[i] = neighbor_mask(Position::from_index(i));
    return table;
}();

constexpr bool adjacent(Position a, Position b) { return (kNeighbors[a.index()] & b.bit()) != 0; }

// All cells 4-adjacent to some cell of `mask`, excluding `mask` itself.
constexpr CellMask expand(CellMask mask) {
    CellMask out = 0;
    for (CellMask m = mask; m != 0; m &= m - 1) out |= kNeighbors[std::countr_zero(m)];
    return out & ~mask;
}

inline std::vector<Position> cells_of(CellMask mask) {
    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(std::popcount(mask)));
    for (CellMask m = mask; m != 0; m &= m - 1) out.push_back(Position::from_index(std::countr_zero(m)));
    return out;
}

inline CellMask mask_of(const std::vector<Position>& cells) {
    CellMask m = 0;
    for (Position p : cells) m |= p.bit();
    return m;
}

}  // namespace treasure
