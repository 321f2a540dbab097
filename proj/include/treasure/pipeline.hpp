#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "treasure/advisor.hpp"
#include "treasure/world.hpp"

namespace treasure {

struct PitRange {
    int min = 1;
    int max = 3;
};

// Start is always A1; gold, wumpus and pits land on distinct non-start cells.
// Throws std::invalid_argument when the range cannot fit on the board.
MapSpec generate_map(std::mt19937_64& rng, PitRange pits = {});

// Called once per decision with the state and knowledge before the move.
using SelfPlayObserver = std::function<void(const GameState& state, const KnowledgeBase& kb,
                                            const std::vector<OptionAssessment>& options, Position recommended)>;

// The assistant plays alone, always taking its own recommendation.
GameState self_play(const MapSpec& map, std::mt19937_64& rng, const SelfPlayObserver& observer = {});
GameState self_play(const MapSpec& map, std::uint64_t seed, const SelfPlayObserver& observer = {});

// Omniscient score: 500 minus the cheapest start-to-gold path, where entering a
// cell costs 10 (110 for a pit) and the wumpus cell is impassable.
int optimal_score(const MapSpec& map);

// Seed for the run-th self-play of a map whose base seed is `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run);

struct MapStats {
    std::string id;
    MapSpec map;
    std::vector<std::uint64_t> seeds;
    std::vector<int> scores;
    Rational mean;
    double std_dev = 0;  // sample (n-1) standard deviation
    double std_err = 0;  // std_dev / sqrt(runs)
    int optimal = 0;
    std::optional<Rational> ratio;  // mean / optimal, only when optimal > 0
};

MapStats summarize(std::string id, const MapSpec& map, std::vector<std::uint64_t> seeds, std::vector<int> scores);

struct SelectionCriteria {
    int pool_size = 100;
    int runs_per_map = 20;
    int select_count = 10;
    double max_std_dev = 20.0;
    bool gold_not_adjacent_to_start = true;
    bool balance_quadrants = true;
    PitRange pits{};
    unsigned threads = 0;  // 0 = hardware concurrency

    nlohmann::json to_json() const;
};

class SelectionError : public std::runtime_error {
public:
    SelectionError(std::string criterion, const std::string& what)
        : std::runtime_error(what), criterion_(std::move(criterion)) {}
    const std::string& criterion() const { return criterion_; }

private:
    std::string criterion_;
};

// 2x2 block of the board holding p: 0 = A1..B2, 1 = A3..B4, 2 = C1..D2, 3 = C3..D4.
int quadrant(Position p);

// Self-plays every map runs_per_map times and returns stats sorted (stably) by
// ascending standard deviation. Map ids are "pool-NNN" by pool index.
std::vector<MapStats> evaluate_pool(const std::vector<MapSpec>& pool, const SelectionCriteria& criteria,
                                    std::mt19937_64& rng);

// Scans `ranked` in order and keeps select_count maps that pass the deviation
// threshold, keep gold off the start's neighbours, and keep every quadrant's
// gold count within one of select_count/4. Throws SelectionError naming the
// criterion that could not be met.
std::vector<MapStats> select_test_maps(const std::vector<MapStats>& ranked, const SelectionCriteria& criteria);

// Five practice maps in presentation order: low-variance, low-variance,
// pit next to start, low-variance, pit next to start. None overlaps `taken`.
std::vector<MapStats> select_training_maps(const std::vector<MapStats>& ranked, const std::vector<MapStats>& taken,
                                           const SelectionCriteria& criteria);

struct PipelineResult {
    std::uint64_t seed = 0;
    SelectionCriteria criteria;
    std::vector<MapStats> ranked;
    std::vector<MapStats> test;
    std::vector<MapStats> training;
};

PipelineResult run_pipeline(std::uint64_t master_seed, const SelectionCriteria& criteria);

nlohmann::json stats_to_json(const MapStats& s);

}  // namespace treasure
