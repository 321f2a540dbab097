#include "treasure/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <queue>
#include <thread>

#include "treasure/map_io.hpp"

namespace treasure {

MapSpec generate_map(std::mt19937_64& rng, PitRange pits) {
    const int free_cells = kCellCount - 1;
    if (pits.min < 0 || pits.min > pits.max || pits.max > free_cells - 2)
        throw std::invalid_argument("pit count range leaves no room for gold and wumpus");

    MapSpec map;
    map.start = Position{0, 0};
    std::vector<Position> cells;
    for (int i = 0; i < kCellCount; ++i)
        if (Position::from_index(i) != map.start) cells.push_back(Position::from_index(i));
    std::shuffle(cells.begin(), cells.end(), rng);

    const int pit_count = std::uniform_int_distribution<int>(pits.min, pits.max)(rng);
    map.gold = cells[0];
    map.wumpus = cells[1];
    for (int i = 0; i < pit_count; ++i) map.pits |= cells[static_cast<std::size_t>(2 + i)].bit();
    validate(map);
    return map;
}

GameState self_play(const MapSpec& map, std::mt19937_64& rng, const SelfPlayObserver& observer) {
    GameState state = initial_state(map);
    KnowledgeBase kb = KnowledgeBase(map.start).tell(map.start, percept_at(map, map.start), Event::Plain);
    while (!state.terminal()) {
        const auto options = assess_options(kb, legal_moves(state));
        const Position pick = recommend(options, rng);
        if (observer) observer(state, kb, options, pick);
        state = apply_move(state, map, pick);
        kb = kb.tell(pick, percept_at(map, pick), state.steps.back().event);
    }
    return state;
}

GameState self_play(const MapSpec& map, std::uint64_t seed, const SelfPlayObserver& observer) {
    std::mt19937_64 rng(seed);
    return self_play(map, rng, observer);
}

int optimal_score(const MapSpec& map) {
    constexpr int kUnreached = std::numeric_limits<int>::max();
    std::array<int, kCellCount> dist;
    dist.fill(kUnreached);
    using Entry = std::pair<int, int>;  // (cost, cell)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    dist[map.start.index()] = 0;
    open.emplace(0, map.start.index());
    while (!open.empty()) {
        const auto [cost, cell] = open.top();
        open.pop();
        if (cost != dist[cell]) continue;
        if (cell == map.gold.index()) return kGoldReward - cost;
        for (CellMask m = kNeighbors[cell]; m != 0; m &= m - 1) {
            const Position next = Position::from_index(std::countr_zero(m));
            if (next == map.wumpus) continue;
            const int step = -kUncoverCost + (map.is_pit(next) ? -kPitPenalty : 0);
            if (cost + step < dist[next.index()]) {
                dist[next.index()] = cost + step;
                open.emplace(cost + step, next.index());
            }
        }
    }
    throw EngineFault("gold is unreachable without entering the wumpus cell");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run) {
    // splitmix64 finalizer over base + run
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (run + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

MapStats summarize(std::string id, const MapSpec& map, std::vector<std::uint64_t> seeds, std::vector<int> scores) {
    MapStats s;
    s.id = std::move(id);
    s.map = map;
    s.seeds = std::move(seeds);
    s.scores = std::move(scores);
    const auto n = static_cast<std::int64_t>(s.scores.size());
    if (n > 0) {
        const std::int64_t sum = std::accumulate(s.scores.begin(), s.scores.end(), std::int64_t{0});
        s.mean = Rational(sum, n);
        if (n > 1) {
            // Exact sum of squared deviations: sum (n*x - sum)^2 / n^2.
            std::int64_t ss = 0;
            for (int x : s.scores) {
                const std::int64_t d = n * x - sum;
                ss += d * d;
            }
            s.std_dev = std::sqrt(static_cast<double>(ss) / static_cast<double>(n * n) / static_cast<double>(n - 1));
        }
        s.std_err = s.std_dev / std::sqrt(static_cast<double>(n));
    }
    s.optimal = optimal_score(map);
    if (s.optimal > 0) s.ratio = s.mean / Rational(s.optimal);
    return s;
}

nlohmann::json SelectionCriteria::to_json() const {
    return {{"poolSize", pool_size},
            {"runsPerMap", runs_per_map},
            {"selectCount", select_count},
            {"maxStdDev", max_std_dev},
            {"goldNotAdjacentToStart", gold_not_adjacent_to_start},
            {"balanceQuadrants", balance_quadrants},
            {"pitRange", {pits.min, pits.max}}};
}

int quadrant(Position p) {
    const int half = kGridSide / 2;
    return (p.col / half) * 2 + (p.row / half);
}

std::vector<MapStats> evaluate_pool(const std::vector<MapSpec>& pool, const SelectionCriteria& criteria,
                                    std::mt19937_64& rng) {
    if (pool.empty()) throw std::invalid_argument("evaluate_pool: empty pool");
    if (criteria.runs_per_map <= 0) throw std::invalid_argument("evaluate_pool: runs_per_map must be positive");

    // Seeds are drawn up front in pool order, so results do not depend on
    // how the work is split across threads.
    std::vector<std::uint64_t> bases(pool.size());
    for (auto& b : bases) b = rng();

    std::vector<MapStats> stats(pool.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < pool.size(); i = next++) {
            std::vector<std::uint64_t> seeds;
            std::vector<int> scores;
            for (int r = 0; r < criteria.runs_per_map; ++r) {
                seeds.push_back(derive_seed(bases[i], static_cast<std::uint64_t>(r)));
                scores.push_back(self_play(pool[i], seeds.back()).score);
            }
            char id[32];
            std::snprintf(id, sizeof id, "pool-%03zu", i);
            stats[i] = summarize(id, pool[i], std::move(seeds), std::move(scores));
        }
    };
    unsigned threads = criteria.threads != 0 ? criteria.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(pool.size()));
    std::vector<std::jthread> pool_threads;
    for (unsigned t = 1; t < threads; ++t) pool_threads.emplace_back(worker);
    worker();
    pool_threads.clear();

    std::stable_sort(stats.begin(), stats.end(),
                     [](const MapStats& a, const MapStats& b) { return a.std_dev < b.std_dev; });
    return stats;
}

namespace {

bool gold_next_to_start(const MapSpec& m) { return adjacent(m.gold, m.start); }

bool pit_next_to_start(const MapSpec& m) { return (kNeighbors[m.start.index()] & m.pits) != 0; }

}  // namespace

std::vector<MapStats> select_test_maps(const std::vector<MapStats>& ranked, const SelectionCriteria& criteria) {
    const int want = criteria.select_count;
    if (want <= 0 || want > criteria.pool_size) throw std::invalid_argument("select_count must be in 1..pool_size");

    const double target = want / 4.0;
    const int hi = static_cast<int>(std::floor(target + 1.0));
    const int lo = std::max(0, static_cast<int>(std::ceil(target - 1.0)));

    std::array<int, 4> counts{};
    std::vector<MapStats> picked;
    int pass_dev = 0, pass_adjacent = 0;
    for (const auto& s : ranked) {
        if (static_cast<int>(picked.size()) == want) break;
        if (s.std_dev > criteria.max_std_dev) continue;
        ++pass_dev;
        if (criteria.gold_not_adjacent_to_start && gold_next_to_start(s.map)) continue;
        ++pass_adjacent;
        if (criteria.balance_quadrants) {
            const int q = quadrant(s.map.gold);
            if (counts[q] + 1 > hi) continue;
            // Still possible to lift every quadrant to `lo` with the slots left?
            auto after = counts;
            ++after[q];
            int deficit = 0;
            for (int c : after) deficit += std::max(0, lo - c);
            if (deficit > want - static_cast<int>(picked.size()) - 1) continue;
            counts = after;
        }
        picked.push_back(s);
    }

    if (static_cast<int>(picked.size()) < want) {
        if (pass_dev < want)
            throw SelectionError("low standard deviation",
                                 "only " + std::to_string(pass_dev) + " maps are within the standard deviation threshold");
        if (pass_adjacent < want)
            throw SelectionError("gold not adjacent to start",
                                 "only " + std::to_string(pass_adjacent) + " low-variance maps keep gold off the start");
        throw SelectionError("quadrant balance", "gold locations cannot be balanced across quadrants");
    }
    return picked;
}

std::vector<MapStats> select_training_maps(const std::vector<MapStats>& ranked, const std::vector<MapStats>& taken,
                                           const SelectionCriteria& criteria) {
    auto is_taken = [&](const MapStats& s) {
        return std::any_of(taken.begin(), taken.end(), [&](const MapStats& t) { return t.id == s.id; });
    };
    std::vector<MapStats> similar, pit_start;
    for (const auto& s : ranked) {
        if (is_taken(s)) continue;
        if (pit_next_to_start(s.map)) {
            if (pit_start.size() < 2) pit_start.push_back(s);
        } else if (similar.size() < 3 && s.std_dev <= criteria.max_std_dev && !gold_next_to_start(s.map)) {
            similar.push_back(s);
        }
    }
    if (similar.size() < 3) throw SelectionError("training: low standard deviation", "not enough low-variance maps left");
    if (pit_start.size() < 2) throw SelectionError("training: pit next to start", "not enough maps with a pit next to start");
    return {similar[0], similar[1], pit_start[0], similar[2], pit_start[1]};
}

PipelineResult run_pipeline(std::uint64_t master_seed, const SelectionCriteria& criteria) {
    std::mt19937_64 rng(master_seed);
    std::vector<MapSpec> pool;
    pool.reserve(static_cast<std::size_t>(criteria.pool_size));
    for (int i = 0; i < criteria.pool_size; ++i) pool.push_back(generate_map(rng, criteria.pits));

    PipelineResult out;
    out.seed = master_seed;
    out.criteria = criteria;
    out.ranked = evaluate_pool(pool, criteria, rng);
    out.test = select_test_maps(out.ranked, criteria);
    out.training = select_training_maps(out.ranked, out.test, criteria);
    return out;
}

nlohmann::json stats_to_json(const MapStats& s) {
    nlohmann::json j{{"id", s.id},
                     {"map", map_to_json(s.map)},
                     {"scores", s.scores},
                     {"seeds", s.seeds},
                     {"mean", boost::rational_cast<double>(s.mean)},
                     {"stdDev", s.std_dev},
                     {"stdErr", s.std_err},
                     {"optimal", s.optimal}};
    j["ratio"] = s.ratio ? nlohmann::json(boost::rational_cast<double>(*s.ratio)) : nlohmann::json(nullptr);
    return j;
}

}  // namespace treasure
