// treasure: map pipeline, self-play and experiment server front end.
//
//   treasure mapgen   --seed N --pool 100 --runs 20 --select 10 --out maps/
//   treasure selfplay --map FILE --runs K --seed N [--csv out.csv]
//   treasure optimal  --map FILE
//   treasure serve    --port 8080 --fixtures fixtures/ --seed N --idle-timeout 1800

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "treasure/http_server.hpp"
#include "treasure/map_io.hpp"
#include "treasure/pipeline.hpp"
#include "treasure/service.hpp"

using namespace treasure;
namespace fs = std::filesystem;

namespace {

void print_stats_row(const MapStats& s, const std::string& label) {
    std::printf("%-12s %-9s gold %-3s mean %7.2f  sd %6.2f  se %5.2f  optimal %4d  ratio %s\n", label.c_str(),
                s.id.c_str(), s.map.gold.to_string().c_str(), boost::rational_cast<double>(s.mean), s.std_dev,
                s.std_err, s.optimal,
                s.ratio ? (to_decimal(*s.ratio * Rational(100)) + "%").c_str() : "n/a");
}

int run_mapgen(std::uint64_t seed, const SelectionCriteria& criteria, const fs::path& out) {
    const PipelineResult r = run_pipeline(seed, criteria);
    fs::create_directories(out / "test");
    fs::create_directories(out / "training");
    char name[32];
    for (std::size_t i = 0; i < r.test.size(); ++i) {
        std::snprintf(name, sizeof name, "test-%02zu.json", i + 1);
        write_map_file(out / "test" / name, r.test[i].map);
    }
    for (std::size_t i = 0; i < r.training.size(); ++i) {
        std::snprintf(name, sizeof name, "training-%zu.json", i + 1);
        write_map_file(out / "training" / name, r.training[i].map);
    }

    nlohmann::json manifest{{"seed", seed}, {"criteria", criteria.to_json()}};
    manifest["test"] = nlohmann::json::array();
    manifest["training"] = nlohmann::json::array();
    manifest["pool"] = nlohmann::json::array();
    for (const auto& s : r.test) manifest["test"].push_back(stats_to_json(s));
    for (const auto& s : r.training) manifest["training"].push_back(stats_to_json(s));
    for (const auto& s : r.ranked)
        manifest["pool"].push_back({{"id", s.id}, {"stdDev", s.std_dev}, {"map", map_to_json(s.map)}});
    Rational ratio_sum{0};
    for (const auto& s : r.test) ratio_sum += s.ratio.value_or(Rational{0});
    manifest["meanRatio"] = boost::rational_cast<double>(ratio_sum / Rational(static_cast<std::int64_t>(r.test.size())));
    std::ofstream(out / "manifest.json") << manifest.dump(2) << "\n";

    for (std::size_t i = 0; i < r.test.size(); ++i) print_stats_row(r.test[i], "test-" + std::to_string(i + 1));
    for (std::size_t i = 0; i < r.training.size(); ++i)
        print_stats_row(r.training[i], "training-" + std::to_string(i + 1));
    std::printf("mean agent/optimal ratio over test maps: %.4f\n", manifest["meanRatio"].get<double>());
    return 0;
}

int run_selfplay(const fs::path& map_file, int runs, std::uint64_t seed, const std::string& csv) {
    const MapSpec map = read_map_file(map_file);
    const std::string id = map_file.stem().string();
    std::ofstream out;
    if (!csv.empty()) {
        out.open(csv);
        if (!out) throw std::runtime_error("cannot write " + csv);
        out << "mapId,run,seed,score,steps,outcome\n";
    }
    std::vector<std::uint64_t> seeds;
    std::vector<int> scores;
    for (int r = 0; r < runs; ++r) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(r));
        const GameState g = self_play(map, s);
        seeds.push_back(s);
        scores.push_back(g.score);
        if (out.is_open())
            out << id << ',' << r << ',' << s << ',' << g.score << ',' << g.steps.size() << ',' << to_string(g.status)
                << '\n';
    }
    print_stats_row(summarize(id, map, seeds, scores), "selfplay");
    return 0;
}

std::atomic<bool> g_stop{false};

int run_serve(int port, const fs::path& fixtures, std::uint64_t seed, int idle_timeout, const fs::path& logs,
              const fs::path& static_dir) {
    ServiceConfig config;
    config.log_dir = logs;
    config.master_seed = seed;
    config.idle_timeout = std::chrono::seconds(idle_timeout);
    SessionManager manager(config, Fixtures::load(fixtures));
    HttpService http(manager, static_dir);

    std::mutex m;
    std::condition_variable cv;
    std::jthread sweeper([&](std::stop_token st) {
        std::unique_lock lock(m);
        while (!st.stop_requested()) {
            cv.wait_for(lock, std::chrono::seconds(30));
            if (const auto n = manager.expire_idle(); n > 0)
                std::fprintf(stderr, "expired %zu idle session(s)\n", n);
        }
    });

    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    std::jthread watcher([&](std::stop_token st) {
        while (!g_stop && !st.stop_requested()) std::this_thread::sleep_for(std::chrono::milliseconds(200));
        http.stop();
    });

    std::fprintf(stderr, "listening on 0.0.0.0:%d (fixtures %s, seed %llu)\n", port, fixtures.c_str(),
                 static_cast<unsigned long long>(seed));
    const bool ok = http.listen("0.0.0.0", port);
    watcher.request_stop();
    sweeper.request_stop();
    cv.notify_all();
    if (!ok && !g_stop) {
        std::fprintf(stderr, "could not bind port %d\n", port);
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Treasure Hunter testbed: map pipeline, self-play and experiment server"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    SelectionCriteria criteria;
    std::string out_dir = "maps";
    auto* mapgen = app.add_subcommand("mapgen", "generate, evaluate and select experiment maps");
    mapgen->add_option("--seed", seed, "master seed")->required();
    mapgen->add_option("--pool", criteria.pool_size, "maps to generate")->check(CLI::PositiveNumber);
    mapgen->add_option("--runs", criteria.runs_per_map, "self-plays per map")->check(CLI::PositiveNumber);
    mapgen->add_option("--select", criteria.select_count, "test maps to select")->check(CLI::PositiveNumber);
    mapgen->add_option("--max-std-dev", criteria.max_std_dev, "standard deviation threshold");
    mapgen->add_option("--pits-min", criteria.pits.min, "fewest pits per map");
    mapgen->add_option("--pits-max", criteria.pits.max, "most pits per map");
    mapgen->add_option("--threads", criteria.threads, "worker threads (0 = all cores)");
    mapgen->add_option("--out", out_dir, "output directory");

    std::string map_file, csv;
    int runs = 20;
    auto* selfplay = app.add_subcommand("selfplay", "let the assistant play a map alone");
    selfplay->add_option("--map", map_file, "map file")->required()->check(CLI::ExistingFile);
    selfplay->add_option("--runs", runs, "number of runs")->check(CLI::PositiveNumber);
    selfplay->add_option("--seed", seed, "base seed");
    selfplay->add_option("--csv", csv, "per-run CSV output");

    auto* optimal = app.add_subcommand("optimal", "omniscient score of a map");
    optimal->add_option("--map", map_file, "map file")->required()->check(CLI::ExistingFile);

    int port = 8080, idle = 1800;
    std::string fixtures = "fixtures", logs = "logs", static_dir;
    auto* serve = app.add_subcommand("serve", "run the experiment HTTP service");
    serve->add_option("--port", port, "listen port")->envname("TREASURE_PORT");
    serve->add_option("--fixtures", fixtures, "fixture directory")->envname("TREASURE_FIXTURES");
    serve->add_option("--seed", seed, "master seed")->envname("TREASURE_SEED");
    serve->add_option("--idle-timeout", idle, "seconds before an idle session is abandoned")
        ->envname("TREASURE_IDLE_TIMEOUT");
    serve->add_option("--logs", logs, "session log directory")->envname("TREASURE_LOGS");
    serve->add_option("--static", static_dir, "directory of UI assets to serve at /");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mapgen) return run_mapgen(seed, criteria, out_dir);
        if (*selfplay) return run_selfplay(map_file, runs, seed, csv);
        if (*optimal) {
            std::printf("%d\n", optimal_score(read_map_file(map_file)));
            return 0;
        }
        if (*serve) return run_serve(port, fixtures, seed, idle, logs, static_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
