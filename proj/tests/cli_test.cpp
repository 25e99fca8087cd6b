#include "egorank/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "egorank/synth.hpp"

using namespace egorank;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path = fs::temp_directory_path() /
               ("egorank_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

fs::path fixture_path() {
    return fs::path(EGORANK_SOURCE_DIR) / "testdata" / "fixture.csv";
}

int cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"ego-ranker"};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("config: empty document keeps defaults") {
    const auto config = config_from_json("{}");
    CHECK(config.weights.alpha == 1.0);
    CHECK(config.weights.delta == 0.25);
    CHECK(config.window_length == 7 * 86400);
    CHECK_FALSE(config.epoch_start.has_value());
    CHECK(config.layout.cumulative_bounds == std::vector<std::size_t>{5, 15, 45, 135});
    CHECK(config.tolerance == kDefaultSolveTolerance);
}

TEST_CASE("config: full document round-trips into fields") {
    const auto config = config_from_json(R"({
        "weights": {"alpha": 2, "beta": 1, "gamma": 0.5, "delta": 0.1,
                    "size_scaling": "log_size", "size_ref": 256},
        "window": {"length_seconds": 86400, "epoch_start": 1000},
        "circles": {"bounds": [3, 9, 27]},
        "solver": {"tolerance": 1e-8},
        "state_dir": "/tmp/somewhere"
    })");
    CHECK(config.weights.alpha == 2.0);
    CHECK(config.weights.size_scaling == SizeScaling::log_size);
    CHECK(config.weights.size_ref == 256);
    CHECK(config.window_length == 86400);
    CHECK(config.epoch_start == 1000);
    CHECK(config.layout.cumulative_bounds == std::vector<std::size_t>{3, 9, 27});
    CHECK(config.tolerance == 1e-8);
    CHECK(config.state_dir == fs::path("/tmp/somewhere"));
}

TEST_CASE("config: unknown keys are rejected at every level") {
    CHECK_THROWS_AS(config_from_json(R"({"wieghts": {}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"weights": {"alhpa": 1}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"window": {"length": 5}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"weights": {"size_scaling": "nope"}})"),
                    ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"solver": {"tolerance": -1}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json("[]"), ConfigError);
}

TEST_CASE("EGO_RANKER_STATE overrides the configured state dir") {
    RunConfig config;
    ::setenv("EGO_RANKER_STATE", "/tmp/env_state", 1);
    apply_env_overrides(config);
    ::unsetenv("EGO_RANKER_STATE");
    CHECK(config.state_dir == fs::path("/tmp/env_state"));
}

TEST_CASE("ego ids are encoded safely for filenames") {
    CHECK(encode_ego_filename("alice") == "alice");
    CHECK(encode_ego_filename("we/ird ego") == "we%2fird%20ego");
    CHECK(encode_ego_filename("a%b") == "a%25b");
}

TEST_CASE("cmd_rank on the shipped fixture ranks bob above carol") {
    TempDir tmp;
    RunConfig config;
    RankOptions opts;
    opts.input = fixture_path();
    opts.ego = "alice";
    opts.out_dir = tmp.path;
    cmd_rank(config, opts);

    const auto rating = nlohmann::json::parse(slurp(tmp.path / "alice.rating.json"));
    CHECK(rating.at("ego") == "alice");
    REQUIRE(rating.at("ratings").size() == 2);
    CHECK(rating.at("ratings")[0].at("friend") == "bob");
    CHECK(rating.at("ratings")[0].at("rating").get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(rating.at("ratings")[1].at("friend") == "carol");
    CHECK(rating.at("ratings")[1].at("rating").get<double>() == doctest::Approx(1.0 / 3.0));

    const auto circles = nlohmann::json::parse(slurp(tmp.path / "alice.circles.json"));
    CHECK(circles.at("circles")[0] == nlohmann::json({"bob", "carol"}));

    // No stray temp files from atomic writes.
    for (const auto& entry : fs::directory_iterator(tmp.path))
        CHECK_FALSE(entry.path().string().ends_with(".tmp"));
}

TEST_CASE("cmd_rank --ego all writes one result pair per user") {
    TempDir tmp;
    RunConfig config;
    RankOptions opts;
    opts.input = fixture_path();
    opts.out_dir = tmp.path;
    cmd_rank(config, opts);
    CHECK(fs::exists(tmp.path / "alice.rating.json"));
    CHECK(fs::exists(tmp.path / "bob.rating.json"));
    CHECK(fs::exists(tmp.path / "carol.circles.json"));
}

TEST_CASE("cmd_rank rejects an ego absent from the input") {
    TempDir tmp;
    RunConfig config;
    RankOptions opts;
    opts.input = fixture_path();
    opts.ego = "dave";
    opts.out_dir = tmp.path;
    CHECK_THROWS_AS(cmd_rank(config, opts), ConfigError);
}

namespace {

EventStream seeded_trace() {
    const std::size_t sizes[] = {3, 3};
    const double strengths[] = {4.0, 1.0};
    const auto truth = generate_truth(sizes, strengths, 0);
    TraceConfig cfg;
    cfg.duration_windows = 10;
    cfg.base_rates = {{InteractionType::call, 0.8}, {InteractionType::message, 0.6}};
    return sample_trace(truth, cfg, WindowSpec{7 * 86400, 0}, 99);
}

} // namespace

TEST_CASE("ingest in two sessions then rank equals rank at once, byte for byte") {
    TempDir tmp;
    const auto stream = seeded_trace();
    REQUIRE_FALSE(stream.events.empty());

    // The pipeline will derive this epoch from the data; split on a window
    // boundary under the same epoch.
    const std::int64_t epoch = (stream.min_timestamp() / 86400) * 86400;
    const std::int64_t cut = epoch + 5 * 7 * 86400;

    EventStream part1, part2;
    for (const auto& e : stream.events)
        (e.timestamp < cut ? part1 : part2).events.push_back(e);
    REQUIRE_FALSE(part1.events.empty());
    REQUIRE_FALSE(part2.events.empty());

    spit(tmp.path / "whole.csv", serialize_stream_csv(stream));
    spit(tmp.path / "part1.csv", serialize_stream_csv(part1));
    spit(tmp.path / "part2.csv", serialize_stream_csv(part2));

    RunConfig config;
    config.state_dir = tmp.path / "state";

    IngestOptions ingest;
    ingest.ego = "ego";
    ingest.input = tmp.path / "part1.csv";
    const auto s1 = cmd_ingest(config, ingest);
    CHECK(s1.egos_updated == 1);
    ingest.input = tmp.path / "part2.csv";
    const auto s2 = cmd_ingest(config, ingest);
    CHECK(s2.egos_updated == 1);
    CHECK(s2.warnings == 0);

    RankOptions from_state;
    from_state.ego = "ego";
    from_state.out_dir = tmp.path / "out_state";
    cmd_rank(config, from_state);

    RankOptions at_once;
    at_once.input = tmp.path / "whole.csv";
    at_once.ego = "ego";
    at_once.out_dir = tmp.path / "out_whole";
    cmd_rank(config, at_once);

    CHECK(slurp(tmp.path / "out_state" / "ego.rating.json") ==
          slurp(tmp.path / "out_whole" / "ego.rating.json"));
    CHECK(slurp(tmp.path / "out_state" / "ego.circles.json") ==
          slurp(tmp.path / "out_whole" / "ego.circles.json"));
}

TEST_CASE("re-ingesting the same bytes warns via the digest log") {
    TempDir tmp;
    const auto stream = seeded_trace();
    spit(tmp.path / "batch.csv", serialize_stream_csv(stream));

    RunConfig config;
    config.state_dir = tmp.path / "state";

    IngestOptions ingest;
    ingest.input = tmp.path / "batch.csv";
    ingest.ego = "ego";
    CHECK(cmd_ingest(config, ingest).warnings == 0);

    // Same bytes again for a different ego: fresh state, so the append-only
    // check passes, but the digest log flags the repeat.
    ingest.ego = "f000";
    CHECK(cmd_ingest(config, ingest).warnings == 1);
}

TEST_CASE("a batch reaching back before the ingested boundary is rejected") {
    TempDir tmp;
    const auto stream = seeded_trace();
    spit(tmp.path / "batch.csv", serialize_stream_csv(stream));
    spit(tmp.path / "late.csv", "ego,f000,0,call\n");

    RunConfig config;
    config.state_dir = tmp.path / "state";

    IngestOptions ingest;
    ingest.input = tmp.path / "batch.csv";
    ingest.ego = "ego";
    cmd_ingest(config, ingest);

    ingest.input = tmp.path / "late.csv";
    CHECK_THROWS_AS(cmd_ingest(config, ingest), OutOfOrderBatch);
}

TEST_CASE("conflicting window settings against stored state are rejected") {
    TempDir tmp;
    const auto stream = seeded_trace();
    spit(tmp.path / "batch.csv", serialize_stream_csv(stream));

    RunConfig config;
    config.state_dir = tmp.path / "state";
    IngestOptions ingest;
    ingest.input = tmp.path / "batch.csv";
    ingest.ego = "ego";
    cmd_ingest(config, ingest);

    RunConfig other = config;
    other.window_length = 86400;
    CHECK_THROWS_AS(cmd_ingest(other, ingest), ConfigError);
}

TEST_CASE("tampered state files are detected by checksum") {
    TempDir tmp;
    const auto stream = seeded_trace();
    spit(tmp.path / "batch.csv", serialize_stream_csv(stream));

    RunConfig config;
    config.state_dir = tmp.path / "state";
    IngestOptions ingest;
    ingest.input = tmp.path / "batch.csv";
    ingest.ego = "ego";
    cmd_ingest(config, ingest);

    const fs::path state_file = config.state_dir / "ego.state.json";
    auto text = slurp(state_file);
    const auto pos = text.find("\"windows_processed\": ");
    REQUIRE(pos != std::string::npos);
    text[pos + 21] = '9';
    spit(state_file, text);
    CHECK_THROWS_AS(load_state(state_file), StateCorrupt);

    RankOptions from_state;
    from_state.ego = "ego";
    from_state.out_dir = tmp.path / "out";
    CHECK_THROWS_AS(cmd_rank(config, from_state), StateCorrupt);
}

TEST_CASE("simulate writes per-seed reports and a median aggregate") {
    TempDir tmp;
    spit(tmp.path / "scenario.json", R"({
        "tiers": {"sizes": [2, 3], "strengths": [5.0, 1.0]},
        "rates": {"call": 0.5, "message": 0.5},
        "windows": 12,
        "seeds": [1, 2, 3]
    })");
    RunConfig config;
    cmd_simulate(config, tmp.path / "scenario.json", tmp.path / "out");
    CHECK(fs::exists(tmp.path / "out" / "report_seed_1.json"));
    CHECK(fs::exists(tmp.path / "out" / "report_seed_2.json"));
    CHECK(fs::exists(tmp.path / "out" / "report_seed_3.json"));

    const auto aggregate = nlohmann::json::parse(slurp(tmp.path / "out" / "aggregate.json"));
    CHECK(aggregate.at("seeds") == 3);
    CHECK(aggregate.at("median_kendall_tau").get<double>() >= -1.0);
    CHECK(aggregate.at("median_kendall_tau").get<double>() <= 1.0);
}

TEST_CASE("simulate on the shipped scenario reproduces the golden reports") {
    TempDir tmp;
    RunConfig config;
    const fs::path scenarios = fs::path(EGORANK_SOURCE_DIR) / "scenarios" / "default.json";
    const fs::path golden = fs::path(EGORANK_SOURCE_DIR) / "testdata" / "golden";
    cmd_simulate(config, scenarios, tmp.path / "out");

    for (int seed = 1; seed <= 20; ++seed)
        CHECK(fs::exists(tmp.path / "out" /
                         ("report_seed_" + std::to_string(seed) + ".json")));
    CHECK(slurp(tmp.path / "out" / "aggregate.json") == slurp(golden / "aggregate.json"));
    CHECK(slurp(tmp.path / "out" / "report_seed_1.json") ==
          slurp(golden / "report_seed_1.json"));
    CHECK(slurp(tmp.path / "out" / "report_seed_20.json") ==
          slurp(golden / "report_seed_20.json"));
}

TEST_CASE("simulate rejects bad scenarios") {
    TempDir tmp;
    RunConfig config;
    spit(tmp.path / "empty_seeds.json", R"({
        "tiers": {"sizes": [2], "strengths": [1.0]},
        "rates": {"call": 0.5}, "windows": 5, "seeds": []
    })");
    CHECK_THROWS_AS(cmd_simulate(config, tmp.path / "empty_seeds.json", tmp.path / "out"),
                    ConfigError);
    spit(tmp.path / "typo.json", R"({
        "teirs": {"sizes": [2], "strengths": [1.0]},
        "rates": {"call": 0.5}, "windows": 5, "seeds": [1]
    })");
    CHECK_THROWS_AS(cmd_simulate(config, tmp.path / "typo.json", tmp.path / "out"),
                    ConfigError);
    CHECK_THROWS_AS(cmd_simulate(config, tmp.path / "missing.json", tmp.path / "out"),
                    ConfigError);
}

TEST_CASE("DOT export labels edges with six-decimal ratings") {
    TempDir tmp;
    // One window, b (face-to-face, weight 1.0) beats c (call, weight 0.5):
    // a single decided game, so the ratings are exactly 0.625 and 0.375.
    spit(tmp.path / "events.csv", "ego,b,100,face_to_face\nego,c,200,call\n");
    RunConfig config;
    RankOptions opts;
    opts.input = tmp.path / "events.csv";
    opts.ego = "ego";
    opts.out_dir = tmp.path;
    cmd_rank(config, opts);

    const auto dot = dot_from_files(tmp.path / "ego.rating.json", tmp.path / "ego.circles.json");
    CHECK(dot.find("graph ego_network {") != std::string::npos);
    CHECK(dot.find("\"ego\" [shape=doublecircle") != std::string::npos);
    CHECK(dot.find("\"b\" [circle=0") != std::string::npos);
    CHECK(dot.find("\"ego\" -- \"b\" [label=\"0.625000\"]") != std::string::npos);
    CHECK(dot.find("\"ego\" -- \"c\" [label=\"0.375000\"]") != std::string::npos);

    // Identical inputs give identical bytes.
    CHECK(dot == dot_from_files(tmp.path / "ego.rating.json", tmp.path / "ego.circles.json"));
}

TEST_CASE("DOT export of a single friend is two nodes and one edge") {
    TempDir tmp;
    spit(tmp.path / "events.csv", "ego,b,100,call\n");
    RunConfig config;
    RankOptions opts;
    opts.input = tmp.path / "events.csv";
    opts.ego = "ego";
    opts.out_dir = tmp.path;
    cmd_rank(config, opts);

    const auto dot = dot_from_files(tmp.path / "ego.rating.json", tmp.path / "ego.circles.json");
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::istringstream lines(dot);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find(" -- ") != std::string::npos)
            ++edges;
        else if (line.find("[") != std::string::npos && line.find("node [") == std::string::npos)
            ++nodes;
    }
    CHECK(nodes == 2);
    CHECK(edges == 1);
    CHECK(dot.find("[label=\"0.500000\"]") != std::string::npos);
}

TEST_CASE("run_cli maps error classes onto exit codes") {
    TempDir tmp;
    const std::string out = (tmp.path / "out").string();
    const std::string fixture = fixture_path().string();

    CHECK(cli({"rank", "--input", fixture.c_str(), "--ego", "alice", "--out", out.c_str()}) ==
          0);
    CHECK(cli({"rank", "--input", "/nonexistent.csv", "--out", out.c_str()}) == 1);
    CHECK(cli({"rank", "--input", fixture.c_str(), "--ego", "nobody", "--out", out.c_str()}) ==
          2);
    CHECK(cli({"frobnicate"}) == 2);
    CHECK(cli({"--help"}) == 0);

    // Line 1 parses; line 2 is malformed (a bad line 1 would read as a
    // header row under the format's header detection).
    spit(tmp.path / "bad.csv", "a,b,1,call\na,b,oops,call\n");
    const std::string bad = (tmp.path / "bad.csv").string();
    CHECK(cli({"rank", "--input", bad.c_str(), "--out", out.c_str()}) == 1);
    CHECK(cli({"rank", "--input", bad.c_str(), "--lenient", "--out", out.c_str()}) == 0);

    spit(tmp.path / "notjson.json", "nope");
    const std::string notjson = (tmp.path / "notjson.json").string();
    CHECK(cli({"export-dot", notjson.c_str(), notjson.c_str()}) == 1);

    const std::string cfg = (tmp.path / "cfg.json").string();
    spit(tmp.path / "cfg.json", R"({"unknown_key": 1})");
    CHECK(cli({"rank", "--input", fixture.c_str(), "--config", cfg.c_str(), "--out",
               out.c_str()}) == 2);
}

TEST_CASE("export-dot via run_cli writes the requested output file") {
    TempDir tmp;
    RunConfig config;
    RankOptions opts;
    opts.input = fixture_path();
    opts.ego = "alice";
    opts.out_dir = tmp.path;
    cmd_rank(config, opts);

    const std::string rating = (tmp.path / "alice.rating.json").string();
    const std::string circles = (tmp.path / "alice.circles.json").string();
    const std::string dot_file = (tmp.path / "alice.dot").string();
    CHECK(cli({"export-dot", rating.c_str(), circles.c_str(), "--out", dot_file.c_str()}) == 0);
    const auto dot = slurp(dot_file);
    CHECK(dot.find("\"alice\" -- \"bob\" [label=\"0.666667\"]") != std::string::npos);
}
