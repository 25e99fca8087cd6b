#include "egorank/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "egorank/digest.hpp"
#include "egorank/synth.hpp"
#include "egorank/text_format.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace egorank {

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("read failure on '" + path.string() + "'");
    return buf.str();
}

json parse_json_file(const fs::path& path, const char* what) {
    json doc = json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded())
        throw MalformedRecord(std::string(what) + " '" + path.string() + "' is not valid JSON");
    return doc;
}

void expect_keys(const json& obj, std::initializer_list<const char*> allowed,
                 const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

std::vector<std::string> users_of(const EventStream& stream) {
    std::set<std::string> users;
    for (const auto& e : stream.events) {
        users.insert(e.user_a);
        users.insert(e.user_b);
    }
    return {users.begin(), users.end()};
}

void report_skipped(const std::vector<ParseIssue>& skipped) {
    for (const auto& issue : skipped)
        std::cerr << "warning: skipped line " << issue.line << ": " << issue.message << "\n";
}

} // namespace

// --- config ---

void RunConfig::validate() const {
    weights.validate();
    layout.validate();
    if (window_length <= 0)
        throw ConfigError("window length_seconds must be positive");
    if (!(tolerance > 0.0))
        throw ConfigError("solver tolerance must be positive");
}

RunConfig config_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ConfigError("config is not a JSON object");

    RunConfig config;
    try {
        expect_keys(doc, {"weights", "window", "circles", "solver", "state_dir"}, "config");

        if (doc.contains("weights")) {
            const json& w = doc["weights"];
            expect_keys(w, {"alpha", "beta", "gamma", "delta", "size_scaling", "size_ref"},
                        "config.weights");
            if (w.contains("alpha")) config.weights.alpha = w["alpha"].get<double>();
            if (w.contains("beta")) config.weights.beta = w["beta"].get<double>();
            if (w.contains("gamma")) config.weights.gamma = w["gamma"].get<double>();
            if (w.contains("delta")) config.weights.delta = w["delta"].get<double>();
            if (w.contains("size_ref"))
                config.weights.size_ref = w["size_ref"].get<std::uint64_t>();
            if (w.contains("size_scaling")) {
                const std::string mode = w["size_scaling"].get<std::string>();
                if (mode == "count_only")
                    config.weights.size_scaling = SizeScaling::count_only;
                else if (mode == "log_size")
                    config.weights.size_scaling = SizeScaling::log_size;
                else
                    throw ConfigError("size_scaling must be 'count_only' or 'log_size'");
            }
        }
        if (doc.contains("window")) {
            const json& w = doc["window"];
            expect_keys(w, {"length_seconds", "epoch_start"}, "config.window");
            if (w.contains("length_seconds"))
                config.window_length = w["length_seconds"].get<std::int64_t>();
            if (w.contains("epoch_start"))
                config.epoch_start = w["epoch_start"].get<std::int64_t>();
        }
        if (doc.contains("circles")) {
            const json& c = doc["circles"];
            expect_keys(c, {"bounds"}, "config.circles");
            if (c.contains("bounds"))
                config.layout.cumulative_bounds = c["bounds"].get<std::vector<std::size_t>>();
        }
        if (doc.contains("solver")) {
            const json& s = doc["solver"];
            expect_keys(s, {"tolerance"}, "config.solver");
            if (s.contains("tolerance")) config.tolerance = s["tolerance"].get<double>();
        }
        if (doc.contains("state_dir"))
            config.state_dir = doc["state_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }

    config.validate();
    return config;
}

RunConfig load_config(const fs::path& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return config_from_json(text);
}

void apply_env_overrides(RunConfig& config) {
    if (const char* dir = std::getenv("EGO_RANKER_STATE"); dir && *dir)
        config.state_dir = dir;
}

WindowSpec resolve_window(const RunConfig& config, const EventStream& stream) {
    WindowSpec spec;
    spec.window_length = config.window_length;
    spec.epoch_start = config.epoch_start
                           ? *config.epoch_start
                           : (stream.min_timestamp() / 86400) * 86400;
    spec.validate();
    return spec;
}

TournamentRecord build_record(const EventStream& stream, const std::string& ego,
                              const WindowSpec& spec, const InteractionWeights& weights) {
    TournamentRecord record(ego);
    fold_scores(record, score_ego(stream, ego, spec, weights));
    return record;
}

// --- state persistence ---

std::string encode_ego_filename(const std::string& ego) {
    static constexpr char hexdigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(ego.size());
    for (unsigned char c : ego) {
        const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (safe) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hexdigits[c >> 4];
            out += hexdigits[c & 0xf];
        }
    }
    return out;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out)
            throw IoError("write failure on '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

namespace {

fs::path state_file_for(const fs::path& state_dir, const std::string& ego) {
    return state_dir / (encode_ego_filename(ego) + ".state.json");
}

json record_to_json(const TournamentRecord& record) {
    json snapshot = json::parse(snapshot_json(record));
    json totals = json::object();
    for (const auto& f : record.friends()) totals[f] = record.value_total(f);

    json doc;
    doc["record"] = std::move(snapshot);
    doc["value_totals"] = std::move(totals);
    doc["last_window"] = record.last_window();
    return doc;
}

TournamentRecord record_from_json(const json& doc) {
    const json& snap = doc.at("record");
    const auto friends = snap.at("friends").get<std::vector<std::string>>();
    const auto n = static_cast<Eigen::Index>(friends.size());

    std::unordered_map<std::string, Eigen::Index> index;
    for (std::size_t i = 0; i < friends.size(); ++i)
        index[friends[i]] = static_cast<Eigen::Index>(i);

    Eigen::MatrixXd pair_games = Eigen::MatrixXd::Zero(n, n);
    for (const auto& pair : snap.at("pairs")) {
        const auto i = index.at(pair.at(0).get<std::string>());
        const auto j = index.at(pair.at(1).get<std::string>());
        const auto games = static_cast<double>(pair.at(2).get<std::int64_t>());
        pair_games(i, j) = games;
        pair_games(j, i) = games;
    }

    Eigen::VectorXd wins = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd losses = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd totals = Eigen::VectorXd::Zero(n);
    for (const auto& [f, w] : snap.at("wins").items()) wins[index.at(f)] = w.get<double>();
    for (const auto& [f, l] : snap.at("losses").items()) losses[index.at(f)] = l.get<double>();
    for (const auto& [f, v] : doc.at("value_totals").items())
        totals[index.at(f)] = v.get<double>();

    return TournamentRecord::from_parts(
        snap.at("ego").get<std::string>(), friends, std::move(pair_games), std::move(wins),
        std::move(losses), std::move(totals), snap.at("windows_processed").get<std::int64_t>(),
        doc.at("last_window").get<std::int64_t>());
}

} // namespace

void save_state(const fs::path& state_dir, const TournamentRecord& record) {
    json doc = record_to_json(record);
    doc["checksum"] = digest_hex(doc.dump());
    write_text_atomic(state_file_for(state_dir, record.ego()), doc.dump(2) + "\n");
}

TournamentRecord load_state(const fs::path& state_file) {
    json doc = json::parse(read_text(state_file), nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw StateCorrupt("state file '" + state_file.string() + "' is not valid JSON");

    if (!doc.contains("checksum"))
        throw StateCorrupt("state file '" + state_file.string() + "' has no checksum");
    const std::string stored = doc["checksum"].get<std::string>();
    doc.erase("checksum");
    if (digest_hex(doc.dump()) != stored)
        throw StateCorrupt("checksum mismatch in '" + state_file.string() + "'");

    try {
        return record_from_json(doc);
    } catch (const std::exception& e) {
        throw StateCorrupt("state file '" + state_file.string() + "' is inconsistent: " +
                           e.what());
    }
}

// --- rank ---

namespace {

void write_outputs(const fs::path& out_dir, const RatingResult& result,
                   const CircleAssignment& assignment) {
    const std::string base = encode_ego_filename(result.ego);
    write_text_atomic(out_dir / (base + ".rating.json"), rating_json_text(result));
    write_text_atomic(out_dir / (base + ".circles.json"), circles_json_text(assignment));
}

void rank_record(const RunConfig& config, const fs::path& out_dir,
                 const TournamentRecord& record) {
    RatingResult result = rank_friends(record, config.tolerance);
    CircleAssignment assignment =
        assign_circles(record.ego(), result.ranking, config.layout);
    write_outputs(out_dir, result, assignment);
}

} // namespace

void cmd_rank(const RunConfig& config, const RankOptions& opts) {
    config.validate();
    fs::create_directories(opts.out_dir);

    if (opts.input) {
        LoadResult loaded = load_stream(*opts.input, opts.format, opts.mode);
        report_skipped(loaded.skipped);
        const WindowSpec spec = resolve_window(config, loaded.stream);

        std::vector<std::string> egos;
        if (opts.ego == "all") {
            egos = users_of(loaded.stream);
        } else {
            const bool present =
                std::any_of(loaded.stream.events.begin(), loaded.stream.events.end(),
                            [&](const InteractionEvent& e) { return e.involves(opts.ego); });
            if (!present)
                throw ConfigError("ego '" + opts.ego +
                                  "' does not appear in the input (empty friend set)");
            egos.push_back(opts.ego);
        }

        for (const auto& ego : egos)
            rank_record(config, opts.out_dir,
                        build_record(loaded.stream, ego, spec, config.weights));
        return;
    }

    // Stateful: rank the stored snapshots.
    if (opts.ego == "all") {
        std::vector<fs::path> files;
        if (fs::is_directory(config.state_dir))
            for (const auto& entry : fs::directory_iterator(config.state_dir))
                if (entry.path().filename().string().ends_with(".state.json"))
                    files.push_back(entry.path());
        if (files.empty())
            throw ConfigError("no state snapshots in '" + config.state_dir.string() + "'");
        std::sort(files.begin(), files.end());
        for (const auto& f : files) rank_record(config, opts.out_dir, load_state(f));
    } else {
        const fs::path f = state_file_for(config.state_dir, opts.ego);
        if (!fs::exists(f))
            throw ConfigError("no state for ego '" + opts.ego + "' in '" +
                              config.state_dir.string() + "'");
        rank_record(config, opts.out_dir, load_state(f));
    }
}

// --- ingest ---

namespace {

WindowSpec resolve_ingest_window(const RunConfig& config, const EventStream& stream,
                                 const fs::path& state_dir) {
    const fs::path meta_path = state_dir / "meta.json";
    if (fs::exists(meta_path)) {
        json meta = parse_json_file(meta_path, "state meta");
        const auto length = meta.at("length_seconds").get<std::int64_t>();
        const auto epoch = meta.at("epoch_start").get<std::int64_t>();
        if (length != config.window_length)
            throw ConfigError("configured window length " + std::to_string(config.window_length) +
                              " conflicts with state window length " + std::to_string(length));
        if (config.epoch_start && *config.epoch_start != epoch)
            throw ConfigError("configured epoch_start conflicts with state epoch " +
                              std::to_string(epoch));
        return WindowSpec{length, epoch};
    }

    const WindowSpec spec = resolve_window(config, stream);
    json meta;
    meta["epoch_start"] = spec.epoch_start;
    meta["length_seconds"] = spec.window_length;
    write_text_atomic(meta_path, meta.dump(2) + "\n");
    return spec;
}

std::set<std::string> read_digest_log(const fs::path& state_dir) {
    std::set<std::string> digests;
    const fs::path log = state_dir / "digests.log";
    if (!fs::exists(log)) return digests;
    std::istringstream in(read_text(log));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) digests.insert(line);
    return digests;
}

void append_digest(const fs::path& state_dir, const std::string& digest) {
    std::ofstream out(state_dir / "digests.log", std::ios::app);
    if (!out)
        throw IoError("cannot append to digest log in '" + state_dir.string() + "'");
    out << digest << "\n";
}

} // namespace

IngestSummary cmd_ingest(const RunConfig& config, const IngestOptions& opts) {
    config.validate();

    LoadResult loaded = load_stream(opts.input, opts.format, opts.mode);
    const EventStream& stream = loaded.stream;
    report_skipped(loaded.skipped);

    IngestSummary summary;
    summary.events = stream.events.size();
    summary.warnings = loaded.skipped.size();

    fs::create_directories(config.state_dir);

    const auto known_digests = read_digest_log(config.state_dir);
    if (known_digests.count(stream.source_digest)) {
        std::cerr << "warning: input digest " << stream.source_digest
                  << " was already ingested; identical batches double-count\n";
        ++summary.warnings;
    }

    if (stream.events.empty()) {
        append_digest(config.state_dir, stream.source_digest);
        return summary;
    }

    const WindowSpec spec = resolve_ingest_window(config, stream, config.state_dir);

    std::vector<std::string> egos;
    if (opts.ego == "all")
        egos = users_of(stream);
    else
        egos.push_back(opts.ego);

    for (const auto& ego : egos) {
        std::vector<const InteractionEvent*> ego_events;
        for (const auto& e : stream.events)
            if (e.involves(ego)) ego_events.push_back(&e);
        if (ego_events.empty()) continue;

        const fs::path state_file = state_file_for(config.state_dir, ego);
        TournamentRecord record =
            fs::exists(state_file) ? load_state(state_file) : TournamentRecord(ego);

        if (record.last_window() >= 0) {
            const std::int64_t boundary =
                spec.epoch_start + (record.last_window() + 1) * spec.window_length;
            for (const InteractionEvent* e : ego_events)
                if (e->timestamp < boundary)
                    throw OutOfOrderBatch(
                        "event at t=" + std::to_string(e->timestamp) + " for ego '" + ego +
                        "' precedes the ingested boundary t=" + std::to_string(boundary));
        }

        fold_scores(record, score_ego(stream, ego, spec, config.weights));
        save_state(config.state_dir, record);
        ++summary.egos_updated;
    }

    append_digest(config.state_dir, stream.source_digest);
    return summary;
}

// --- simulate ---

namespace {

struct Scenario {
    std::vector<std::size_t> tier_sizes;
    std::vector<double> tier_strengths;
    TraceConfig trace;
    std::vector<std::uint64_t> seeds;
};

Scenario parse_scenario(const fs::path& path) {
    json doc;
    try {
        doc = parse_json_file(path, "scenario");
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (!doc.is_object())
        throw ConfigError("scenario is not a JSON object");

    Scenario sc;
    try {
        expect_keys(doc, {"tiers", "rates", "windows", "mean_message_size", "seeds"},
                    "scenario");
        const json& tiers = doc.at("tiers");
        expect_keys(tiers, {"sizes", "strengths"}, "scenario.tiers");
        sc.tier_sizes = tiers.at("sizes").get<std::vector<std::size_t>>();
        sc.tier_strengths = tiers.at("strengths").get<std::vector<double>>();

        for (const auto& [token, rate] : doc.at("rates").items())
            sc.trace.base_rates[type_from_token(token)] = rate.get<double>();
        sc.trace.duration_windows = doc.at("windows").get<std::int64_t>();
        if (doc.contains("mean_message_size"))
            sc.trace.mean_message_size = doc["mean_message_size"].get<std::uint64_t>();
        sc.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario error: ") + e.what());
    } catch (const UnknownInteractionType& e) {
        throw ConfigError(std::string("scenario error: ") + e.what());
    }

    if (sc.seeds.empty())
        throw ConfigError("scenario lists no seeds");
    return sc;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

} // namespace

void cmd_simulate(const RunConfig& config, const fs::path& scenario_path,
                  const fs::path& out_dir) {
    config.validate();
    const Scenario sc = parse_scenario(scenario_path);

    GroundTruth truth;
    TraceConfig trace = sc.trace;
    try {
        truth = generate_truth(sc.tier_sizes, sc.tier_strengths, 0);
        trace.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    WindowSpec spec;
    spec.window_length = config.window_length;
    spec.epoch_start = config.epoch_start.value_or(0);
    spec.validate();

    fs::create_directories(out_dir);

    std::vector<double> taus;
    std::vector<double> accuracies;
    for (std::uint64_t seed : sc.seeds) {
        const RecoveryReport report =
            evaluate(truth, trace, spec, config.weights, config.layout, seed);
        taus.push_back(report.kendall_tau);
        accuracies.push_back(report.circle_accuracy);
        write_text_atomic(out_dir / ("report_seed_" + std::to_string(seed) + ".json"),
                          report_json_text(report));
    }

    std::string aggregate;
    aggregate += "{\n";
    aggregate += "  \"median_kendall_tau\": " + fixed(median(taus), 4) + ",\n";
    aggregate += "  \"median_circle_accuracy\": " + fixed(median(accuracies), 4) + ",\n";
    aggregate += "  \"seeds\": " + std::to_string(sc.seeds.size()) + "\n";
    aggregate += "}\n";
    write_text_atomic(out_dir / "aggregate.json", aggregate);
}

// --- DOT export ---

std::string dot_from_files(const fs::path& rating_file, const fs::path& circles_file) {
    static constexpr const char* palette[] = {"#d73027", "#fc8d59", "#fee08b", "#91bfdb",
                                              "#4575b4"};
    static constexpr const char* overflow_color = "#bbbbbb";

    json rating = parse_json_file(rating_file, "rating file");
    json circles = parse_json_file(circles_file, "circles file");

    try {
        const std::string ego = rating.at("ego").get<std::string>();
        if (circles.at("ego").get<std::string>() != ego)
            throw MalformedRecord("rating and circles files describe different egos");

        std::map<std::string, std::size_t> circle_index;
        const auto& circle_lists = circles.at("circles");
        for (std::size_t k = 0; k < circle_lists.size(); ++k)
            for (const auto& f : circle_lists[k])
                circle_index[f.get<std::string>()] = k;
        const std::size_t overflow_index = circle_lists.size();
        for (const auto& f : circles.at("overflow"))
            circle_index[f.get<std::string>()] = overflow_index;

        std::string out;
        out += "graph ego_network {\n";
        out += "  node [style=filled];\n";
        out += "  \"" + json_escape(ego) + "\" [shape=doublecircle, fillcolor=\"#ffffff\"];\n";

        std::string edges;
        for (const auto& entry : rating.at("ratings")) {
            const std::string f = entry.at("friend").get<std::string>();
            const double r = entry.at("rating").get<double>();
            auto it = circle_index.find(f);
            if (it == circle_index.end())
                throw MalformedRecord("friend '" + f + "' is ranked but not in any circle");
            const std::size_t k = it->second;
            const bool overflow = k >= overflow_index;
            const char* color =
                overflow ? overflow_color : palette[k % (sizeof(palette) / sizeof(*palette))];
            out += "  \"" + json_escape(f) + "\" [circle=" +
                   (overflow ? std::string("overflow") : std::to_string(k)) +
                   ", fillcolor=\"" + color + "\"];\n";
            edges += "  \"" + json_escape(ego) + "\" -- \"" + json_escape(f) +
                     "\" [label=\"" + fixed(r, 6) + "\"];\n";
        }
        out += edges;
        out += "}\n";
        return out;
    } catch (const json::exception& e) {
        throw MalformedRecord(std::string("malformed result file: ") + e.what());
    }
}

} // namespace egorank
