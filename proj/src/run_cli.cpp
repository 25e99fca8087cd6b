#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "egorank/cli.hpp"

namespace egorank {

namespace {

EventFormat format_from_name(const std::string& name) {
    return name == "jsonl" ? EventFormat::jsonl : EventFormat::csv;
}

int dispatch(CLI::App& app, CLI::App* rank, CLI::App* ingest, CLI::App* simulate,
             CLI::App* export_dot, const std::string& config_path,
             const std::string& input, const std::string& format, const std::string& ego,
             const std::string& out, bool lenient, const std::string& scenario,
             const std::string& rating_file, const std::string& circles_file) {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    apply_env_overrides(config);
    const ParseMode mode = lenient ? ParseMode::lenient : ParseMode::strict;

    if (app.got_subcommand(rank)) {
        RankOptions opts;
        if (!input.empty()) opts.input = input;
        opts.format = format_from_name(format);
        opts.ego = ego;
        opts.out_dir = out;
        opts.mode = mode;
        cmd_rank(config, opts);
        return 0;
    }
    if (app.got_subcommand(ingest)) {
        IngestOptions opts;
        opts.input = input;
        opts.format = format_from_name(format);
        opts.ego = ego;
        opts.mode = mode;
        const IngestSummary summary = cmd_ingest(config, opts);
        std::cout << "ingested " << summary.events << " event(s) for " << summary.egos_updated
                  << " ego(s); warnings: " << summary.warnings << "\n";
        return 0;
    }
    if (app.got_subcommand(simulate)) {
        cmd_simulate(config, scenario, out);
        return 0;
    }
    if (app.got_subcommand(export_dot)) {
        const std::string dot = dot_from_files(rating_file, circles_file);
        if (out == ".")
            std::cout << dot;
        else
            write_text_atomic(out, dot);
        return 0;
    }
    return 2;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"ego-ranker: ranked ego networks and Dunbar circles from interaction logs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string input;
    std::string format = "csv";
    std::string ego = "all";
    std::string out = ".";
    std::string scenario;
    std::string rating_file;
    std::string circles_file;
    bool lenient = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
    };
    auto add_input = [&](CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--input", input, "event log file");
        if (required) opt->required();
        cmd->add_option("--format", format, "event log format")
            ->check(CLI::IsMember({"csv", "jsonl"}));
        cmd->add_flag("--lenient", lenient, "skip malformed lines instead of failing");
    };

    CLI::App* rank = app.add_subcommand(
        "rank", "score, rate and circle-partition egos from a log or stored state");
    add_common(rank);
    add_input(rank, false);
    rank->add_option("--ego", ego, "ego id, or 'all'");
    rank->add_option("--out", out, "output directory");

    CLI::App* ingest =
        app.add_subcommand("ingest", "fold a chronological batch into per-ego state");
    add_common(ingest);
    add_input(ingest, true);
    ingest->add_option("--ego", ego, "ego id, or 'all'");

    CLI::App* simulate =
        app.add_subcommand("simulate", "run synthetic ground-truth recovery scenarios");
    add_common(simulate);
    simulate->add_option("--scenario", scenario, "scenario JSON file")->required();
    simulate->add_option("--out", out, "output directory");

    CLI::App* export_dot =
        app.add_subcommand("export-dot", "render rank results as a DOT star graph");
    add_common(export_dot);
    export_dot->add_option("rating", rating_file, "rating JSON file")->required();
    export_dot->add_option("circles", circles_file, "circles JSON file")->required();
    export_dot->add_option("--out", out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return dispatch(app, rank, ingest, simulate, export_dot, config_path, input, format,
                        ego, out, lenient, scenario, rating_file, circles_file);
    } catch (const ParseErrors& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& issue : e.issues())
            std::cerr << "  line " << issue.line << ": " << issue.message << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BadTierSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const TimestampBeforeEpoch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolveFailure& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace egorank
