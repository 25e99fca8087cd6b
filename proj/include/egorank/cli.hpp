#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "egorank/circles.hpp"
#include "egorank/colley.hpp"
#include "egorank/errors.hpp"
#include "egorank/events.hpp"
#include "egorank/scoring.hpp"
#include "egorank/tournament.hpp"

namespace egorank {

/// Every tunable of the pipeline, resolved from the JSON config file.
/// epoch_start is optional: when absent, it is derived per input stream
/// (smallest timestamp rounded down to midnight UTC) or, for stateful
/// ingestion, pinned once in the state directory's meta file.
struct RunConfig {
    InteractionWeights weights;
    std::int64_t window_length = 7 * 86400;
    std::optional<std::int64_t> epoch_start;
    CircleLayout layout;
    double tolerance = kDefaultSolveTolerance;
    std::filesystem::path state_dir = "state";

    void validate() const;
};

/// Parses a config document. Missing keys keep their defaults; unknown keys
/// at any level are a ConfigError (typo guard).
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// EGO_RANKER_STATE, when set, overrides state_dir.
void apply_env_overrides(RunConfig& config);

/// Window spec for a stream under this config.
WindowSpec resolve_window(const RunConfig& config, const EventStream& stream);

/// Scores one ego over a stream and folds the result into a fresh record.
TournamentRecord build_record(const EventStream& stream, const std::string& ego,
                              const WindowSpec& spec, const InteractionWeights& weights);

// --- state persistence (one snapshot file per ego plus a digest log) ---

/// Filesystem-safe encoding of an ego id (percent-escapes anything outside
/// [A-Za-z0-9._-]).
std::string encode_ego_filename(const std::string& ego);

/// Writes content to path via a temp file and rename, so a killed writer
/// never leaves a truncated file behind.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Persisted per-ego state: the tournament snapshot plus its companions.
struct EgoState {
    TournamentRecord record;
};

void save_state(const std::filesystem::path& state_dir, const TournamentRecord& record);
/// Loads and checksum-verifies a snapshot; StateCorrupt on mismatch.
TournamentRecord load_state(const std::filesystem::path& state_file);

// --- commands ---

struct RankOptions {
    std::optional<std::filesystem::path> input;  // absent: rank stored state
    EventFormat format = EventFormat::csv;
    std::string ego = "all";
    std::filesystem::path out_dir = ".";
    ParseMode mode = ParseMode::strict;
};

/// Full pipeline per requested ego; writes <ego>.rating.json and
/// <ego>.circles.json into out_dir. With an input file the run is pure
/// (state is neither read nor written); without one it ranks the snapshots
/// in state_dir.
void cmd_rank(const RunConfig& config, const RankOptions& opts);

struct IngestOptions {
    std::filesystem::path input;
    EventFormat format = EventFormat::csv;
    std::string ego = "all";
    ParseMode mode = ParseMode::strict;
};

struct IngestSummary {
    std::size_t events = 0;
    std::size_t egos_updated = 0;
    std::size_t warnings = 0;
};

/// Appends a chronological batch to the stored tournament state. Batches
/// must not reach back before a previously ingested window
/// (OutOfOrderBatch). Re-ingesting identical bytes is detected via the
/// digest log and warned about, not rejected (the double-count is the
/// caller's decision).
IngestSummary cmd_ingest(const RunConfig& config, const IngestOptions& opts);

/// Runs the synthetic-recovery scenario for every listed seed; writes one
/// report per seed plus an aggregate of seed medians.
void cmd_simulate(const RunConfig& config, const std::filesystem::path& scenario_path,
                  const std::filesystem::path& out_dir);

/// Renders a ranked ego network as a DOT star graph: ego center, nodes
/// colored and tagged by circle index, edges labeled with the 6-decimal
/// rating.
std::string dot_from_files(const std::filesystem::path& rating_file,
                           const std::filesystem::path& circles_file);

/// Argument parsing plus error-to-exit-code mapping:
///   0 success, 1 input/parse/state errors, 2 configuration/usage errors,
///   3 internal failures (solver included).
int run_cli(int argc, const char* const* argv);

} // namespace egorank
