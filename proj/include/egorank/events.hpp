#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "egorank/errors.hpp"

namespace egorank {

/// The four interaction kinds carried by an event log.
enum class InteractionType { face_to_face, video, call, message };

inline constexpr InteractionType kAllInteractionTypes[] = {
    InteractionType::face_to_face,
    InteractionType::video,
    InteractionType::call,
    InteractionType::message,
};

/// Canonical token for an interaction type ("face_to_face", "video", ...).
std::string_view type_token(InteractionType t) noexcept;

/// Parses a type token, case-insensitive. Accepted aliases:
/// face_to_face|f2f, video, call|phone, message|email|text.
/// Throws UnknownInteractionType for anything else.
InteractionType type_from_token(std::string_view token);

/// One undirected interaction between two users. The dyad is stored in
/// canonical order (user_a < user_b lexicographically); size is nonzero
/// only for message events.
struct InteractionEvent {
    std::string user_a;
    std::string user_b;
    std::int64_t timestamp = 0;
    InteractionType itype = InteractionType::call;
    std::uint64_t size = 0;

    bool operator==(const InteractionEvent&) const = default;

    bool involves(std::string_view user) const noexcept {
        return user_a == user || user_b == user;
    }
    /// The other endpoint of the dyad; precondition: involves(user).
    const std::string& peer_of(std::string_view user) const noexcept {
        return user_a == user ? user_b : user_a;
    }
};

/// Validates and canonicalizes raw fields into an event. Swaps the dyad
/// into lexicographic order and zeroes size for non-message types.
InteractionEvent make_event(std::string user_a, std::string user_b,
                            std::int64_t timestamp, InteractionType itype,
                            std::uint64_t size = 0);

enum class EventFormat { csv, jsonl };

/// Parses one record. CSV column order is user_a,user_b,timestamp,itype[,size];
/// JSONL keys are "a","b","ts","type"[,"size"], unknown keys ignored.
InteractionEvent parse_event_line(std::string_view line, EventFormat format);

/// Canonical CSV line (no trailing newline): a,b,ts,type,size.
std::string serialize_event_csv(const InteractionEvent& e);

/// Canonical JSONL object (no trailing newline).
std::string serialize_event_jsonl(const InteractionEvent& e);

/// A validated event sequence, stably sorted by timestamp, plus a content
/// digest of the raw input bytes it was loaded from.
struct EventStream {
    std::vector<InteractionEvent> events;
    std::string source_digest;

    std::int64_t min_timestamp() const noexcept {
        return events.empty() ? 0 : events.front().timestamp;
    }
    std::int64_t max_timestamp() const noexcept {
        return events.empty() ? 0 : events.back().timestamp;
    }
};

/// Builds a stream from already-validated events: stable-sorts by timestamp
/// and stamps the given digest.
EventStream make_stream(std::vector<InteractionEvent> events, std::string digest);

enum class ParseMode { strict, lenient };

/// A loaded stream plus the lines that were skipped in lenient mode
/// (always empty in strict mode, which throws instead).
struct LoadResult {
    EventStream stream;
    std::vector<ParseIssue> skipped;
};

/// Parses a whole in-memory document. Blank lines are ignored; a leading CSV
/// header row (non-numeric third column) is detected and skipped. In strict
/// mode any bad line aborts the load with ParseErrors listing every offender;
/// in lenient mode bad lines are collected into LoadResult::skipped.
LoadResult parse_stream(std::string_view text, EventFormat format,
                        ParseMode mode = ParseMode::strict);

/// parse_stream over a file's bytes. Throws IoError when unreadable.
LoadResult load_stream(const std::filesystem::path& path, EventFormat format,
                       ParseMode mode = ParseMode::strict);

/// One CSV line per event, in stream order, each newline-terminated.
std::string serialize_stream_csv(const EventStream& stream);

} // namespace egorank
