#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "egorank/errors.hpp"
#include "egorank/events.hpp"

namespace egorank {

/// How message size feeds the message term of the interaction value.
/// count_only: every message counts 1. log_size: a message of s bytes
/// counts log2(1 + s/size_ref), so bulk never dominates linearly.
enum class SizeScaling { count_only, log_size };

/// Per-type weights of the interaction value, plus the message-size knobs.
struct InteractionWeights {
    double alpha = 1.0;   // face-to-face
    double beta = 0.75;   // video
    double gamma = 0.5;   // call
    double delta = 0.25;  // message
    std::uint64_t size_ref = 512;
    SizeScaling size_scaling = SizeScaling::count_only;

    /// Throws ConfigError unless all weights are >= 0, at least one is
    /// positive, and size_ref >= 1.
    void validate() const;

    double weight_of(InteractionType t) const noexcept;
};

/// Fixed-length half-open windows [start, start + length) tiled from
/// epoch_start.
struct WindowSpec {
    std::int64_t window_length = 7 * 86400;
    std::int64_t epoch_start = 0;

    void validate() const;  // ConfigError unless window_length > 0
};

/// Default windowing for a stream: 7-day windows anchored at the smallest
/// timestamp rounded down to midnight UTC.
WindowSpec default_window_for(const EventStream& stream,
                              std::int64_t window_length = 7 * 86400);

/// Index of the window containing ts. Throws TimestampBeforeEpoch when
/// ts < spec.epoch_start.
std::int64_t window_of(std::int64_t timestamp, const WindowSpec& spec);

/// Per-(friend, window) interaction tallies.
struct WindowCounts {
    std::uint64_t face_to_face = 0;
    std::uint64_t video = 0;
    std::uint64_t calls = 0;
    std::uint64_t messages = 0;
    std::uint64_t message_bytes = 0;
    /// Individual message sizes; populated only when aggregation is asked
    /// to keep them (log_size scoring needs the per-message breakdown).
    std::vector<std::uint64_t> message_sizes;

    bool empty() const noexcept {
        return face_to_face == 0 && video == 0 && calls == 0 && messages == 0;
    }
};

/// Aggregation cell key, ordered by window then friend so iteration order
/// matches the scoring output contract.
struct CellKey {
    std::int64_t window = 0;
    std::string friend_id;

    auto operator<=>(const CellKey&) const = default;
};

/// Buckets an ego's events into (friend, window) cells. Only events whose
/// dyad includes ego contribute; each event lands in exactly one cell.
std::map<CellKey, WindowCounts> aggregate_counts(const EventStream& stream,
                                                 const std::string& ego,
                                                 const WindowSpec& spec,
                                                 bool keep_message_sizes = false);

/// The weighted interaction value of one cell:
///   alpha*F + beta*V + gamma*P + delta*M
/// where M is the message count (count_only) or the summed
/// log2(1 + size/size_ref) over messages (log_size).
double interaction_value(const WindowCounts& counts, const InteractionWeights& w);

/// The scalar closeness evidence for one (ego, friend, window) cell.
struct InteractionValue {
    std::string ego;
    std::string friend_id;
    std::int64_t window = 0;
    double value = 0.0;

    bool operator==(const InteractionValue&) const = default;
};

/// Full scoring pass for one ego: one InteractionValue per non-empty cell,
/// ordered by window ascending then friend id ascending.
std::vector<InteractionValue> score_ego(const EventStream& stream,
                                        const std::string& ego,
                                        const WindowSpec& spec,
                                        const InteractionWeights& w);

} // namespace egorank
