#include "egorank/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace egorank {

void InteractionWeights::validate() const {
    if (alpha < 0 || beta < 0 || gamma < 0 || delta < 0)
        throw ConfigError("interaction weights must be non-negative");
    if (alpha == 0 && beta == 0 && gamma == 0 && delta == 0)
        throw ConfigError("at least one interaction weight must be positive");
    if (size_ref < 1)
        throw ConfigError("size_ref must be >= 1");
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) ||
        !std::isfinite(delta))
        throw ConfigError("interaction weights must be finite");
}

double InteractionWeights::weight_of(InteractionType t) const noexcept {
    switch (t) {
        case InteractionType::face_to_face: return alpha;
        case InteractionType::video: return beta;
        case InteractionType::call: return gamma;
        case InteractionType::message: return delta;
    }
    return 0.0;
}

void WindowSpec::validate() const {
    if (window_length <= 0)
        throw ConfigError("window_length must be positive");
}

WindowSpec default_window_for(const EventStream& stream, std::int64_t window_length) {
    WindowSpec spec;
    spec.window_length = window_length;
    spec.epoch_start = (stream.min_timestamp() / 86400) * 86400;
    spec.validate();
    return spec;
}

std::int64_t window_of(std::int64_t timestamp, const WindowSpec& spec) {
    if (timestamp < spec.epoch_start)
        throw TimestampBeforeEpoch("timestamp " + std::to_string(timestamp) +
                                   " precedes epoch " + std::to_string(spec.epoch_start));
    return (timestamp - spec.epoch_start) / spec.window_length;
}

std::map<CellKey, WindowCounts> aggregate_counts(const EventStream& stream,
                                                 const std::string& ego,
                                                 const WindowSpec& spec,
                                                 bool keep_message_sizes) {
    spec.validate();
    std::map<CellKey, WindowCounts> cells;
    for (const auto& e : stream.events) {
        if (!e.involves(ego)) continue;
        CellKey key{window_of(e.timestamp, spec), e.peer_of(ego)};
        WindowCounts& c = cells[key];
        switch (e.itype) {
            case InteractionType::face_to_face: ++c.face_to_face; break;
            case InteractionType::video: ++c.video; break;
            case InteractionType::call: ++c.calls; break;
            case InteractionType::message:
                ++c.messages;
                c.message_bytes += e.size;
                if (keep_message_sizes) c.message_sizes.push_back(e.size);
                break;
        }
    }
    return cells;
}

double interaction_value(const WindowCounts& counts, const InteractionWeights& w) {
    double message_term = 0.0;
    if (w.size_scaling == SizeScaling::count_only) {
        message_term = static_cast<double>(counts.messages);
    } else {
        if (counts.message_sizes.size() != counts.messages)
            throw std::logic_error("log_size scoring needs per-message sizes; "
                                   "aggregate with keep_message_sizes=true");
        for (std::uint64_t s : counts.message_sizes)
            message_term += std::log2(1.0 + static_cast<double>(s) /
                                                static_cast<double>(w.size_ref));
    }
    return w.alpha * static_cast<double>(counts.face_to_face) +
           w.beta * static_cast<double>(counts.video) +
           w.gamma * static_cast<double>(counts.calls) +
           w.delta * message_term;
}

std::vector<InteractionValue> score_ego(const EventStream& stream,
                                        const std::string& ego,
                                        const WindowSpec& spec,
                                        const InteractionWeights& w) {
    w.validate();
    const bool keep_sizes = w.size_scaling == SizeScaling::log_size;
    auto cells = aggregate_counts(stream, ego, spec, keep_sizes);

    std::vector<InteractionValue> values;
    values.reserve(cells.size());
    for (const auto& [key, counts] : cells)
        values.push_back(InteractionValue{ego, key.friend_id, key.window,
                                          interaction_value(counts, w)});
    return values;
}

} // namespace egorank
