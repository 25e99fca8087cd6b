#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "egorank/circles.hpp"
#include "egorank/errors.hpp"
#include "egorank/events.hpp"
#include "egorank/scoring.hpp"

namespace egorank {

/// A known-truth tiered ego network: tier 0 is the closest group, and tier
/// strengths decrease strictly outward.
struct GroundTruth {
    std::string ego = "ego";
    std::vector<std::vector<std::string>> tiers;
    std::vector<double> strengths;
    std::uint64_t seed = 0;

    std::vector<std::string> all_friends() const;
    /// Tier index of a friend; throws FriendSetMismatch for strangers.
    std::size_t tier_of(const std::string& friend_id) const;
    double strength_of(const std::string& friend_id) const {
        return strengths[tier_of(friend_id)];
    }
};

/// Builds a truth with synthetic friend ids f000, f001, ... filled tier by
/// tier. Throws BadTierSpec on length mismatch, empty/zero tiers, or
/// strengths that are not strictly decreasing positives.
GroundTruth generate_truth(std::span<const std::size_t> tier_sizes,
                           std::span<const double> tier_strengths,
                           std::uint64_t seed);

/// Trace generator knobs. base_rates are expected events per window per
/// unit of tier strength, by type.
struct TraceConfig {
    std::int64_t duration_windows = 0;
    std::map<InteractionType, double> base_rates;
    std::uint64_t mean_message_size = 512;

    void validate() const;  // ConfigError
};

/// Draws a synthetic trace: per (friend, window, type) the event count is
/// Poisson with mean base_rate * tier_strength, timestamps uniform within
/// the window, message sizes geometric around mean_message_size. Fully
/// deterministic per seed; the samplers are hand-rolled so the byte stream
/// does not depend on standard-library distribution internals.
EventStream sample_trace(const GroundTruth& truth, const TraceConfig& cfg,
                         const WindowSpec& spec, std::uint64_t seed);

/// Rank correlation of a recovered ranking against the tier partial order.
/// Only cross-tier pairs are comparable: 1 when every such pair is ordered
/// correctly, -1 when all are inverted, 0 when no cross-tier pairs exist.
/// The ranking must be a permutation of the truth's friends
/// (FriendSetMismatch otherwise).
double kendall_tau(std::span<const std::string> ranking, const GroundTruth& truth);

/// Recovery quality of one end-to-end run.
struct RecoveryReport {
    double kendall_tau = 0.0;
    double circle_accuracy = 0.0;       // friends whose circle == tier, as a fraction
    std::vector<double> per_tier_accuracy;
    std::int64_t windows_used = 0;
};

/// Runs the full pipeline (sample -> score -> tournament -> ratings ->
/// circles) against a truth and scores the recovery. Friends the trace
/// never surfaced are appended to the ranking in id order before scoring,
/// so the metrics are always over the whole truth. Deterministic per seed.
RecoveryReport evaluate(const GroundTruth& truth, const TraceConfig& cfg,
                        const WindowSpec& spec, const InteractionWeights& weights,
                        const CircleLayout& layout, std::uint64_t seed);

/// Report as JSON text, metrics at 4 decimal places.
std::string report_json_text(const RecoveryReport& report);

} // namespace egorank
