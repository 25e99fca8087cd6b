#include "egorank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_map>

#include "egorank/colley.hpp"
#include "egorank/digest.hpp"
#include "egorank/text_format.hpp"
#include "egorank/tournament.hpp"

namespace egorank {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, span) without std::uniform_int_distribution, whose
/// draw sequence is implementation-defined.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t span) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng()) * span) >> 64);
}

/// Knuth's product method; exact and portable for the small means used here.
std::uint64_t poisson_draw(std::mt19937_64& rng, double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double product = uniform01(rng);
    while (product > limit) {
        ++k;
        product *= uniform01(rng);
    }
    return k;
}

/// Geometric on {1, 2, ...} with the given mean (inversion sampling).
std::uint64_t geometric_size(std::mt19937_64& rng, std::uint64_t mean) {
    if (mean <= 1) return 1;
    const double p = 1.0 / static_cast<double>(mean);
    const double u = uniform01(rng);
    return 1 + static_cast<std::uint64_t>(std::log1p(-u) / std::log1p(-p));
}

} // namespace

std::vector<std::string> GroundTruth::all_friends() const {
    std::vector<std::string> out;
    for (const auto& tier : tiers)
        out.insert(out.end(), tier.begin(), tier.end());
    return out;
}

std::size_t GroundTruth::tier_of(const std::string& friend_id) const {
    for (std::size_t t = 0; t < tiers.size(); ++t)
        if (std::find(tiers[t].begin(), tiers[t].end(), friend_id) != tiers[t].end())
            return t;
    throw FriendSetMismatch("'" + friend_id + "' is not in the ground truth");
}

GroundTruth generate_truth(std::span<const std::size_t> tier_sizes,
                           std::span<const double> tier_strengths,
                           std::uint64_t seed) {
    if (tier_sizes.empty() || tier_sizes.size() != tier_strengths.size())
        throw BadTierSpec("tier sizes and strengths must be non-empty and equal-length");
    for (std::size_t t = 0; t < tier_sizes.size(); ++t) {
        if (tier_sizes[t] == 0)
            throw BadTierSpec("tier " + std::to_string(t) + " is empty");
        if (!(tier_strengths[t] > 0.0) || !std::isfinite(tier_strengths[t]))
            throw BadTierSpec("tier strengths must be positive and finite");
        if (t > 0 && !(tier_strengths[t] < tier_strengths[t - 1]))
            throw BadTierSpec("tier strengths must be strictly decreasing");
    }

    GroundTruth truth;
    truth.seed = seed;
    truth.strengths.assign(tier_strengths.begin(), tier_strengths.end());
    std::size_t next_id = 0;
    for (std::size_t size : tier_sizes) {
        std::vector<std::string> tier;
        tier.reserve(size);
        for (std::size_t i = 0; i < size; ++i) {
            char buf[24];
            std::snprintf(buf, sizeof(buf), "f%03zu", next_id++);
            tier.emplace_back(buf);
        }
        truth.tiers.push_back(std::move(tier));
    }
    return truth;
}

void TraceConfig::validate() const {
    if (duration_windows < 0)
        throw ConfigError("duration_windows must be >= 0");
    if (mean_message_size < 1)
        throw ConfigError("mean_message_size must be >= 1");
    bool any_positive = false;
    for (const auto& [type, rate] : base_rates) {
        if (rate < 0.0 || !std::isfinite(rate))
            throw ConfigError("base rates must be finite and non-negative");
        any_positive = any_positive || rate > 0.0;
    }
    if (!any_positive)
        throw ConfigError("at least one base rate must be positive");
}

EventStream sample_trace(const GroundTruth& truth, const TraceConfig& cfg,
                         const WindowSpec& spec, std::uint64_t seed) {
    // Deliberately tolerates all-zero rates (a zero process yields an empty
    // stream); full rate validation belongs to evaluate and the scenario
    // loader.
    if (cfg.duration_windows < 0)
        throw ConfigError("duration_windows must be >= 0");
    if (cfg.mean_message_size < 1)
        throw ConfigError("mean_message_size must be >= 1");
    for (const auto& [type, rate] : cfg.base_rates)
        if (rate < 0.0 || !std::isfinite(rate))
            throw ConfigError("base rates must be finite and non-negative");
    spec.validate();

    std::mt19937_64 rng(seed);
    std::vector<InteractionEvent> events;

    // Draw order is fixed (tier, friend, window, type) so a seed pins the
    // whole byte stream.
    for (std::size_t t = 0; t < truth.tiers.size(); ++t) {
        const double strength = truth.strengths[t];
        for (const auto& friend_id : truth.tiers[t]) {
            for (std::int64_t w = 0; w < cfg.duration_windows; ++w) {
                const std::int64_t window_start = spec.epoch_start + w * spec.window_length;
                for (InteractionType type : kAllInteractionTypes) {
                    auto it = cfg.base_rates.find(type);
                    const double rate = it == cfg.base_rates.end() ? 0.0 : it->second;
                    const std::uint64_t n = poisson_draw(rng, rate * strength);
                    for (std::uint64_t k = 0; k < n; ++k) {
                        const std::int64_t ts =
                            window_start +
                            static_cast<std::int64_t>(uniform_below(
                                rng, static_cast<std::uint64_t>(spec.window_length)));
                        const std::uint64_t size =
                            type == InteractionType::message
                                ? geometric_size(rng, cfg.mean_message_size)
                                : 0;
                        events.push_back(make_event(truth.ego, friend_id, ts, type, size));
                    }
                }
            }
        }
    }

    EventStream stream = make_stream(std::move(events), "");
    stream.source_digest = digest_hex(serialize_stream_csv(stream));
    return stream;
}

double kendall_tau(std::span<const std::string> ranking, const GroundTruth& truth) {
    const auto friends = truth.all_friends();
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (!position.emplace(ranking[i], i).second)
            throw FriendSetMismatch("ranking repeats '" + ranking[i] + "'");
    if (position.size() != friends.size())
        throw FriendSetMismatch("ranking and truth friend sets differ in size");
    for (const auto& f : friends)
        if (!position.count(f))
            throw FriendSetMismatch("ranking is missing '" + f + "'");

    std::vector<std::size_t> tier_of(friends.size());
    std::vector<std::size_t> pos_of(friends.size());
    for (std::size_t i = 0, idx = 0; i < truth.tiers.size(); ++i)
        for (const auto& f : truth.tiers[i]) {
            tier_of[idx] = i;
            pos_of[idx] = position.at(f);
            ++idx;
        }

    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    for (std::size_t a = 0; a < friends.size(); ++a) {
        for (std::size_t b = a + 1; b < friends.size(); ++b) {
            if (tier_of[a] == tier_of[b]) continue;  // incomparable in truth
            const bool truth_a_first = tier_of[a] < tier_of[b];
            const bool ranked_a_first = pos_of[a] < pos_of[b];
            if (truth_a_first == ranked_a_first)
                ++concordant;
            else
                ++discordant;
        }
    }
    const std::int64_t total = concordant + discordant;
    if (total == 0) return 0.0;
    return static_cast<double>(concordant - discordant) / static_cast<double>(total);
}

RecoveryReport evaluate(const GroundTruth& truth, const TraceConfig& cfg,
                        const WindowSpec& spec, const InteractionWeights& weights,
                        const CircleLayout& layout, std::uint64_t seed) {
    cfg.validate();
    layout.validate();

    const EventStream stream = sample_trace(truth, cfg, spec, seed);
    const auto scores = score_ego(stream, truth.ego, spec, weights);

    TournamentRecord record(truth.ego);
    fold_scores(record, scores);

    std::vector<std::string> ranking;
    if (record.size() > 0)
        ranking = rank_friends(record).ranking;

    // Friends the trace never produced an event for rank last, in id order.
    std::unordered_map<std::string, bool> ranked;
    for (const auto& f : ranking) ranked[f] = true;
    auto friends = truth.all_friends();
    std::sort(friends.begin(), friends.end());
    for (const auto& f : friends)
        if (!ranked.count(f)) ranking.push_back(f);

    RecoveryReport report;
    report.kendall_tau = kendall_tau(ranking, truth);
    report.windows_used = record.windows_processed();

    const std::size_t overflow_index = layout.circle_count();
    std::vector<std::size_t> hits(truth.tiers.size(), 0);
    std::size_t total_hits = 0;
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
        const std::size_t assigned = circle_of(pos + 1, layout);
        const std::size_t tier = truth.tier_of(ranking[pos]);
        const std::size_t want = std::min(tier, overflow_index);
        if (assigned == want) {
            ++hits[tier];
            ++total_hits;
        }
    }
    report.circle_accuracy =
        static_cast<double>(total_hits) / static_cast<double>(ranking.size());
    for (std::size_t t = 0; t < truth.tiers.size(); ++t)
        report.per_tier_accuracy.push_back(static_cast<double>(hits[t]) /
                                           static_cast<double>(truth.tiers[t].size()));
    return report;
}

std::string report_json_text(const RecoveryReport& report) {
    std::string out;
    out += "{\n";
    out += "  \"kendall_tau\": " + fixed(report.kendall_tau, 4) + ",\n";
    out += "  \"circle_accuracy\": " + fixed(report.circle_accuracy, 4) + ",\n";
    out += "  \"per_tier_accuracy\": [";
    for (std::size_t t = 0; t < report.per_tier_accuracy.size(); ++t) {
        out += fixed(report.per_tier_accuracy[t], 4);
        if (t + 1 < report.per_tier_accuracy.size()) out += ", ";
    }
    out += "],\n";
    out += "  \"windows_used\": " + std::to_string(report.windows_used) + "\n";
    out += "}\n";
    return out;
}

} // namespace egorank
