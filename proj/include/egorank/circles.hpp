#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "egorank/errors.hpp"

namespace egorank {

/// Cumulative circle bounds: circle k holds ranks (bounds[k-1], bounds[k]]
/// of the friend ranking (circle 0 holds ranks 1..bounds[0]). The default
/// 5/15/45/135 grows by a factor of three from an innermost circle of five.
struct CircleLayout {
    std::vector<std::size_t> cumulative_bounds{5, 15, 45, 135};

    std::size_t circle_count() const noexcept { return cumulative_bounds.size(); }
    /// ConfigError unless bounds are strictly increasing with first >= 1.
    void validate() const;
};

/// Circle index of a 1-based rank: the smallest k with rank <= bounds[k].
/// Ranks beyond the last bound return circle_count() (the overflow bucket).
std::size_t circle_of(std::size_t rank, const CircleLayout& layout);

inline bool is_overflow(std::size_t circle_index, const CircleLayout& layout) {
    return circle_index >= layout.circle_count();
}

/// A ranked friend list partitioned into circles. circles has fixed arity
/// (one list per bound, empty lists retained); concatenating circles then
/// overflow reproduces the input ranking.
struct CircleAssignment {
    std::string ego;
    std::vector<std::vector<std::string>> circles;
    std::vector<std::string> overflow;
};

/// Partitions a ranking (best first, no duplicates) by the layout.
/// Throws DuplicateFriend when the ranking repeats an id.
CircleAssignment assign_circles(const std::string& ego,
                                std::span<const std::string> ranking,
                                const CircleLayout& layout);

/// Assignment document as JSON text: {ego, circles: [[friend...]...],
/// overflow: [...]}.
std::string circles_json_text(const CircleAssignment& assignment);

} // namespace egorank
