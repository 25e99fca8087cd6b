#include "egorank/circles.hpp"

#include <algorithm>
#include <unordered_set>

#include "egorank/text_format.hpp"

namespace egorank {

void CircleLayout::validate() const {
    if (cumulative_bounds.empty())
        throw ConfigError("circle layout needs at least one bound");
    if (cumulative_bounds.front() < 1)
        throw ConfigError("first circle bound must be >= 1");
    for (std::size_t k = 1; k < cumulative_bounds.size(); ++k)
        if (cumulative_bounds[k] <= cumulative_bounds[k - 1])
            throw ConfigError("circle bounds must be strictly increasing");
}

std::size_t circle_of(std::size_t rank, const CircleLayout& layout) {
    for (std::size_t k = 0; k < layout.cumulative_bounds.size(); ++k)
        if (rank <= layout.cumulative_bounds[k]) return k;
    return layout.circle_count();
}

CircleAssignment assign_circles(const std::string& ego,
                                std::span<const std::string> ranking,
                                const CircleLayout& layout) {
    layout.validate();

    std::unordered_set<std::string> seen;
    for (const auto& f : ranking)
        if (!seen.insert(f).second)
            throw DuplicateFriend("friend '" + f + "' appears twice in the ranking");

    CircleAssignment out;
    out.ego = ego;
    out.circles.assign(layout.circle_count(), {});
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
        const std::size_t k = circle_of(pos + 1, layout);
        if (is_overflow(k, layout))
            out.overflow.push_back(ranking[pos]);
        else
            out.circles[k].push_back(ranking[pos]);
    }
    return out;
}

namespace {

std::string friend_array(const std::vector<std::string>& ids) {
    std::string out = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += "\"" + json_escape(ids[i]) + "\"";
        if (i + 1 < ids.size()) out += ", ";
    }
    out += "]";
    return out;
}

} // namespace

std::string circles_json_text(const CircleAssignment& assignment) {
    std::string out;
    out += "{\n";
    out += "  \"ego\": \"" + json_escape(assignment.ego) + "\",\n";
    out += "  \"circles\": [\n";
    for (std::size_t k = 0; k < assignment.circles.size(); ++k) {
        out += "    " + friend_array(assignment.circles[k]);
        out += (k + 1 < assignment.circles.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"overflow\": " + friend_array(assignment.overflow) + "\n";
    out += "}\n";
    return out;
}

} // namespace egorank
