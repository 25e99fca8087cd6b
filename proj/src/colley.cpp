#include "egorank/colley.hpp"

#include <algorithm>
#include <cmath>

#include "egorank/text_format.hpp"

namespace egorank {

namespace {

/// Ratings are compared at 1e-12 granularity so that exactly symmetric
/// records (equal up to solver rounding) fall through to the tie-break
/// keys deterministically. Rating gaps produced by whole games are orders
/// of magnitude larger.
long long rating_key(double rating) {
    return std::llround(rating * 1e12);
}

std::vector<std::string> ranked_order(const std::vector<std::string>& friends,
                                      const Eigen::VectorXd& ratings,
                                      const std::map<std::string, double>& value_totals) {
    std::vector<std::size_t> order(friends.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    auto total_of = [&](std::size_t i) {
        auto it = value_totals.find(friends[i]);
        return it == value_totals.end() ? 0.0 : it->second;
    };

    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const long long ra = rating_key(ratings[static_cast<Eigen::Index>(a)]);
        const long long rb = rating_key(ratings[static_cast<Eigen::Index>(b)]);
        if (ra != rb) return ra > rb;
        const double ta = total_of(a);
        const double tb = total_of(b);
        if (ta != tb) return ta > tb;
        return friends[a] < friends[b];
    });

    std::vector<std::string> ranking;
    ranking.reserve(order.size());
    for (std::size_t i : order) ranking.push_back(friends[i]);
    return ranking;
}

RatingResult assemble(const std::vector<std::string>& friends, const Eigen::VectorXd& r,
                      double residual, const std::map<std::string, double>& value_totals) {
    RatingResult result;
    for (std::size_t i = 0; i < friends.size(); ++i)
        result.ratings[friends[i]] = r[static_cast<Eigen::Index>(i)];
    result.ranking = ranked_order(friends, r, value_totals);
    result.residual = residual;
    return result;
}

} // namespace

ColleySystem build_system(const TournamentRecord& record) {
    const auto n = static_cast<Eigen::Index>(record.size());
    if (n == 0)
        throw EmptyFriendSet("no friends to rate for ego '" + record.ego() + "'");

    ColleySystem sys;
    sys.friends = record.friends();
    sys.c = -record.pair_game_matrix();
    const Eigen::VectorXd totals = record.pair_game_matrix().rowwise().sum();
    sys.c.diagonal() = (totals.array() + 2.0).matrix();
    sys.b = Eigen::VectorXd::Ones(n) + (record.win_vector() - record.loss_vector()) / 2.0;
    return sys;
}

RatingResult solve(const ColleySystem& system, double tolerance,
                   const std::map<std::string, double>& value_totals) {
    if (system.friends.empty())
        throw EmptyFriendSet("cannot solve an empty system");
    if (tolerance <= 0.0)
        throw ConfigError("solver tolerance must be positive");

    const auto n = static_cast<Eigen::Index>(system.friends.size());

    // No games anywhere: C = 2I, b = 1, so every rating is exactly 1/2.
    if ((system.c.diagonal().array() == 2.0).all()) {
        const Eigen::VectorXd r = Eigen::VectorXd::Constant(n, 0.5);
        const double residual = (system.c * r - system.b).cwiseAbs().maxCoeff();
        if (!(residual <= tolerance))
            throw SolveFailure("residual " + std::to_string(residual) + " exceeds tolerance");
        return assemble(system.friends, r, residual, value_totals);
    }

    Eigen::LLT<Eigen::MatrixXd> llt(system.c);
    if (llt.info() != Eigen::Success)
        throw SolveFailure("Cholesky factorization failed; system is not positive definite");

    const Eigen::VectorXd r = llt.solve(system.b);
    const double residual = (system.c * r - system.b).cwiseAbs().maxCoeff();
    if (!(residual <= tolerance))
        throw SolveFailure("residual " + std::to_string(residual) + " exceeds tolerance");

    return assemble(system.friends, r, residual, value_totals);
}

double laplace_rating(const TournamentRecord& record, const std::string& friend_id) {
    const double w = record.wins(friend_id);
    const double t = record.games(friend_id);
    return (1.0 + w) / (2.0 + t);
}

RatingResult rank_friends(const TournamentRecord& record, double tolerance) {
    std::map<std::string, double> totals;
    for (const auto& f : record.friends()) totals[f] = record.value_total(f);

    RatingResult result = solve(build_system(record), tolerance, totals);
    result.ego = record.ego();
    return result;
}

std::string rating_json_text(const RatingResult& result) {
    std::string out;
    out += "{\n";
    out += "  \"ego\": \"" + json_escape(result.ego) + "\",\n";
    out += "  \"ratings\": [\n";
    for (std::size_t i = 0; i < result.ranking.size(); ++i) {
        const std::string& f = result.ranking[i];
        out += "    {\"friend\": \"" + json_escape(f) +
               "\", \"rating\": " + fixed(result.ratings.at(f), 6) + "}";
        out += (i + 1 < result.ranking.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"residual\": " + scientific(result.residual) + "\n";
    out += "}\n";
    return out;
}

} // namespace egorank
