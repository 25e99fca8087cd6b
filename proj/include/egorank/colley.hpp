#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "egorank/errors.hpp"
#include "egorank/tournament.hpp"

namespace egorank {

/// The rating linear system C r = b for one ego's friends:
///   C(i,i) = 2 + t_i,  C(i,j) = -n_ij  (i != j),  b(i) = 1 + (w_i - l_i)/2.
/// C is symmetric and strictly diagonally dominant, hence positive definite,
/// so the system always has a unique solution.
struct ColleySystem {
    std::vector<std::string> friends;  // index basis, sorted
    Eigen::MatrixXd c;
    Eigen::VectorXd b;
};

/// Builds the system from a record. Throws EmptyFriendSet when the record
/// has no friends.
ColleySystem build_system(const TournamentRecord& record);

/// Ratings plus the ranked friend order they induce.
struct RatingResult {
    std::string ego;
    std::map<std::string, double> ratings;
    std::vector<std::string> ranking;  // best first
    double residual = 0.0;             // inf-norm of C*r - b
};

inline constexpr double kDefaultSolveTolerance = 1e-9;

/// Solves C r = b by Cholesky factorization and checks the residual against
/// tolerance (SolveFailure beyond it — a construction bug, not a data
/// condition). A system with no games short-circuits to the flat 1/2
/// rating. Ranking order: rating descending (compared at 1e-12 granularity
/// to absorb solver noise), then higher lifetime value total, then friend
/// id. value_totals may be empty, in which case the middle key is 0 for
/// everyone.
RatingResult solve(const ColleySystem& system, double tolerance = kDefaultSolveTolerance,
                   const std::map<std::string, double>& value_totals = {});

/// Closed-form baseline (1 + w_i) / (2 + t_i), wins including tie halves.
/// A win fraction with a Laplace prior; 1/2 for a friend with no games.
double laplace_rating(const TournamentRecord& record, const std::string& friend_id);

/// build_system + solve with the record's lifetime value totals as the
/// tie-break key. A single friend rates 1/2 without solving.
RatingResult rank_friends(const TournamentRecord& record,
                          double tolerance = kDefaultSolveTolerance);

/// Result document as JSON text: {ego, ratings: [{friend, rating}...]
/// descending, residual}; ratings fixed at 6 decimal places.
std::string rating_json_text(const RatingResult& result);

} // namespace egorank
