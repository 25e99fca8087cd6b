#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "egorank/errors.hpp"
#include "egorank/scoring.hpp"

namespace egorank {

enum class GameResult { i_wins, j_wins, tie };

/// One pairwise comparison in one window; friend_i < friend_j
/// lexicographically.
struct GameOutcome {
    std::string friend_i;
    std::string friend_j;
    std::int64_t window = 0;
    GameResult result = GameResult::tie;

    bool operator==(const GameOutcome&) const = default;
};

/// Derives the games of one window from its interaction values. Every
/// unordered pair with at least one nonzero value plays: the larger value
/// wins, equal nonzero values tie, and pairs where both values are zero
/// play no game. Treats the map's key set as the friend universe, so
/// callers must include known-but-idle friends with value 0. Output is
/// ordered by canonical pair.
std::vector<GameOutcome> window_games(const std::map<std::string, double>& values,
                                      std::int64_t window);

/// Running win/loss statistics of one ego's friend tournament. Friends are
/// kept sorted; pair game counts, wins and losses live in dense Eigen
/// storage indexed by friend position. Wins and losses are reals because a
/// tie credits each side half a win and half a loss.
///
/// Also carries two companions the rating layer and the CLI need: the
/// lifetime summed interaction value per friend (rating tie-break) and the
/// last window folded in (append-only ingest checks).
class TournamentRecord {
public:
    TournamentRecord() = default;
    explicit TournamentRecord(std::string ego) : ego_(std::move(ego)) {}

    const std::string& ego() const noexcept { return ego_; }
    const std::vector<std::string>& friends() const noexcept { return friends_; }
    std::size_t size() const noexcept { return friends_.size(); }
    bool has_friend(const std::string& id) const { return index_.count(id) != 0; }
    /// Position of a friend in friends(); throws UnknownFriend.
    Eigen::Index index_of(const std::string& id) const;

    double pair_games(const std::string& i, const std::string& j) const;
    double wins(const std::string& id) const { return wins_[index_of(id)]; }
    double losses(const std::string& id) const { return losses_[index_of(id)]; }
    /// t_i: total games friend id has played.
    double games(const std::string& id) const;
    double value_total(const std::string& id) const { return value_totals_[index_of(id)]; }

    const Eigen::MatrixXd& pair_game_matrix() const noexcept { return pair_games_; }
    const Eigen::VectorXd& win_vector() const noexcept { return wins_; }
    const Eigen::VectorXd& loss_vector() const noexcept { return losses_; }
    const Eigen::VectorXd& value_total_vector() const noexcept { return value_totals_; }

    std::int64_t windows_processed() const noexcept { return windows_processed_; }
    /// Largest window folded in so far; -1 before any fold.
    std::int64_t last_window() const noexcept { return last_window_; }

    /// Adds unseen friends with zero statistics; re-adding is a no-op.
    void register_friends(std::span<const std::string> ids);

    /// Applies a batch of game outcomes. Both friends of every game must be
    /// registered. windows_processed grows by the number of distinct windows
    /// present in the batch.
    void accumulate(std::span<const GameOutcome> games);

    /// Adds window interaction values into the lifetime totals.
    void add_value_totals(const std::map<std::string, double>& values);

    /// Folds one window: registers friends first seen here, plays the
    /// window's games over the full friend universe (absent friends at 0),
    /// and accumulates value totals. Equivalent to register_friends +
    /// window_games + accumulate + add_value_totals, but index-based so
    /// dense windows over hundreds of friends stay cheap.
    void ingest_window(const std::map<std::string, double>& values, std::int64_t window);

    /// Checks the bookkeeping identities (w_i + l_i = t_i, sum w = sum l,
    /// symmetric pair counts with zero diagonal); throws std::logic_error
    /// on violation. Test hook.
    void check_invariants() const;

    /// Rebuilds a record from serialized parts, revalidating the identities.
    static TournamentRecord from_parts(std::string ego, std::vector<std::string> friends,
                                       Eigen::MatrixXd pair_games, Eigen::VectorXd wins,
                                       Eigen::VectorXd losses, Eigen::VectorXd value_totals,
                                       std::int64_t windows_processed,
                                       std::int64_t last_window);

private:
    void insert_friends(const std::vector<std::string>& new_ids);

    std::string ego_;
    std::vector<std::string> friends_;                     // sorted
    std::unordered_map<std::string, Eigen::Index> index_;  // friend -> row
    Eigen::MatrixXd pair_games_{0, 0};                     // symmetric, zero diagonal
    Eigen::VectorXd wins_{0};
    Eigen::VectorXd losses_{0};
    Eigen::VectorXd value_totals_{0};
    std::int64_t windows_processed_ = 0;
    std::int64_t last_window_ = -1;
};

/// Folds a scoring pass (ordered by window, then friend) into a record,
/// one ingest_window per distinct window.
void fold_scores(TournamentRecord& record, std::span<const InteractionValue> scores);

/// Snapshot document: {ego, friends[], pairs: [[i, j, n_ij]...], wins{},
/// losses{}, windows_processed} with friends sorted and pairs in canonical
/// order, serialized as JSON text.
std::string snapshot_json(const TournamentRecord& record);

} // namespace egorank
