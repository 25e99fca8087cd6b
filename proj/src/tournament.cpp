#include "egorank/tournament.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace egorank {

std::vector<GameOutcome> window_games(const std::map<std::string, double>& values,
                                      std::int64_t window) {
    std::vector<GameOutcome> games;
    for (auto it_i = values.begin(); it_i != values.end(); ++it_i) {
        for (auto it_j = std::next(it_i); it_j != values.end(); ++it_j) {
            const double vi = it_i->second;
            const double vj = it_j->second;
            if (std::max(vi, vj) <= 0.0) continue;
            GameResult result = GameResult::tie;
            if (vi > vj)
                result = GameResult::i_wins;
            else if (vj > vi)
                result = GameResult::j_wins;
            games.push_back(GameOutcome{it_i->first, it_j->first, window, result});
        }
    }
    return games;
}

Eigen::Index TournamentRecord::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw UnknownFriend("unknown friend '" + id + "' for ego '" + ego_ + "'");
    return it->second;
}

double TournamentRecord::pair_games(const std::string& i, const std::string& j) const {
    return pair_games_(index_of(i), index_of(j));
}

double TournamentRecord::games(const std::string& id) const {
    return pair_games_.row(index_of(id)).sum();
}

void TournamentRecord::insert_friends(const std::vector<std::string>& new_ids) {
    if (new_ids.empty()) return;

    std::vector<std::string> merged;
    merged.reserve(friends_.size() + new_ids.size());
    std::merge(friends_.begin(), friends_.end(), new_ids.begin(), new_ids.end(),
               std::back_inserter(merged));

    const auto n = static_cast<Eigen::Index>(merged.size());
    Eigen::MatrixXd pair_games = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd wins = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd losses = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd value_totals = Eigen::VectorXd::Zero(n);

    std::vector<Eigen::Index> remap(friends_.size());
    for (std::size_t i = 0; i < friends_.size(); ++i) {
        auto pos = std::lower_bound(merged.begin(), merged.end(), friends_[i]);
        remap[i] = static_cast<Eigen::Index>(pos - merged.begin());
    }
    for (std::size_t i = 0; i < friends_.size(); ++i) {
        wins[remap[i]] = wins_[static_cast<Eigen::Index>(i)];
        losses[remap[i]] = losses_[static_cast<Eigen::Index>(i)];
        value_totals[remap[i]] = value_totals_[static_cast<Eigen::Index>(i)];
        for (std::size_t j = 0; j < friends_.size(); ++j)
            pair_games(remap[i], remap[j]) =
                pair_games_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    friends_ = std::move(merged);
    pair_games_ = std::move(pair_games);
    wins_ = std::move(wins);
    losses_ = std::move(losses);
    value_totals_ = std::move(value_totals);
    index_.clear();
    for (std::size_t i = 0; i < friends_.size(); ++i)
        index_[friends_[i]] = static_cast<Eigen::Index>(i);
}

void TournamentRecord::register_friends(std::span<const std::string> ids) {
    std::vector<std::string> fresh;
    for (const auto& id : ids)
        if (!index_.count(id)) fresh.push_back(id);
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    insert_friends(fresh);
}

void TournamentRecord::accumulate(std::span<const GameOutcome> games) {
    std::set<std::int64_t> batch_windows;
    for (const auto& g : games) {
        if (g.friend_i >= g.friend_j)
            throw std::invalid_argument("game pair not in canonical order: '" + g.friend_i +
                                        "' vs '" + g.friend_j + "'");
        const Eigen::Index i = index_of(g.friend_i);
        const Eigen::Index j = index_of(g.friend_j);
        pair_games_(i, j) += 1.0;
        pair_games_(j, i) += 1.0;
        switch (g.result) {
            case GameResult::i_wins:
                wins_[i] += 1.0;
                losses_[j] += 1.0;
                break;
            case GameResult::j_wins:
                wins_[j] += 1.0;
                losses_[i] += 1.0;
                break;
            case GameResult::tie:
                wins_[i] += 0.5;
                losses_[i] += 0.5;
                wins_[j] += 0.5;
                losses_[j] += 0.5;
                break;
        }
        batch_windows.insert(g.window);
        last_window_ = std::max(last_window_, g.window);
    }
    windows_processed_ += static_cast<std::int64_t>(batch_windows.size());
}

void TournamentRecord::add_value_totals(const std::map<std::string, double>& values) {
    for (const auto& [id, v] : values)
        value_totals_[index_of(id)] += v;
}

void TournamentRecord::ingest_window(const std::map<std::string, double>& values,
                                     std::int64_t window) {
    if (window <= last_window_)
        throw std::logic_error("windows must be folded in ascending order");

    std::vector<std::string> fresh;
    for (const auto& [id, v] : values)
        if (!index_.count(id)) fresh.push_back(id);
    insert_friends(fresh);  // map keys are already sorted and unique

    last_window_ = window;
    const auto n = static_cast<Eigen::Index>(friends_.size());
    if (n == 0) return;

    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (const auto& [id, val] : values) v[index_.at(id)] = val;

    bool any_game = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double vi = v[i];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double vj = v[j];
            if (std::max(vi, vj) <= 0.0) continue;
            any_game = true;
            pair_games_(i, j) += 1.0;
            pair_games_(j, i) += 1.0;
            if (vi > vj) {
                wins_[i] += 1.0;
                losses_[j] += 1.0;
            } else if (vj > vi) {
                wins_[j] += 1.0;
                losses_[i] += 1.0;
            } else {
                wins_[i] += 0.5;
                losses_[i] += 0.5;
                wins_[j] += 0.5;
                losses_[j] += 0.5;
            }
        }
    }
    if (any_game) ++windows_processed_;
    value_totals_ += v;
}

void TournamentRecord::check_invariants() const {
    const auto n = static_cast<Eigen::Index>(friends_.size());
    if (pair_games_.rows() != n || pair_games_.cols() != n || wins_.size() != n ||
        losses_.size() != n || value_totals_.size() != n)
        throw std::logic_error("tournament storage sizes disagree");
    if (!std::is_sorted(friends_.begin(), friends_.end()) ||
        std::adjacent_find(friends_.begin(), friends_.end()) != friends_.end())
        throw std::logic_error("friend set not sorted-unique");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (pair_games_(i, i) != 0.0)
            throw std::logic_error("nonzero pair_games diagonal");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (pair_games_(i, j) != pair_games_(j, i))
                throw std::logic_error("pair_games not symmetric");
            if (pair_games_(i, j) < 0.0)
                throw std::logic_error("negative pair count");
        }
        const double t_i = pair_games_.row(i).sum();
        if (wins_[i] + losses_[i] != t_i)
            throw std::logic_error("w_i + l_i != t_i for friend " + friends_[i]);
    }
    if (n > 0 && wins_.sum() != losses_.sum())
        throw std::logic_error("total wins != total losses");
}

TournamentRecord TournamentRecord::from_parts(std::string ego, std::vector<std::string> friends,
                                              Eigen::MatrixXd pair_games, Eigen::VectorXd wins,
                                              Eigen::VectorXd losses, Eigen::VectorXd value_totals,
                                              std::int64_t windows_processed,
                                              std::int64_t last_window) {
    TournamentRecord rec(std::move(ego));
    rec.friends_ = std::move(friends);
    rec.pair_games_ = std::move(pair_games);
    rec.wins_ = std::move(wins);
    rec.losses_ = std::move(losses);
    rec.value_totals_ = std::move(value_totals);
    rec.windows_processed_ = windows_processed;
    rec.last_window_ = last_window;
    for (std::size_t i = 0; i < rec.friends_.size(); ++i)
        rec.index_[rec.friends_[i]] = static_cast<Eigen::Index>(i);
    rec.check_invariants();
    return rec;
}

void fold_scores(TournamentRecord& record, std::span<const InteractionValue> scores) {
    std::map<std::string, double> window_values;
    std::size_t i = 0;
    while (i < scores.size()) {
        const std::int64_t window = scores[i].window;
        window_values.clear();
        while (i < scores.size() && scores[i].window == window) {
            window_values[scores[i].friend_id] = scores[i].value;
            ++i;
        }
        record.ingest_window(window_values, window);
    }
}

std::string snapshot_json(const TournamentRecord& record) {
    nlohmann::json doc;
    doc["ego"] = record.ego();
    doc["friends"] = record.friends();

    auto pairs = nlohmann::json::array();
    const auto& friends = record.friends();
    const auto& m = record.pair_game_matrix();
    for (std::size_t i = 0; i < friends.size(); ++i) {
        for (std::size_t j = i + 1; j < friends.size(); ++j) {
            const double n_ij =
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (n_ij > 0.0)
                pairs.push_back({friends[i], friends[j], static_cast<std::int64_t>(n_ij)});
        }
    }
    doc["pairs"] = std::move(pairs);

    nlohmann::json wins = nlohmann::json::object();
    nlohmann::json losses = nlohmann::json::object();
    for (const auto& f : friends) {
        wins[f] = record.wins(f);
        losses[f] = record.losses(f);
    }
    doc["wins"] = std::move(wins);
    doc["losses"] = std::move(losses);
    doc["windows_processed"] = record.windows_processed();
    return doc.dump(2) + "\n";
}

} // namespace egorank
