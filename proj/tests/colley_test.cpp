#include "egorank/colley.hpp"

#include <random>

#include <doctest.h>

#include "support/dense_oracle.hpp"
#include "support/random_records.hpp"

using namespace egorank;

namespace {

TournamentRecord two_friend_record(GameResult result, int times = 1) {
    TournamentRecord rec("ego");
    const std::vector<std::string> ids{"b", "c"};
    rec.register_friends(ids);
    std::vector<GameOutcome> games;
    for (int i = 0; i < times; ++i) games.push_back({"b", "c", i, result});
    rec.accumulate(games);
    return rec;
}

} // namespace

TEST_CASE("build_system: one decided game") {
    const auto sys = build_system(two_friend_record(GameResult::i_wins));
    CHECK(sys.c(0, 0) == 3.0);
    CHECK(sys.c(0, 1) == -1.0);
    CHECK(sys.c(1, 0) == -1.0);
    CHECK(sys.c(1, 1) == 3.0);
    CHECK(sys.b[0] == 1.5);
    CHECK(sys.b[1] == 0.5);
}

TEST_CASE("build_system: no games") {
    TournamentRecord rec("ego");
    const std::vector<std::string> ids{"b", "c"};
    rec.register_friends(ids);
    const auto sys = build_system(rec);
    CHECK(sys.c(0, 0) == 2.0);
    CHECK(sys.c(0, 1) == 0.0);
    CHECK(sys.b[0] == 1.0);
    CHECK(sys.b[1] == 1.0);
}

TEST_CASE("build_system: a tie leaves the right-hand side at the prior") {
    const auto sys = build_system(two_friend_record(GameResult::tie));
    CHECK(sys.c(0, 0) == 3.0);
    CHECK(sys.c(0, 1) == -1.0);
    CHECK(sys.b[0] == 1.0);
    CHECK(sys.b[1] == 1.0);
}

TEST_CASE("build_system rejects an empty record") {
    CHECK_THROWS_AS(build_system(TournamentRecord("ego")), EmptyFriendSet);
}

TEST_CASE("solve: every rating is exactly one half with no games") {
    for (std::size_t n : {1u, 2u, 7u, 40u}) {
        TournamentRecord rec("ego");
        rec.register_friends(testsupport::synthetic_friends(n));
        const auto result = rank_friends(rec);
        for (const auto& [f, r] : result.ratings) CHECK(r == 0.5);
        CHECK(result.residual == 0.0);
    }
}

TEST_CASE("solve: hand-solved 2x2 system") {
    // 3r1 - r2 = 1.5 and -r1 + 3r2 = 0.5 sum to r1 + r2 = 1, so
    // 4r1 = 2.5: r = (0.625, 0.375).
    const auto result = rank_friends(two_friend_record(GameResult::i_wins));
    CHECK(result.ratings.at("b") == doctest::Approx(0.625).epsilon(1e-9));
    CHECK(result.ratings.at("c") == doctest::Approx(0.375).epsilon(1e-9));
    CHECK(result.ranking == std::vector<std::string>{"b", "c"});
    CHECK(result.residual <= kDefaultSolveTolerance);
}

TEST_CASE("laplace_rating baseline") {
    TournamentRecord none("ego");
    const std::vector<std::string> ids{"b", "c"};
    none.register_friends(ids);
    CHECK(laplace_rating(none, "b") == 0.5);

    const auto one_win = two_friend_record(GameResult::i_wins);
    CHECK(laplace_rating(one_win, "b") == doctest::Approx(2.0 / 3.0));

    TournamentRecord rec("ego");
    rec.register_friends(ids);
    rec.accumulate(std::vector<GameOutcome>{{"b", "c", 0, GameResult::i_wins},
                                            {"b", "c", 1, GameResult::i_wins},
                                            {"b", "c", 2, GameResult::i_wins},
                                            {"b", "c", 3, GameResult::j_wins}});
    CHECK(laplace_rating(rec, "b") == doctest::Approx(4.0 / 6.0));
    CHECK_THROWS_AS(laplace_rating(rec, "nobody"), UnknownFriend);
}

TEST_CASE("rank_friends: single friend rates one half") {
    TournamentRecord rec("ego");
    const std::vector<std::string> solo{"only"};
    rec.register_friends(solo);
    const auto result = rank_friends(rec);
    CHECK(result.ranking == std::vector<std::string>{"only"});
    CHECK(result.ratings.at("only") == 0.5);
}

TEST_CASE("rank_friends: ties fall through to value totals, then ids") {
    // One tie between b and c: ratings are equal by symmetry.
    TournamentRecord rec("ego");
    rec.ingest_window({{"b", 2.0}, {"c", 2.0}}, 0);
    CHECK(rank_friends(rec).ranking == std::vector<std::string>{"b", "c"});

    // Give c a larger lifetime total with everything else symmetric.
    TournamentRecord biased("ego");
    biased.ingest_window({{"b", 2.0}, {"c", 2.0}}, 0);
    biased.add_value_totals({{"c", 1.0}});
    CHECK(rank_friends(biased).ranking == std::vector<std::string>{"c", "b"});
}

TEST_CASE("property: rating sum is n/2 and ratings stay inside (0, 1)") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 60; ++round) {
        const auto rec = testsupport::random_record(rng);
        const auto result = rank_friends(rec);
        double sum = 0.0;
        for (const auto& [f, r] : result.ratings) {
            sum += r;
            CHECK(r > 0.0);
            CHECK(r < 1.0);
        }
        CHECK(sum == doctest::Approx(static_cast<double>(rec.size()) / 2.0).epsilon(1e-9));
    }
}

TEST_CASE("property: solver agrees with the elimination oracle") {
    std::mt19937_64 rng(37);
    for (int round = 0; round < 60; ++round) {
        const auto rec = testsupport::random_record(rng);
        const auto sys = build_system(rec);
        const auto result = solve(sys);

        const auto n = static_cast<std::size_t>(sys.b.size());
        std::vector<std::vector<double>> a(n, std::vector<double>(n));
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            b[i] = sys.b[static_cast<Eigen::Index>(i)];
            for (std::size_t j = 0; j < n; ++j)
                a[i][j] = sys.c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        const auto reference = testsupport::solve_dense_gepp(a, b);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(result.ratings.at(sys.friends[i]) ==
                  doctest::Approx(reference[i]).epsilon(1e-8));
    }
}

TEST_CASE("property: relabeling friends permutes ratings identically") {
    // Permuting the index basis of the system must permute the solved
    // ratings the same way, keyed by friend id.
    std::mt19937_64 rng(41);
    for (int round = 0; round < 20; ++round) {
        const auto rec = testsupport::random_record(rng, 2, 12);
        const auto sys = build_system(rec);
        const auto base = solve(sys);

        const std::size_t count = sys.friends.size();
        std::vector<std::size_t> order(count);
        for (std::size_t i = 0; i < count; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);

        ColleySystem permuted;
        const auto n = static_cast<Eigen::Index>(count);
        permuted.c = Eigen::MatrixXd::Zero(n, n);
        permuted.b = Eigen::VectorXd::Zero(n);
        permuted.friends.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            permuted.friends[i] = sys.friends[order[i]];
            permuted.b[static_cast<Eigen::Index>(i)] =
                sys.b[static_cast<Eigen::Index>(order[i])];
            for (std::size_t j = 0; j < count; ++j)
                permuted.c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    sys.c(static_cast<Eigen::Index>(order[i]),
                          static_cast<Eigen::Index>(order[j]));
        }
        const auto shuffled = solve(permuted);
        for (const auto& f : sys.friends)
            CHECK(shuffled.ratings.at(f) ==
                  doctest::Approx(base.ratings.at(f)).epsilon(1e-9));
    }
}

TEST_CASE("property: turning a loss into a win raises the rating") {
    std::mt19937_64 rng(43);
    for (int round = 0; round < 20; ++round) {
        const auto friends = testsupport::synthetic_friends(3 + rng() % 6);
        const auto n = friends.size();

        std::vector<GameOutcome> base_games;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto roll = rng() % 2;
                base_games.push_back({friends[i], friends[j], 0,
                                      roll == 0 ? GameResult::i_wins : GameResult::j_wins});
            }

        // Flip one game that friends[0] lost (schedule n_ij unchanged).
        std::vector<GameOutcome> improved = base_games;
        bool flipped = false;
        for (auto& g : improved)
            if (!flipped && g.friend_i == friends[0] && g.result == GameResult::j_wins) {
                g.result = GameResult::i_wins;
                flipped = true;
            }
        if (!flipped) continue;

        TournamentRecord before("ego");
        before.register_friends(friends);
        before.accumulate(base_games);
        TournamentRecord after("ego");
        after.register_friends(friends);
        after.accumulate(improved);

        CHECK(rank_friends(after).ratings.at(friends[0]) >
              rank_friends(before).ratings.at(friends[0]));
    }
}

TEST_CASE("rating document lists friends best first at six decimals") {
    auto result = rank_friends(two_friend_record(GameResult::i_wins));
    result.ego = "ego";
    const auto text = rating_json_text(result);
    CHECK(text.find("\"ego\": \"ego\"") != std::string::npos);
    const auto b_pos = text.find("{\"friend\": \"b\", \"rating\": 0.625000}");
    const auto c_pos = text.find("{\"friend\": \"c\", \"rating\": 0.375000}");
    REQUIRE(b_pos != std::string::npos);
    REQUIRE(c_pos != std::string::npos);
    CHECK(b_pos < c_pos);
}
