#include "ffp/environments.hpp"
#include "ffp/game.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ffp;

namespace {

NormalFormGame matching_pennies() {
    Eigen::VectorXd r0(4), r1(4);
    r0 << 1, -1, -1, 1;
    r1 = -r0;
    return NormalFormGame({2, 2}, {r0, r1});
}

MixedStrategy mix(std::initializer_list<double> xs) {
    MixedStrategy s(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) s[k++] = x;
    return s;
}

constexpr int kSec = 0, kAbove = 1;

}  // namespace

TEST_CASE("construction validates tensor sizes") {
    CHECK_THROWS_AS(NormalFormGame({2, 2}, {Eigen::VectorXd::Zero(4)}), ShapeError);
    CHECK_THROWS_AS(NormalFormGame({2, 2}, {Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(3)}), ShapeError);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
    bad[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS(NormalFormGame({2, 2}, {bad, Eigen::VectorXd::Zero(4)}));
    NormalFormGame single({3}, {Eigen::VectorXd::Zero(3)});
    CHECK(single.num_players() == 1);
}

TEST_CASE("joint indices put the last player fastest") {
    NormalFormGame g({2, 3, 2}, std::vector<Eigen::VectorXd>(3, Eigen::VectorXd::Zero(12)));
    const JointAction a{1, 2, 0};
    CHECK(g.joint_index(a) == 1 * 6 + 2 * 2 + 0);
    CHECK(g.joint_action(g.joint_index(a)) == a);
    CHECK(g.action_of(11, 0) == 1);
    CHECK(g.action_of(11, 1) == 2);
    CHECK(g.action_of(11, 2) == 1);
}

TEST_CASE("expected reward of the mixed extension") {
    const auto g = uav_game();
    const JointAction above_sec{kAbove, kSec};
    CHECK(expected_reward(g, pure_profile(g, above_sec), 0) == doctest::Approx(1.0));
    CHECK(expected_reward(g, uniform_profile(g), 0) == doctest::Approx(-0.75));
    for (const auto& a : oracle::all_joints(g.action_counts()))
        for (int i = 0; i < 2; ++i) CHECK(expected_reward(g, pure_profile(g, a), i) == g.payoff(i, a));
    CHECK_THROWS_AS(expected_reward(g, {uniform_strategy(2)}, 0), ShapeError);
    CHECK_THROWS_AS(expected_reward(g, {uniform_strategy(3), uniform_strategy(2)}, 0), ShapeError);
}

TEST_CASE("best responses in the UAV game") {
    const auto g = uav_game();
    const BeliefProfile vs_sec{uniform_strategy(2), pure_strategy(2, kSec)};
    CHECK(best_response(g, 0, vs_sec) == std::vector<int>{kAbove});
    const BeliefProfile vs_mix{uniform_strategy(2), mix({0.8, 0.2})};
    CHECK(best_response(g, 0, vs_mix) == std::vector<int>{kSec, kAbove});

    Eigen::VectorXd dom(4);
    dom << 1, 1, 0, 0;
    NormalFormGame dominant({2, 2}, {dom, Eigen::VectorXd::Zero(4)});
    CHECK(best_response(dominant, 0, uniform_profile(dominant)) == std::vector<int>{0});
}

TEST_CASE("delta best responses") {
    const auto g = uav_game();
    const BeliefProfile vs_sec{uniform_strategy(2), pure_strategy(2, kSec)};
    CHECK(delta_best_response(g, 0, vs_sec, 0.0) == best_response(g, 0, vs_sec));
    CHECK(delta_best_response(g, 0, vs_sec, 1.0) == std::vector<int>{kSec, kAbove});
    CHECK(delta_best_response(g, 0, uniform_profile(g), 100.0).size() == 2);
    CHECK_THROWS_AS(delta_best_response(g, 0, vs_sec, -0.1), ArgumentError);
}

TEST_CASE("epsilon best responses") {
    const auto g = uav_game();
    const BeliefProfile vs_sec{uniform_strategy(2), pure_strategy(2, kSec)};
    const auto zero = epsilon_best_response(g, 0, vs_sec, 0.0);
    CHECK(zero[kAbove] == doctest::Approx(1.0));
    const auto e = epsilon_best_response(g, 0, vs_sec, 0.2);
    CHECK(e[kAbove] == doctest::Approx(0.8));
    CHECK(e[kSec] == doctest::Approx(0.2));

    Eigen::VectorXd r(3);
    r << 5, 1, 0;
    NormalFormGame three({3}, {r});
    const auto t = epsilon_best_response(three, 0, uniform_profile(three), 0.3);
    CHECK(t[0] == doctest::Approx(0.7));
    CHECK(t[1] == doctest::Approx(0.15));
    CHECK(t[2] == doctest::Approx(0.15));

    const BeliefProfile vs_mix{uniform_strategy(2), mix({0.8, 0.2})};
    CHECK_THROWS_AS(epsilon_best_response(g, 0, vs_mix, 0.1), ArgumentError);
    CHECK(epsilon_best_response(g, 0, vs_mix, 0.0)[0] == doctest::Approx(0.5));
}

TEST_CASE("pure Nash equilibria") {
    const auto ne = pure_nash(uav_game());
    REQUIRE(ne.size() == 2);
    CHECK(ne[0].actions == JointAction{kSec, kAbove});
    CHECK(ne[1].actions == JointAction{kAbove, kSec});
    CHECK(ne[0].strict);
    CHECK(ne[1].strict);
    CHECK(pure_nash(matching_pennies()).empty());

    Eigen::VectorXd r(4);
    r << 0, 1, 2, 7;
    const auto id = pure_nash(identical_interest_game({2, 2}, r));
    REQUIRE(id.size() == 1);
    CHECK(id[0].actions == JointAction{1, 1});
    CHECK(id[0].strict);

    NormalFormGame flat({2, 2}, {Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)});
    const auto weak = pure_nash(flat);
    CHECK(weak.size() == 4);
    CHECK(std::none_of(weak.begin(), weak.end(), [](const auto& e) { return e.strict; }));
}

TEST_CASE("Nash verification of profiles") {
    const auto g = uav_game();
    CHECK(is_nash(g, {mix({0.8, 0.2}), mix({0.8, 0.2})}, 1e-9));
    const JointAction both_above{kAbove, kAbove};
    CHECK_FALSE(is_nash(g, pure_profile(g, both_above), 1e-9));
    CHECK(max_deviation_gain(g, pure_profile(g, both_above)) == doctest::Approx(4.0));
    for (const auto& e : pure_nash(g)) CHECK(is_nash(g, pure_profile(g, e.actions), 0.0));
}

TEST_CASE("potential reconstruction") {
    const auto result = potential_reconstruct(uav_game());
    REQUIRE(std::holds_alternative<PotentialFunction>(result));
    const auto& p = std::get<PotentialFunction>(result).values;
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(1.0));
    CHECK(p[2] == doctest::Approx(1.0));
    CHECK(p[3] == doctest::Approx(-3.0));

    Eigen::VectorXd r(6);
    r << 3, -1, 4, 1, 5, 9;
    const auto id = potential_reconstruct(identical_interest_game({2, 3}, r));
    REQUIRE(std::holds_alternative<PotentialFunction>(id));
    const Eigen::VectorXd shifted = r.array() - r[0];
    CHECK(std::get<PotentialFunction>(id).values.isApprox(shifted, 1e-12));

    const auto mp = potential_reconstruct(matching_pennies());
    REQUIRE(std::holds_alternative<NotPotential>(mp));
    const auto& w = std::get<NotPotential>(mp);
    CHECK(w.cycle.size() == 4);
    CHECK(std::abs(w.cycle_sum) > 1e-9);
    CHECK(std::abs(w.reward_difference - w.potential_difference) > 1e-9);
}

TEST_CASE("minimum p-dominance") {
    const auto g = uav_game();
    const JointAction above_sec{kAbove, kSec};
    const auto report = min_p_dominance(g, above_sec);
    CHECK(report.min_p == doctest::Approx(0.8));
    CHECK_FALSE(report.binding_constraints.empty());
    CHECK(min_p_dominance(g, JointAction{kSec, kAbove}).min_p == doctest::Approx(0.8));
    CHECK_THROWS_AS(min_p_dominance(g, JointAction{kAbove, kAbove}), ArgumentError);

    // prisoners' dilemma: defection dominant
    Eigen::VectorXd r0(4), r1(4);
    r0 << 3, 0, 5, 1;
    r1 << 3, 5, 0, 1;
    CHECK(min_p_dominance(NormalFormGame({2, 2}, {r0, r1}), JointAction{1, 1}).min_p == doctest::Approx(0.0));
}

TEST_CASE("noise threshold") {
    CHECK(gwfp_noise_threshold(0.8, 2) == doctest::Approx(0.2));
    CHECK(gwfp_noise_threshold(1.0, 4) == doctest::Approx(0.0));
    CHECK(gwfp_noise_threshold(0.81, 3) == doctest::Approx(0.1));
    CHECK_THROWS_AS(gwfp_noise_threshold(0.5, 1), ArgumentError);
}

TEST_CASE("oracle agreement on random games") {
    std::mt19937_64 rng(20240);
    for (int k = 0; k < 200; ++k) {
        const auto g = k % 2 ? oracle::random_game(rng) : oracle::random_potential_game(rng);
        auto expected = oracle::pure_nash(g);
        const auto got = pure_nash(g);
        REQUIRE(got.size() == expected.size());
        std::sort(expected.begin(), expected.end());
        for (std::size_t e = 0; e < got.size(); ++e) {
            CHECK(got[e].actions == expected[e].actions);
            CHECK(got[e].strict == expected[e].strict);
        }
        CHECK(std::holds_alternative<PotentialFunction>(potential_reconstruct(g)) == oracle::is_potential_game(g));
        for (const auto& e : got) {
            const double p = min_p_dominance(g, e.actions).min_p;
            const double grid = oracle::min_p_grid(g, e.actions);
            CHECK(std::abs(p - grid) <= 2e-3);
        }
    }
}
