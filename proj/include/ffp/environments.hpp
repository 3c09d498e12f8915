#pragma once

#include "ffp/game.hpp"
#include "ffp/posg.hpp"

#include <array>
#include <string>
#include <vector>

namespace ffp {

/// Two-UAV monitoring game; actions Secondary = 0, Above = 1. The player
/// above the target earns 1. With `printed_table` the row/column payoffs of
/// the mixed outcomes are swapped, which breaks the 0.8 mixed equilibrium.
NormalFormGame uav_game(bool printed_table = false);

/// Two states, two players, two actions. State 0 pays [[1,0],[0,0]] and moves
/// to state 1 under (1,1); state 1 pays [[0,0],[0,4]] and is absorbing.
/// Identical interest, gamma = 0.9.
Posg toy_posg();

struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Headings: 0 north (row - 1), 1 east, 2 south, 3 west.
struct Pose {
    Cell cell;
    int heading = 0;
};

namespace box_action {
inline constexpr int forward = 0;
inline constexpr int turn_left = 1;
inline constexpr int turn_right = 2;
inline constexpr int stay = 3;
}  // namespace box_action

namespace box_signal {
inline constexpr int empty = 0;
inline constexpr int wall = 1;
inline constexpr int agent = 2;
inline constexpr int small_box = 3;
inline constexpr int large_box = 4;
}  // namespace box_signal

struct BoxPushingConfig {
    int width = 4;
    int height = 3;
    int goal_row = 0;
    std::array<Cell, 2> small_boxes{Cell{1, 0}, Cell{1, 3}};
    Cell large_box{1, 1};  ///< left cell; the box also covers the cell to its east
    std::array<Pose, 2> agents{Pose{{2, 0}, 0}, Pose{{2, 3}, 0}};
    double small_box_reward = 10.0;
    double large_box_reward = 100.0;
    double bump_penalty = -5.0;
    double step_cost = -0.1;
    double gamma = 0.9;
    int horizon = 100;
};

/// Throws ArgumentError on an off-grid or overlapping layout.
void validate(const BoxPushingConfig& config);

struct BoxPushingWorld {
    Posg posg;
    int reachable_states = 0;
    /// Human-readable description per state index.
    std::vector<std::string> state_names;
};

/**
Cooperative box pushing on a grid. Both agents receive the team reward.
Whenever a box reaches the goal row the world moves to a delivery state
(one per set of boxes delivered in that step) which returns to the initial
layout on the next step. States are enumerated by search from the initial
layout; the initial layout is state 0.
*/
BoxPushingWorld box_pushing(const BoxPushingConfig& config = {});

}  // namespace ffp
