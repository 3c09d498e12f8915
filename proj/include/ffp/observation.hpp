#pragma once

#include "ffp/game.hpp"
#include "ffp/rng.hpp"

#include <span>
#include <vector>

namespace ffp {

/**
Perturbed action observations: each component of a joint action is seen
correctly with probability 1 - eps, otherwise replaced by one of the other
actions of that player chosen uniformly.
*/
struct ObservationChannel {
    double eps = 0.0;
    std::vector<int> action_counts;

    ObservationChannel(double eps, std::vector<int> action_counts);
};

/// Perturb a single player's action.
int perturb_action(const ObservationChannel& channel, int player, int action, SeededRng& rng);

/// Perturb every component of `true_joint` independently.
JointAction perturb(const ObservationChannel& channel, std::span<const int> true_joint, SeededRng& rng);

/// P(observed | true) for a player with `num_actions` actions.
double likelihood(double eps, int observed, int true_action, int num_actions);

}  // namespace ffp
