#pragma once

#include "ffp/game.hpp"
#include "ffp/learning.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ffp {

/**
Partially observable stochastic game with deterministic, action-driven
transitions. Every state carries a stage game; all stage games share the
player count. States may also emit a local signal per player.
*/
class Posg {
public:
    /// `transitions[s][joint]` is the successor of state s under a joint
    /// action index of stage game s. `signals`, when given, is indexed
    /// [state][player] with values in [0, num_signals).
    Posg(std::vector<NormalFormGame> stage_games, std::vector<std::vector<int>> transitions, double gamma,
         int initial_state, std::vector<std::vector<int>> signals = {}, int num_signals = 0);

    int num_states() const { return static_cast<int>(stages_.size()); }
    int num_players() const { return stages_.front().num_players(); }
    const NormalFormGame& stage(int state) const { return stages_.at(static_cast<std::size_t>(state)); }
    const std::vector<NormalFormGame>& stages() const { return stages_; }
    double gamma() const { return gamma_; }
    int initial_state() const { return initial_; }

    int next_state(int state, Eigen::Index joint) const {
        return transitions_[static_cast<std::size_t>(state)][static_cast<std::size_t>(joint)];
    }
    const std::vector<std::vector<int>>& transitions() const { return transitions_; }

    bool has_signals() const { return !signals_.empty(); }
    int num_signals() const { return num_signals_; }
    int signal(int state, int player) const {
        return signals_[static_cast<std::size_t>(state)][static_cast<std::size_t>(player)];
    }
    const std::vector<std::vector<int>>& signals() const { return signals_; }

    /// True when every stage game has the same action counts.
    bool uniform_actions() const;

private:
    std::vector<NormalFormGame> stages_;
    std::vector<std::vector<int>> transitions_;
    double gamma_ = 0.0;
    int initial_ = 0;
    std::vector<std::vector<int>> signals_;
    int num_signals_ = 0;
};

/// Checked successor lookup; throws ArgumentError on bad indices.
int transition_apply(const Posg& posg, int state, std::span<const int> joint_action);

/// Distribution over states.
using StateBelief = Eigen::VectorXd;

/// One belief profile over the other agents' actions per state.
using PerStateBeliefs = std::vector<BeliefProfile>;

StateBelief point_belief(const Posg& posg, int state);
PerStateBeliefs uniform_per_state(const Posg& posg);

struct TrackingUpdate {
    StateBelief belief;
    bool reset = false;  ///< evidence contradicted every state; belief was reset to uniform
};

/**
Propagate the state belief of `player` through the transition function,
weighting opponent joint actions by the product of `opponent_posteriors`
(entry `player` unused). A local signal, when given, is applied as hard
evidence on the successor state.
*/
TrackingUpdate state_belief_update(const Posg& posg, const StateBelief& belief, int player, int own_action,
                                   const BeliefProfile& opponent_posteriors, std::optional<int> local_signal = {});

/// Step size for each state: alpha * belief(s). Sums to alpha.
Eigen::VectorXd responsibility_steps(const StateBelief& belief, double alpha);

/// In-place responsibility-weighted belief_update of every state the agent
/// might have acted in. `t` is the number of updates already applied.
void apply_per_state_update(PerStateBeliefs& beliefs, const StateBelief& state_belief, int player,
                            std::span<const int> observed_joint, const FilterSpec& filter,
                            const StepSchedule& schedule, long t);

PerStateBeliefs per_state_belief_update(const PerStateBeliefs& beliefs, const StateBelief& state_belief, int player,
                                        std::span<const int> observed_joint, const FilterSpec& filter,
                                        const StepSchedule& schedule, long t);

/// Opponent-action prior implied by a state belief: sum_s belief(s) sigma^s.
BeliefProfile mixed_opponent_prior(const PerStateBeliefs& beliefs, const StateBelief& state_belief);

}  // namespace ffp
