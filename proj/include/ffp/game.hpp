#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ffp {

/// Payoff or profile dimensions do not match the game.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A scalar argument is outside its admissible range.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using JointAction = std::vector<int>;

/// Distribution over one player's actions.
using MixedStrategy = Eigen::VectorXd;

/// One mixed strategy per player. Inside a learner, the entry for the
/// learner itself is carried along but never read.
using BeliefProfile = std::vector<MixedStrategy>;

/// Tolerance for equality tests on payoff arithmetic.
inline constexpr double kPayoffTol = 1e-9;

/**
Finite n-player normal-form game. Each player's payoffs are stored as a flat
tensor over joint actions in row-major order, the last player's action
varying fastest.
*/
class NormalFormGame {
public:
    NormalFormGame(std::vector<int> action_counts, std::vector<Eigen::VectorXd> payoffs);

    int num_players() const { return static_cast<int>(action_counts_.size()); }
    int num_actions(int player) const { return action_counts_.at(static_cast<std::size_t>(player)); }
    const std::vector<int>& action_counts() const { return action_counts_; }
    Eigen::Index num_joint_actions() const { return num_joint_; }

    const Eigen::VectorXd& payoffs(int player) const { return payoffs_.at(static_cast<std::size_t>(player)); }
    double payoff(int player, Eigen::Index joint) const { return payoffs_[static_cast<std::size_t>(player)][joint]; }
    double payoff(int player, std::span<const int> joint) const { return payoff(player, joint_index(joint)); }

    /// Distance in the flat index between consecutive actions of `player`.
    Eigen::Index stride(int player) const { return strides_.at(static_cast<std::size_t>(player)); }

    Eigen::Index joint_index(std::span<const int> actions) const;
    JointAction joint_action(Eigen::Index index) const;
    int action_of(Eigen::Index joint, int player) const {
        return static_cast<int>((joint / stride(player)) % num_actions(player));
    }

private:
    std::vector<int> action_counts_;
    std::vector<Eigen::VectorXd> payoffs_;
    std::vector<Eigen::Index> strides_;
    Eigen::Index num_joint_ = 0;
};

/// Every player gets the same payoff tensor.
NormalFormGame identical_interest_game(std::vector<int> action_counts, const Eigen::VectorXd& payoff);

MixedStrategy uniform_strategy(int num_actions);
MixedStrategy pure_strategy(int num_actions, int action);
BeliefProfile uniform_profile(const NormalFormGame& game);
BeliefProfile pure_profile(const NormalFormGame& game, std::span<const int> joint);

/// Entries in [0,1] summing to one within `tol`.
bool is_valid_strategy(const MixedStrategy& s, double tol = 1e-9);

/// Expected reward of every pure action of `player` against the other
/// players' strategies in `profile`. profile[player] is ignored.
Eigen::VectorXd action_values(const NormalFormGame& game, const BeliefProfile& profile, int player);

/// Reward of the mixed extension under independent play.
double expected_reward(const NormalFormGame& game, const BeliefProfile& profile, int player);

std::vector<int> best_response(const NormalFormGame& game, int player, const BeliefProfile& others);

/// Actions whose expected reward is within `delta` of the best.
std::vector<int> delta_best_response(const NormalFormGame& game, int player, const BeliefProfile& others,
                                     double delta);

/// 1-eps spread uniformly over the best responses, eps over the rest.
MixedStrategy epsilon_best_response(const NormalFormGame& game, int player, const BeliefProfile& others,
                                    double eps);

struct PureEquilibrium {
    JointAction actions;
    bool strict = false;
};

std::vector<PureEquilibrium> pure_nash(const NormalFormGame& game);

bool is_nash(const NormalFormGame& game, const BeliefProfile& profile, double tol);

/// Largest gain any player gets from a unilateral pure deviation.
double max_deviation_gain(const NormalFormGame& game, const BeliefProfile& profile);

struct PotentialFunction {
    Eigen::VectorXd values;  ///< same layout as a payoff tensor, zero at the all-zeros joint action
};

/// An edge (unilateral deviation) on which no potential can agree.
struct NotPotential {
    int player = 0;
    JointAction from;
    JointAction to;
    double reward_difference = 0.0;
    double potential_difference = 0.0;
    /// A closed 4-cycle of unilateral deviations (two players) whose summed
    /// reward changes are nonzero; empty if none was found.
    std::vector<JointAction> cycle;
    double cycle_sum = 0.0;
};

using PotentialResult = std::variant<PotentialFunction, NotPotential>;

/// Integrates reward differences along single-coordinate paths from the
/// all-zeros joint action, then verifies every deviation edge.
PotentialResult potential_reconstruct(const NormalFormGame& game);

struct BindingConstraint {
    int player = 0;
    int deviation = 0;
    JointAction opponents;  ///< joint action of all players; entry `player` is the equilibrium action
};

struct PDominanceReport {
    JointAction equilibrium;
    double min_p = 0.0;
    std::vector<BindingConstraint> binding_constraints;
};

/**
Smallest p such that each equilibrium action stays a best response to any
(possibly correlated) opponent distribution placing at least p on the
equilibrium profile of the others. Throws ArgumentError if `equilibrium` is
not a pure Nash equilibrium.
*/
PDominanceReport min_p_dominance(const NormalFormGame& game, std::span<const int> equilibrium);

/// Observation-noise level above which fictitious play cannot settle on a
/// p-dominant equilibrium: 1 - p^(1/(N-1)).
double gwfp_noise_threshold(double p, int num_players);

}  // namespace ffp
