#pragma once

#include "ffp/game.hpp"
#include "ffp/observation.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffp {

/// Step sizes (c + t)^-rho. rho in (0,1] keeps the sum divergent.
struct StepSchedule {
    double c = 0.0;
    double rho = 1.0;
};

void validate(const StepSchedule& schedule);

double step_size(const StepSchedule& schedule, long t);

enum class FilterKind { identity, bayes };

/// Noise filter applied to each observed opponent action before the belief
/// step. `assumed_eps` is the learner's model of the channel noise and is
/// ignored by the identity filter.
struct FilterSpec {
    FilterKind kind = FilterKind::identity;
    double assumed_eps = 0.0;
};

/// Bayes posterior with an all-zero normaliser.
struct FilterDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Beliefs are clamped to at least this value after every update.
inline constexpr double kBeliefFloor = 1e-6;

/**
Distribution over the true action of an opponent given one observation.
Identity: point mass on the observation. Bayes: prior times the channel
likelihood under `assumed_eps`, normalised.
*/
MixedStrategy filter_posterior(const FilterSpec& filter, const MixedStrategy& prior, int observed);

/// belief <- (1 - alpha) belief + alpha target, then floored and renormalised.
void blend_toward(MixedStrategy& belief, const MixedStrategy& target, double alpha);

struct LearnerState {
    int owner = 0;           ///< the agent holding these beliefs
    BeliefProfile beliefs;   ///< beliefs[owner] is unused
    long t = 0;
};

LearnerState initial_learner(const NormalFormGame& game, int owner);

/// One filtered step toward the posterior of every opponent's observed
/// action, using alpha = step_size(schedule, t + 1).
LearnerState belief_update(const LearnerState& state, std::span<const int> observed_joint,
                           const FilterSpec& filter, const StepSchedule& schedule);

enum class ConvergenceKind { none, pure, mixed };

struct ConvergenceVerdict {
    ConvergenceKind kind = ConvergenceKind::none;
    JointAction equilibrium;  ///< set for ConvergenceKind::pure
    BeliefProfile profile;    ///< consensus belief profile at the end of the run
    std::string label() const;
    bool converged() const { return kind != ConvergenceKind::none; }
};

struct BeliefSnapshot {
    long t = 0;
    int agent = 0;
    BeliefProfile beliefs;
};

/// Everything a repeated-game run produced.
struct RunTrace {
    int num_players = 0;
    long iterations = 0;
    std::uint64_t seed = 0;
    std::vector<int> true_actions;      ///< iterations x players
    std::vector<int> observed_actions;  ///< iterations x observer x observed
    std::vector<BeliefSnapshot> snapshots;
    std::vector<BeliefProfile> final_beliefs;  ///< per agent
    ConvergenceVerdict verdict;

    int true_action(long t, int player) const {
        return true_actions[static_cast<std::size_t>(t * num_players + player)];
    }
    int observed_action(long t, int observer, int player) const {
        return observed_actions[static_cast<std::size_t>((t * num_players + observer) * num_players + player)];
    }
};

struct FpOptions {
    long snapshot_stride = 0;  ///< 0 disables snapshots
    /// Starting beliefs per agent; uniform when empty.
    std::vector<BeliefProfile> initial_beliefs;
    /// Convergence detection parameters; window <= 0 picks min(1000, iterations/10).
    long window = 0;
    double tol = 0.05;
};

/**
Repeated play of `game`: every agent best-responds to its beliefs (uniform
seeded tie-break), sees the others through an observation channel with noise
`true_eps`, and applies belief_update.
*/
RunTrace run_fp(const NormalFormGame& game, double true_eps, const FilterSpec& filter,
                const StepSchedule& schedule, long iterations, std::uint64_t seed,
                const FpOptions& options = {});

long default_window(long iterations);

/// Converged if the final window puts >= 1 - tol of joint play on one pure
/// NE, or if the consensus final beliefs are a tol-Nash equilibrium.
ConvergenceVerdict detect_convergence(const RunTrace& trace, long window, double tol, const NormalFormGame& game);

/// L-infinity gap between the opponent's true empirical action frequency and
/// the agent's final belief about it.
double precision_estimate(const RunTrace& trace, int agent, int opponent, int num_actions);

/// Per-player marginal play frequencies over the last `window` iterations.
BeliefProfile empirical_play(const RunTrace& trace, const NormalFormGame& game, long window);

/// Snapshot rows `t,agent,opponent,action,belief`.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

}  // namespace ffp
