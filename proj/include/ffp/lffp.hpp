#pragma once

#include "ffp/learning.hpp"
#include "ffp/posg.hpp"
#include "ffp/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace ffp {

enum class StateMode { distribution, point };

struct LffpConfig {
    int depth = 3;      ///< lookahead depth D; the root sits at remaining depth D
    double xi0 = 1.0;   ///< initial optimism weight
    FilterSpec filter{FilterKind::bayes, 0.0};
    StepSchedule schedule{};
    StateMode state_mode = StateMode::distribution;
    bool learning_frozen = false;  ///< skip opponent-belief updates (state tracking continues)
};

void validate(const LffpConfig& config);

/// min(1, xi0 / sqrt(t)).
double xi_schedule(double xi0, long t);

enum class Evaluation { optimal, optimistic };

/**
Per-own-action backups at one node:
  optimal:    sum_{a-i} prod_j sigma_j(a_j) [r_i(a) + gamma V(T(s,a))]
  optimistic: max_{a-i} [r_i(a) + gamma V(T(s,a))]
`next_value(s')` supplies V(d-1, s'); pass `leaf = true` to drop the
continuation term.
*/
template <typename NextValue>
void action_backups(const Posg& posg, int player, int state, const BeliefProfile& sigma, NextValue&& next_value,
                    bool leaf, Evaluation kind, Eigen::VectorXd& out) {
    const NormalFormGame& g = posg.stage(state);
    const Eigen::VectorXd& r = g.payoffs(player);
    const double gamma = posg.gamma();
    const int n = g.num_players();
    out.setConstant(g.num_actions(player),
                    kind == Evaluation::optimal ? 0.0 : -std::numeric_limits<double>::infinity());
    for (Eigen::Index a = 0; a < g.num_joint_actions(); ++a) {
        const double q = r[a] + (leaf ? 0.0 : gamma * next_value(posg.next_state(state, a)));
        const int own = g.action_of(a, player);
        if (kind == Evaluation::optimistic) {
            out[own] = std::max(out[own], q);
            continue;
        }
        double w = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != player) w *= sigma[static_cast<std::size_t>(j)][g.action_of(a, j)];
        out[own] += w * q;
    }
}

/// Optimal evaluation of a node. `child_values` holds V(d-1, .) indexed by
/// state; an empty vector marks a leaf (d = 0).
double v_star(const Posg& posg, int player, int state, const BeliefProfile& sigma,
              const Eigen::VectorXd& child_values);

/// Optimistic evaluation of a node; same conventions as v_star.
double v_opt(const Posg& posg, int player, int state, const Eigen::VectorXd& child_values);

struct SearchStats {
    long nodes = 0;       ///< non-root node evaluations
    long optimistic = 0;  ///< of which used the optimistic backup
    double xi_sum = 0.0;  ///< sum of xi over non-root node evaluations
};

struct Decision {
    int action = 0;
    Eigen::VectorXd root_values;  ///< per own action, mixed over the root states
};

/**
Depth-limited lookahead for one agent. Holds the memo table so repeated
decisions do not reallocate. Each non-root node (remaining depth, state) is
evaluated once per decision, optimistically with probability xi.
*/
class Lookahead {
public:
    Lookahead(const Posg& posg, int player, const LffpConfig& config);

    Decision select(const StateBelief& tracking, const PerStateBeliefs& beliefs, long t, SeededRng& rng);

    const SearchStats& stats() const { return stats_; }

private:
    double value(int depth, int state);

    const Posg* posg_;
    int player_;
    LffpConfig config_;
    const PerStateBeliefs* beliefs_ = nullptr;
    SeededRng* rng_ = nullptr;
    double xi_ = 0.0;
    std::vector<double> memo_;
    std::vector<char> known_;
    std::vector<Eigen::VectorXd> scratch_;  ///< one backup buffer per depth
    SearchStats stats_;
};

/// Convenience wrapper around Lookahead::select.
int select_action(const Posg& posg, int player, const StateBelief& tracking, const PerStateBeliefs& beliefs,
                  const LffpConfig& config, long t, SeededRng& rng);

struct LffpTrace {
    std::vector<double> episode_rewards;  ///< undiscounted team reward per episode
    std::vector<long> episode_steps;
    long total_steps = 0;
    long tracking_resets = 0;
    SearchStats search;
};

/**
Online LFFP: episodes of `episode_horizon` steps from the initial state until
`total_steps` elapse. Each agent plans with Lookahead, acts, receives
perturbed observations of the others and its local signal, and updates state
tracking and per-state opponent beliefs. The identity filter gives LGWFP.
Global t drives both the optimism and step-size schedules.
*/
LffpTrace run_lffp(const Posg& posg, double true_eps, const LffpConfig& config, long total_steps,
                   long episode_horizon, std::uint64_t seed);

/// Final-quartile mean of the episode rewards (at least one episode).
double final_quartile_mean(const std::vector<double>& episode_rewards);

}  // namespace ffp
