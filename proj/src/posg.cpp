#include "ffp/posg.hpp"

#include <cmath>

namespace ffp {

Posg::Posg(std::vector<NormalFormGame> stage_games, std::vector<std::vector<int>> transitions, double gamma,
           int initial_state, std::vector<std::vector<int>> signals, int num_signals)
    : stages_(std::move(stage_games)),
      transitions_(std::move(transitions)),
      gamma_(gamma),
      initial_(initial_state),
      signals_(std::move(signals)),
      num_signals_(num_signals) {
    if (stages_.empty()) throw ShapeError("a POSG needs at least one state");
    if (!(gamma_ >= 0.0 && gamma_ < 1.0)) throw ArgumentError("discount must lie in [0,1)");
    const int n = num_states();
    if (initial_ < 0 || initial_ >= n) throw ArgumentError("initial state out of range");
    if (static_cast<int>(transitions_.size()) != n) throw ShapeError("one transition row per state required");
    for (int s = 0; s < n; ++s) {
        if (stages_[static_cast<std::size_t>(s)].num_players() != num_players())
            throw ShapeError("stage games disagree on the number of players");
        const auto& row = transitions_[static_cast<std::size_t>(s)];
        if (static_cast<Eigen::Index>(row.size()) != stages_[static_cast<std::size_t>(s)].num_joint_actions())
            throw ShapeError("transition row must cover every joint action");
        for (int next : row)
            if (next < 0 || next >= n) throw ArgumentError("transition target out of range");
    }
    if (!signals_.empty()) {
        if (static_cast<int>(signals_.size()) != n) throw ShapeError("one signal row per state required");
        for (const auto& row : signals_) {
            if (static_cast<int>(row.size()) != num_players()) throw ShapeError("one signal per player required");
            for (int sig : row)
                if (sig < 0 || sig >= num_signals_) throw ArgumentError("signal out of range");
        }
    }
}

bool Posg::uniform_actions() const {
    for (const auto& g : stages_)
        if (g.action_counts() != stages_.front().action_counts()) return false;
    return true;
}

int transition_apply(const Posg& posg, int state, std::span<const int> joint_action) {
    if (state < 0 || state >= posg.num_states()) throw ArgumentError("state out of range");
    Eigen::Index joint = 0;
    try {
        joint = posg.stage(state).joint_index(joint_action);
    } catch (const ShapeError& e) {
        throw ArgumentError(e.what());
    }
    return posg.next_state(state, joint);
}

StateBelief point_belief(const Posg& posg, int state) {
    StateBelief b = StateBelief::Zero(posg.num_states());
    b[state] = 1.0;
    return b;
}

PerStateBeliefs uniform_per_state(const Posg& posg) {
    PerStateBeliefs out;
    out.reserve(static_cast<std::size_t>(posg.num_states()));
    for (const auto& g : posg.stages()) out.push_back(uniform_profile(g));
    return out;
}

namespace {

// Restrict a distribution to the first `n` actions, renormalising; uniform if
// nothing survives.
MixedStrategy project(const MixedStrategy& p, int n) {
    if (p.size() == n) return p;
    MixedStrategy q = MixedStrategy::Zero(n);
    const Eigen::Index m = std::min<Eigen::Index>(n, p.size());
    q.head(m) = p.head(m);
    const double z = q.sum();
    return z > 0.0 ? MixedStrategy(q / z) : uniform_strategy(n);
}

}  // namespace

TrackingUpdate state_belief_update(const Posg& posg, const StateBelief& belief, int player, int own_action,
                                   const BeliefProfile& opponent_posteriors, std::optional<int> local_signal) {
    const int ns = posg.num_states();
    if (belief.size() != ns) throw ShapeError("state belief has wrong length");
    if (static_cast<int>(opponent_posteriors.size()) != posg.num_players())
        throw ShapeError("one posterior per player required");

    TrackingUpdate out{StateBelief::Zero(ns), false};
    for (int s = 0; s < ns; ++s) {
        const double bs = belief[s];
        if (bs <= 0.0) continue;
        const NormalFormGame& g = posg.stage(s);
        if (own_action < 0 || own_action >= g.num_actions(player)) continue;
        BeliefProfile post;
        for (int j = 0; j < g.num_players(); ++j)
            post.push_back(j == player ? MixedStrategy() : project(opponent_posteriors[static_cast<std::size_t>(j)],
                                                                   g.num_actions(j)));
        for (Eigen::Index a = 0; a < g.num_joint_actions(); ++a) {
            if (g.action_of(a, player) != own_action) continue;
            double w = bs;
            for (int j = 0; j < g.num_players() && w > 0.0; ++j)
                if (j != player) w *= post[static_cast<std::size_t>(j)][g.action_of(a, j)];
            if (w > 0.0) out.belief[posg.next_state(s, a)] += w;
        }
    }
    if (local_signal && posg.has_signals())
        for (int s = 0; s < ns; ++s)
            if (posg.signal(s, player) != *local_signal) out.belief[s] = 0.0;

    const double z = out.belief.sum();
    if (z > 0.0) {
        out.belief /= z;
    } else {
        out.belief = StateBelief::Constant(ns, 1.0 / ns);
        out.reset = true;
    }
    return out;
}

Eigen::VectorXd responsibility_steps(const StateBelief& belief, double alpha) { return alpha * belief; }

void apply_per_state_update(PerStateBeliefs& beliefs, const StateBelief& state_belief, int player,
                            std::span<const int> observed_joint, const FilterSpec& filter,
                            const StepSchedule& schedule, long t) {
    if (static_cast<Eigen::Index>(beliefs.size()) != state_belief.size())
        throw ShapeError("per-state beliefs and state belief disagree on state count");
    const double alpha = step_size(schedule, t + 1);
    for (std::size_t s = 0; s < beliefs.size(); ++s) {
        const double w = alpha * state_belief[static_cast<Eigen::Index>(s)];
        if (w <= 0.0) continue;
        auto& profile = beliefs[s];
        if (observed_joint.size() != profile.size()) throw ShapeError("observation has wrong arity");
        for (std::size_t j = 0; j < profile.size(); ++j) {
            if (static_cast<int>(j) == player) continue;
            const int obs = observed_joint[j];
            if (obs >= profile[j].size()) continue;  // action not available in this state
            const MixedStrategy post = filter_posterior(filter, profile[j], obs);
            blend_toward(profile[j], post, w);
        }
    }
}

PerStateBeliefs per_state_belief_update(const PerStateBeliefs& beliefs, const StateBelief& state_belief, int player,
                                        std::span<const int> observed_joint, const FilterSpec& filter,
                                        const StepSchedule& schedule, long t) {
    PerStateBeliefs next = beliefs;
    apply_per_state_update(next, state_belief, player, observed_joint, filter, schedule, t);
    return next;
}

BeliefProfile mixed_opponent_prior(const PerStateBeliefs& beliefs, const StateBelief& state_belief) {
    BeliefProfile prior;
    for (const auto& s : beliefs.front()) prior.push_back(MixedStrategy::Zero(s.size()));
    for (std::size_t s = 0; s < beliefs.size(); ++s) {
        const double w = state_belief[static_cast<Eigen::Index>(s)];
        if (w <= 0.0) continue;
        for (std::size_t j = 0; j < prior.size(); ++j)
            if (beliefs[s][j].size() == prior[j].size()) prior[j] += w * beliefs[s][j];
    }
    for (auto& p : prior) {
        const double z = p.sum();
        p = z > 0.0 ? MixedStrategy(p / z) : uniform_strategy(static_cast<int>(p.size()));
    }
    return prior;
}

}  // namespace ffp
