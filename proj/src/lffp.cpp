#include "ffp/lffp.hpp"

#include <cmath>

namespace ffp {

void validate(const LffpConfig& config) {
    if (config.depth < 1) throw ArgumentError("lookahead depth must be at least 1");
    if (!(config.xi0 >= 0.0)) throw ArgumentError("xi0 must be nonnegative");
    if (!(config.filter.assumed_eps >= 0.0 && config.filter.assumed_eps <= 1.0))
        throw ArgumentError("assumed eps must lie in [0,1]");
    validate(config.schedule);
}

double xi_schedule(double xi0, long t) {
    if (t < 1) throw ArgumentError("xi schedule starts at t = 1");
    return std::min(1.0, xi0 / std::sqrt(static_cast<double>(t)));
}

double v_star(const Posg& posg, int player, int state, const BeliefProfile& sigma,
              const Eigen::VectorXd& child_values) {
    Eigen::VectorXd q;
    action_backups(
        posg, player, state, sigma, [&](int s) { return child_values[s]; }, child_values.size() == 0,
        Evaluation::optimal, q);
    return q.maxCoeff();
}

double v_opt(const Posg& posg, int player, int state, const Eigen::VectorXd& child_values) {
    Eigen::VectorXd q;
    const BeliefProfile unused;
    action_backups(
        posg, player, state, unused, [&](int s) { return child_values[s]; }, child_values.size() == 0,
        Evaluation::optimistic, q);
    return q.maxCoeff();
}

Lookahead::Lookahead(const Posg& posg, int player, const LffpConfig& config)
    : posg_(&posg), player_(player), config_(config) {
    validate(config_);
    if (player < 0 || player >= posg.num_players()) throw ArgumentError("player out of range");
    const auto cells = static_cast<std::size_t>((config_.depth + 1) * posg.num_states());
    memo_.assign(cells, 0.0);
    known_.assign(cells, 0);
    scratch_.resize(static_cast<std::size_t>(config_.depth + 1));
}

double Lookahead::value(int depth, int state) {
    const auto idx = static_cast<std::size_t>(depth * posg_->num_states() + state);
    if (known_[idx]) return memo_[idx];

    Evaluation kind = Evaluation::optimal;
    if (xi_ >= 1.0 || (xi_ > 0.0 && rng_->uniform() < xi_)) kind = Evaluation::optimistic;
    ++stats_.nodes;
    stats_.xi_sum += xi_;
    if (kind == Evaluation::optimistic) ++stats_.optimistic;

    Eigen::VectorXd& q = scratch_[static_cast<std::size_t>(depth)];
    action_backups(
        *posg_, player_, state, (*beliefs_)[static_cast<std::size_t>(state)],
        [&](int next) { return value(depth - 1, next); }, depth == 0, kind, q);
    const double v = q.maxCoeff();
    known_[idx] = 1;
    memo_[idx] = v;
    return v;
}

Decision Lookahead::select(const StateBelief& tracking, const PerStateBeliefs& beliefs, long t, SeededRng& rng) {
    const int ns = posg_->num_states();
    if (tracking.size() != ns || static_cast<int>(beliefs.size()) != ns)
        throw ShapeError("tracking and beliefs must cover every state");
    beliefs_ = &beliefs;
    rng_ = &rng;
    xi_ = xi_schedule(config_.xi0, t);
    std::fill(known_.begin(), known_.end(), 0);

    std::vector<int> roots;
    if (config_.state_mode == StateMode::point) {
        Eigen::Index best = 0;
        tracking.maxCoeff(&best);
        roots.push_back(static_cast<int>(best));
    } else {
        for (int s = 0; s < ns; ++s)
            if (tracking[s] > 0.0) roots.push_back(s);
    }

    Decision decision;
    Eigen::VectorXd q;
    for (int s : roots) {
        action_backups(
            *posg_, player_, s, beliefs[static_cast<std::size_t>(s)],
            [&](int next) { return value(config_.depth - 1, next); }, false, Evaluation::optimal, q);
        const double w = config_.state_mode == StateMode::point ? 1.0 : tracking[s];
        if (decision.root_values.size() == 0) decision.root_values = Eigen::VectorXd::Zero(q.size());
        if (q.size() != decision.root_values.size()) throw ShapeError("root states disagree on own action count");
        decision.root_values += w * q;
    }

    const double best = decision.root_values.maxCoeff();
    const double slack = kPayoffTol * std::max(1.0, std::abs(best));
    std::vector<int> ties;
    for (Eigen::Index a = 0; a < decision.root_values.size(); ++a)
        if (decision.root_values[a] >= best - slack) ties.push_back(static_cast<int>(a));
    decision.action = ties.size() == 1 ? ties.front()
                                       : ties[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(ties.size())))];
    beliefs_ = nullptr;
    rng_ = nullptr;
    return decision;
}

int select_action(const Posg& posg, int player, const StateBelief& tracking, const PerStateBeliefs& beliefs,
                  const LffpConfig& config, long t, SeededRng& rng) {
    Lookahead search(posg, player, config);
    return search.select(tracking, beliefs, t, rng).action;
}

double final_quartile_mean(const std::vector<double>& episode_rewards) {
    if (episode_rewards.empty()) throw ArgumentError("no episodes recorded");
    const std::size_t n = episode_rewards.size();
    const std::size_t k = std::max<std::size_t>(1, (n + 3) / 4);
    double sum = 0.0;
    for (std::size_t e = n - k; e < n; ++e) sum += episode_rewards[e];
    return sum / static_cast<double>(k);
}

LffpTrace run_lffp(const Posg& posg, double true_eps, const LffpConfig& config, long total_steps,
                   long episode_horizon, std::uint64_t seed) {
    validate(config);
    if (episode_horizon < 1 || total_steps < episode_horizon)
        throw ArgumentError("need total_steps >= episode_horizon >= 1");
    if (!posg.uniform_actions()) throw ShapeError("run_lffp needs identical action sets in every state");
    const int n = posg.num_players();
    const ObservationChannel channel(true_eps, posg.stage(0).action_counts());

    struct Agent {
        Lookahead planner;
        StateBelief tracking;
        PerStateBeliefs sigma;
        SeededRng explore;
        SeededRng observe;
    };
    std::vector<Agent> agents;
    for (int i = 0; i < n; ++i)
        agents.push_back({Lookahead(posg, i, config), point_belief(posg, posg.initial_state()), uniform_per_state(posg),
                          SeededRng::substream(seed, i, Stream::exploration),
                          SeededRng::substream(seed, i, Stream::observation)});

    LffpTrace trace;
    long t = 0;
    JointAction played(static_cast<std::size_t>(n));
    JointAction seen(static_cast<std::size_t>(n));
    BeliefProfile posteriors(static_cast<std::size_t>(n));
    while (t < total_steps) {
        int state = posg.initial_state();
        for (auto& agent : agents) agent.tracking = point_belief(posg, state);
        double episode_reward = 0.0;
        long steps = 0;
        for (; steps < episode_horizon && t < total_steps; ++steps) {
            for (int i = 0; i < n; ++i) {
                auto& agent = agents[static_cast<std::size_t>(i)];
                played[static_cast<std::size_t>(i)] = agent.planner.select(agent.tracking, agent.sigma, t + 1, agent.explore).action;
            }
            const NormalFormGame& stage = posg.stage(state);
            const Eigen::Index joint = stage.joint_index(played);
            double reward = 0.0;
            for (int i = 0; i < n; ++i) reward += stage.payoff(i, joint);
            episode_reward += reward / n;
            const int next = posg.next_state(state, joint);

            for (int i = 0; i < n; ++i) {
                auto& agent = agents[static_cast<std::size_t>(i)];
                for (int j = 0; j < n; ++j)
                    seen[static_cast<std::size_t>(j)] =
                        j == i ? played[static_cast<std::size_t>(j)]
                               : perturb_action(channel, j, played[static_cast<std::size_t>(j)], agent.observe);
                const BeliefProfile prior = mixed_opponent_prior(agent.sigma, agent.tracking);
                for (int j = 0; j < n; ++j)
                    posteriors[static_cast<std::size_t>(j)] =
                        j == i ? MixedStrategy()
                               : filter_posterior(config.filter, prior[static_cast<std::size_t>(j)],
                                                  seen[static_cast<std::size_t>(j)]);
                std::optional<int> signal;
                if (posg.has_signals()) signal = posg.signal(next, i);
                TrackingUpdate update = state_belief_update(posg, agent.tracking, i, played[static_cast<std::size_t>(i)],
                                                            posteriors, signal);
                if (!config.learning_frozen)
                    apply_per_state_update(agent.sigma, agent.tracking, i, seen, config.filter, config.schedule, t);
                agent.tracking = std::move(update.belief);
                trace.tracking_resets += update.reset;
            }
            state = next;
            ++t;
        }
        trace.episode_rewards.push_back(episode_reward);
        trace.episode_steps.push_back(steps);
    }
    trace.total_steps = t;
    for (const auto& agent : agents) {
        trace.search.nodes += agent.planner.stats().nodes;
        trace.search.optimistic += agent.planner.stats().optimistic;
        trace.search.xi_sum += agent.planner.stats().xi_sum;
    }
    return trace;
}

}  // namespace ffp
