#include "ffp/learning.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ffp {

void validate(const StepSchedule& schedule) {
    if (!(schedule.c >= 0.0)) throw ArgumentError("schedule constant must be nonnegative");
    if (!(schedule.rho > 0.0 && schedule.rho <= 1.0)) throw ArgumentError("schedule exponent must lie in (0,1]");
}

double step_size(const StepSchedule& schedule, long t) {
    validate(schedule);
    if (t < 1) throw ArgumentError("step index starts at 1");
    return std::pow(schedule.c + static_cast<double>(t), -schedule.rho);
}

MixedStrategy filter_posterior(const FilterSpec& filter, const MixedStrategy& prior, int observed) {
    const auto n = static_cast<int>(prior.size());
    if (observed < 0 || observed >= n) throw ShapeError("observed action out of range");
    if (filter.kind == FilterKind::identity) return pure_strategy(n, observed);

    MixedStrategy post(n);
    for (int a = 0; a < n; ++a) post[a] = likelihood(filter.assumed_eps, observed, a, n) * prior[a];
    const double z = post.sum();
    if (!(z > 0.0)) throw FilterDegenerate("posterior normaliser is zero");
    return post / z;
}

void blend_toward(MixedStrategy& belief, const MixedStrategy& target, double alpha) {
    belief = (1.0 - alpha) * belief + alpha * target;
    belief = belief.cwiseMax(kBeliefFloor);
    belief /= belief.sum();
}

LearnerState initial_learner(const NormalFormGame& game, int owner) {
    return {owner, uniform_profile(game), 0};
}

LearnerState belief_update(const LearnerState& state, std::span<const int> observed_joint,
                           const FilterSpec& filter, const StepSchedule& schedule) {
    if (observed_joint.size() != state.beliefs.size()) throw ShapeError("observation has wrong arity");
    LearnerState next = state;
    const double alpha = step_size(schedule, state.t + 1);
    for (std::size_t j = 0; j < next.beliefs.size(); ++j) {
        if (static_cast<int>(j) == state.owner) continue;
        const MixedStrategy post = filter_posterior(filter, next.beliefs[j], observed_joint[j]);
        blend_toward(next.beliefs[j], post, alpha);
    }
    next.t = state.t + 1;
    return next;
}

std::string ConvergenceVerdict::label() const {
    switch (kind) {
    case ConvergenceKind::pure: {
        std::ostringstream os;
        os << "pure:";
        for (std::size_t k = 0; k < equilibrium.size(); ++k) os << (k ? "-" : "") << equilibrium[k];
        return os.str();
    }
    case ConvergenceKind::mixed:
        return "mixed";
    case ConvergenceKind::none:
        break;
    }
    return "none";
}

long default_window(long iterations) { return std::max(1L, std::min(1000L, iterations / 10)); }

RunTrace run_fp(const NormalFormGame& game, double true_eps, const FilterSpec& filter,
                const StepSchedule& schedule, long iterations, std::uint64_t seed, const FpOptions& options) {
    if (iterations < 1) throw ArgumentError("iterations must be at least 1");
    validate(schedule);
    if (!(filter.assumed_eps >= 0.0 && filter.assumed_eps <= 1.0))
        throw ArgumentError("assumed eps must lie in [0,1]");
    const ObservationChannel channel(true_eps, game.action_counts());
    const int n = game.num_players();

    std::vector<LearnerState> learners;
    std::vector<SeededRng> tie_rng;
    std::vector<SeededRng> obs_rng;
    for (int i = 0; i < n; ++i) {
        learners.push_back(initial_learner(game, i));
        if (!options.initial_beliefs.empty()) {
            learners.back().beliefs = options.initial_beliefs.at(static_cast<std::size_t>(i));
            if (static_cast<int>(learners.back().beliefs.size()) != n)
                throw ShapeError("initial beliefs need one strategy per player");
        }
        tie_rng.push_back(SeededRng::substream(seed, i, Stream::tie_break));
        obs_rng.push_back(SeededRng::substream(seed, i, Stream::observation));
    }

    RunTrace trace;
    trace.num_players = n;
    trace.iterations = iterations;
    trace.seed = seed;
    trace.true_actions.resize(static_cast<std::size_t>(iterations * n));
    trace.observed_actions.resize(static_cast<std::size_t>(iterations * n * n));

    JointAction played(static_cast<std::size_t>(n));
    JointAction seen(static_cast<std::size_t>(n));
    for (long t = 0; t < iterations; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto br = best_response(game, i, learners[static_cast<std::size_t>(i)].beliefs);
            played[static_cast<std::size_t>(i)] =
                br.size() == 1 ? br.front()
                               : br[static_cast<std::size_t>(tie_rng[static_cast<std::size_t>(i)].uniform_int(
                                     static_cast<int>(br.size())))];
        }
        std::copy(played.begin(), played.end(), trace.true_actions.begin() + t * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                seen[static_cast<std::size_t>(j)] =
                    j == i ? played[static_cast<std::size_t>(j)]
                           : perturb_action(channel, j, played[static_cast<std::size_t>(j)],
                                            obs_rng[static_cast<std::size_t>(i)]);
            std::copy(seen.begin(), seen.end(), trace.observed_actions.begin() + (t * n + i) * n);
            auto& learner = learners[static_cast<std::size_t>(i)];
            learner = belief_update(learner, seen, filter, schedule);
        }
        if (options.snapshot_stride > 0 && (t + 1) % options.snapshot_stride == 0)
            for (int i = 0; i < n; ++i)
                trace.snapshots.push_back({t + 1, i, learners[static_cast<std::size_t>(i)].beliefs});
    }

    for (const auto& l : learners) trace.final_beliefs.push_back(l.beliefs);
    const long window = options.window > 0 ? std::min(options.window, iterations) : default_window(iterations);
    trace.verdict = detect_convergence(trace, window, options.tol, game);
    return trace;
}

BeliefProfile empirical_play(const RunTrace& trace, const NormalFormGame& game, long window) {
    window = std::clamp(window, 1L, trace.iterations);
    BeliefProfile freq;
    for (int j = 0; j < game.num_players(); ++j) freq.push_back(MixedStrategy::Zero(game.num_actions(j)));
    for (long t = trace.iterations - window; t < trace.iterations; ++t)
        for (int j = 0; j < game.num_players(); ++j) freq[static_cast<std::size_t>(j)][trace.true_action(t, j)] += 1.0;
    for (auto& f : freq) f /= static_cast<double>(window);
    return freq;
}

ConvergenceVerdict detect_convergence(const RunTrace& trace, long window, double tol, const NormalFormGame& game) {
    if (window < 1 || window > trace.iterations) throw ArgumentError("window must lie in [1, iterations]");
    const int n = game.num_players();
    ConvergenceVerdict verdict;

    // consensus profile: each player's strategy as the others believe it
    for (int j = 0; j < n; ++j) {
        MixedStrategy s = MixedStrategy::Zero(game.num_actions(j));
        int count = 0;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            s += trace.final_beliefs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            ++count;
        }
        verdict.profile.push_back(count ? MixedStrategy(s / count) : uniform_strategy(game.num_actions(j)));
    }

    std::vector<long> counts(static_cast<std::size_t>(game.num_joint_actions()), 0);
    JointAction a(static_cast<std::size_t>(n));
    for (long t = trace.iterations - window; t < trace.iterations; ++t) {
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = trace.true_action(t, j);
        ++counts[static_cast<std::size_t>(game.joint_index(a))];
    }
    const auto top = std::max_element(counts.begin(), counts.end());
    if (static_cast<double>(*top) >= (1.0 - tol) * static_cast<double>(window)) {
        const JointAction candidate = game.joint_action(top - counts.begin());
        if (is_nash(game, pure_profile(game, candidate), kPayoffTol)) {
            verdict.kind = ConvergenceKind::pure;
            verdict.equilibrium = candidate;
            return verdict;
        }
    }
    if (is_nash(game, verdict.profile, tol)) verdict.kind = ConvergenceKind::mixed;
    return verdict;
}

double precision_estimate(const RunTrace& trace, int agent, int opponent, int num_actions) {
    MixedStrategy freq = MixedStrategy::Zero(num_actions);
    for (long t = 0; t < trace.iterations; ++t) freq[trace.true_action(t, opponent)] += 1.0;
    freq /= static_cast<double>(trace.iterations);
    const MixedStrategy& belief =
        trace.final_beliefs.at(static_cast<std::size_t>(agent)).at(static_cast<std::size_t>(opponent));
    return (freq - belief).cwiseAbs().maxCoeff();
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    out << "t,agent,opponent,action,belief\n";
    const auto old_precision = out.precision(17);
    for (const auto& snap : trace.snapshots)
        for (std::size_t j = 0; j < snap.beliefs.size(); ++j) {
            if (static_cast<int>(j) == snap.agent) continue;
            for (Eigen::Index a = 0; a < snap.beliefs[j].size(); ++a)
                out << snap.t << ',' << snap.agent << ',' << j << ',' << a << ',' << snap.beliefs[j][a] << '\n';
        }
    out.precision(old_precision);
}

}  // namespace ffp
