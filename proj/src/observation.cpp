#include "ffp/observation.hpp"

namespace ffp {

ObservationChannel::ObservationChannel(double eps_, std::vector<int> counts)
    : eps(eps_), action_counts(std::move(counts)) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ArgumentError("observation eps must lie in [0,1]");
    for (int n : action_counts) {
        if (n < 1) throw ShapeError("every player needs at least one action");
        if (eps > 0.0 && n == 1) throw ArgumentError("degenerate channel: a single-action player cannot be misobserved");
    }
}

int perturb_action(const ObservationChannel& channel, int player, int action, SeededRng& rng) {
    const int n = channel.action_counts.at(static_cast<std::size_t>(player));
    if (action < 0 || action >= n) throw ShapeError("action index out of range");
    if (channel.eps == 0.0) return action;
    if (!rng.bernoulli(channel.eps)) return action;
    const int wrong = rng.uniform_int(n - 1);
    return wrong >= action ? wrong + 1 : wrong;
}

JointAction perturb(const ObservationChannel& channel, std::span<const int> true_joint, SeededRng& rng) {
    if (true_joint.size() != channel.action_counts.size()) throw ShapeError("joint action has wrong arity");
    JointAction observed(true_joint.size());
    for (std::size_t j = 0; j < true_joint.size(); ++j)
        observed[j] = perturb_action(channel, static_cast<int>(j), true_joint[j], rng);
    return observed;
}

double likelihood(double eps, int observed, int true_action, int num_actions) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ArgumentError("observation eps must lie in [0,1]");
    if (observed == true_action) return 1.0 - eps;
    if (num_actions < 2) {
        if (eps > 0.0) throw ArgumentError("degenerate channel: a single-action player cannot be misobserved");
        return 0.0;
    }
    return eps / (num_actions - 1);
}

}  // namespace ffp
