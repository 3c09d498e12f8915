#include "ffp/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ffp {

NormalFormGame::NormalFormGame(std::vector<int> action_counts, std::vector<Eigen::VectorXd> payoffs)
    : action_counts_(std::move(action_counts)), payoffs_(std::move(payoffs)) {
    if (action_counts_.empty()) throw ShapeError("game needs at least one player");
    if (payoffs_.size() != action_counts_.size())
        throw ShapeError("one payoff tensor per player required");
    strides_.assign(action_counts_.size(), 1);
    num_joint_ = 1;
    for (std::size_t k = action_counts_.size(); k-- > 0;) {
        if (action_counts_[k] < 1) throw ShapeError("every player needs at least one action");
        strides_[k] = num_joint_;
        num_joint_ *= action_counts_[k];
    }
    for (const auto& p : payoffs_) {
        if (p.size() != num_joint_) throw ShapeError("payoff tensor size does not match joint action count");
        if (!p.allFinite()) throw ShapeError("payoffs must be finite");
    }
}

Eigen::Index NormalFormGame::joint_index(std::span<const int> actions) const {
    if (actions.size() != action_counts_.size()) throw ShapeError("joint action has wrong arity");
    Eigen::Index idx = 0;
    for (std::size_t k = 0; k < actions.size(); ++k) {
        if (actions[k] < 0 || actions[k] >= action_counts_[k]) throw ShapeError("action index out of range");
        idx += actions[k] * strides_[k];
    }
    return idx;
}

JointAction NormalFormGame::joint_action(Eigen::Index index) const {
    JointAction a(action_counts_.size());
    for (int k = 0; k < num_players(); ++k) a[static_cast<std::size_t>(k)] = action_of(index, k);
    return a;
}

NormalFormGame identical_interest_game(std::vector<int> action_counts, const Eigen::VectorXd& payoff) {
    std::vector<Eigen::VectorXd> payoffs(action_counts.size(), payoff);
    return NormalFormGame(std::move(action_counts), std::move(payoffs));
}

MixedStrategy uniform_strategy(int num_actions) {
    return MixedStrategy::Constant(num_actions, 1.0 / num_actions);
}

MixedStrategy pure_strategy(int num_actions, int action) {
    MixedStrategy s = MixedStrategy::Zero(num_actions);
    s[action] = 1.0;
    return s;
}

BeliefProfile uniform_profile(const NormalFormGame& game) {
    BeliefProfile profile;
    for (int n : game.action_counts()) profile.push_back(uniform_strategy(n));
    return profile;
}

BeliefProfile pure_profile(const NormalFormGame& game, std::span<const int> joint) {
    BeliefProfile profile;
    for (int k = 0; k < game.num_players(); ++k)
        profile.push_back(pure_strategy(game.num_actions(k), joint[static_cast<std::size_t>(k)]));
    return profile;
}

bool is_valid_strategy(const MixedStrategy& s, double tol) {
    if (s.size() == 0) return false;
    if ((s.array() < -tol).any() || (s.array() > 1.0 + tol).any()) return false;
    return std::abs(s.sum() - 1.0) <= tol;
}

namespace {

void check_profile(const NormalFormGame& game, const BeliefProfile& profile, int player) {
    if (player < 0 || player >= game.num_players()) throw ShapeError("player index out of range");
    if (static_cast<int>(profile.size()) != game.num_players())
        throw ShapeError("profile needs one strategy per player");
    for (int k = 0; k < game.num_players(); ++k)
        if (profile[static_cast<std::size_t>(k)].size() != game.num_actions(k))
            throw ShapeError("strategy length does not match action count");
}

// A game is a potential game iff every two-player 4-cycle sums to zero.
void find_nonzero_cycle(const NormalFormGame& game, double scale, NotPotential& out) {
    for (int i = 0; i < game.num_players(); ++i) {
        for (int j = i + 1; j < game.num_players(); ++j) {
            const Eigen::Index si = game.stride(i);
            const Eigen::Index sj = game.stride(j);
            for (Eigen::Index a = 0; a < game.num_joint_actions(); ++a) {
                const int ai = game.action_of(a, i);
                const int aj = game.action_of(a, j);
                for (int bi = 0; bi < game.num_actions(i); ++bi) {
                    if (bi == ai) continue;
                    for (int bj = 0; bj < game.num_actions(j); ++bj) {
                        if (bj == aj) continue;
                        const Eigen::Index b = a + (bi - ai) * si;
                        const Eigen::Index c = b + (bj - aj) * sj;
                        const Eigen::Index d = a + (bj - aj) * sj;
                        const double sum = (game.payoff(i, b) - game.payoff(i, a)) +
                                           (game.payoff(j, c) - game.payoff(j, b)) +
                                           (game.payoff(i, d) - game.payoff(i, c)) +
                                           (game.payoff(j, a) - game.payoff(j, d));
                        if (std::abs(sum) > kPayoffTol * scale) {
                            out.cycle = {game.joint_action(a), game.joint_action(b), game.joint_action(c),
                                         game.joint_action(d)};
                            out.cycle_sum = sum;
                            return;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

Eigen::VectorXd action_values(const NormalFormGame& game, const BeliefProfile& profile, int player) {
    check_profile(game, profile, player);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(game.num_actions(player));
    const Eigen::VectorXd& r = game.payoffs(player);
    for (Eigen::Index a = 0; a < game.num_joint_actions(); ++a) {
        double weight = 1.0;
        for (int j = 0; j < game.num_players() && weight != 0.0; ++j)
            if (j != player) weight *= profile[static_cast<std::size_t>(j)][game.action_of(a, j)];
        if (weight != 0.0) values[game.action_of(a, player)] += weight * r[a];
    }
    return values;
}

double expected_reward(const NormalFormGame& game, const BeliefProfile& profile, int player) {
    return profile.at(static_cast<std::size_t>(player)).dot(action_values(game, profile, player));
}

std::vector<int> best_response(const NormalFormGame& game, int player, const BeliefProfile& others) {
    return delta_best_response(game, player, others, 0.0);
}

std::vector<int> delta_best_response(const NormalFormGame& game, int player, const BeliefProfile& others,
                                     double delta) {
    if (!(delta >= 0.0)) throw ArgumentError("delta must be nonnegative");
    const Eigen::VectorXd values = action_values(game, others, player);
    const double best = values.maxCoeff();
    std::vector<int> out;
    for (Eigen::Index a = 0; a < values.size(); ++a)
        if (values[a] >= best - delta - kPayoffTol) out.push_back(static_cast<int>(a));
    return out;
}

MixedStrategy epsilon_best_response(const NormalFormGame& game, int player, const BeliefProfile& others,
                                    double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ArgumentError("eps must lie in [0,1]");
    const auto br = best_response(game, player, others);
    const int n = game.num_actions(player);
    const int nb = static_cast<int>(br.size());
    if (eps > 0.0 && nb == n)
        throw ArgumentError("epsilon best response undefined: every action is a best response");
    MixedStrategy s = MixedStrategy::Constant(n, nb == n ? 0.0 : eps / (n - nb));
    for (int a : br) s[a] = (1.0 - eps) / nb;
    return s;
}

std::vector<PureEquilibrium> pure_nash(const NormalFormGame& game) {
    std::vector<PureEquilibrium> out;
    for (Eigen::Index a = 0; a < game.num_joint_actions(); ++a) {
        bool nash = true;
        bool strict = true;
        for (int i = 0; i < game.num_players() && nash; ++i) {
            const int ai = game.action_of(a, i);
            const double here = game.payoff(i, a);
            for (int d = 0; d < game.num_actions(i); ++d) {
                if (d == ai) continue;
                const double there = game.payoff(i, a + (d - ai) * game.stride(i));
                if (there > here + kPayoffTol) {
                    nash = false;
                    break;
                }
                if (there >= here - kPayoffTol) strict = false;
            }
        }
        if (nash) out.push_back({game.joint_action(a), strict});
    }
    return out;
}

double max_deviation_gain(const NormalFormGame& game, const BeliefProfile& profile) {
    double gain = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < game.num_players(); ++i) {
        const Eigen::VectorXd values = action_values(game, profile, i);
        gain = std::max(gain, values.maxCoeff() - profile[static_cast<std::size_t>(i)].dot(values));
    }
    return gain;
}

bool is_nash(const NormalFormGame& game, const BeliefProfile& profile, double tol) {
    if (!(tol >= 0.0)) throw ArgumentError("tol must be nonnegative");
    return max_deviation_gain(game, profile) <= tol;
}

PotentialResult potential_reconstruct(const NormalFormGame& game) {
    const Eigen::Index n = game.num_joint_actions();
    Eigen::VectorXd P(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        // walk from the all-zeros profile, switching players on in index order
        double value = 0.0;
        Eigen::Index prefix = 0;
        for (int k = 0; k < game.num_players(); ++k) {
            const int ak = game.action_of(a, k);
            const Eigen::Index next = prefix + ak * game.stride(k);
            value += game.payoff(k, next) - game.payoff(k, prefix);
            prefix = next;
        }
        P[a] = value;
    }

    const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    for (Eigen::Index a = 0; a < n; ++a) {
        for (int i = 0; i < game.num_players(); ++i) {
            const int ai = game.action_of(a, i);
            for (int d = ai + 1; d < game.num_actions(i); ++d) {
                const Eigen::Index b = a + (d - ai) * game.stride(i);
                const double dr = game.payoff(i, a) - game.payoff(i, b);
                const double dp = P[a] - P[b];
                if (std::abs(dr - dp) > kPayoffTol * scale) {
                    NotPotential failure{i, game.joint_action(a), game.joint_action(b), dr, dp, {}, 0.0};
                    find_nonzero_cycle(game, scale, failure);
                    return failure;
                }
            }
        }
    }
    return PotentialFunction{std::move(P)};
}

PDominanceReport min_p_dominance(const NormalFormGame& game, std::span<const int> equilibrium) {
    const Eigen::Index star = game.joint_index(equilibrium);
    for (int i = 0; i < game.num_players(); ++i) {
        const int ai = equilibrium[static_cast<std::size_t>(i)];
        for (int d = 0; d < game.num_actions(i); ++d)
            if (game.payoff(i, star + (d - ai) * game.stride(i)) > game.payoff(i, star) + kPayoffTol)
                throw ArgumentError("min_p_dominance requires a pure Nash equilibrium");
    }

    struct Candidate {
        double p;
        BindingConstraint where;
    };
    std::vector<Candidate> candidates;
    for (int i = 0; i < game.num_players(); ++i) {
        const int ai = equilibrium[static_cast<std::size_t>(i)];
        const Eigen::Index si = game.stride(i);
        for (int d = 0; d < game.num_actions(i); ++d) {
            if (d == ai) continue;
            const double gap_star = game.payoff(i, star) - game.payoff(i, star + (d - ai) * si);
            // opponent vertices: every joint action with player i at its equilibrium action
            for (Eigen::Index v = 0; v < game.num_joint_actions(); ++v) {
                if (v == star || game.action_of(v, i) != ai) continue;
                const double gap_v = game.payoff(i, v) - game.payoff(i, v + (d - ai) * si);
                double p = 0.0;
                if (gap_v < -kPayoffTol) p = std::clamp(-gap_v / (gap_star - gap_v), 0.0, 1.0);
                candidates.push_back({p, {i, d, game.joint_action(v)}});
            }
        }
    }

    PDominanceReport report;
    report.equilibrium.assign(equilibrium.begin(), equilibrium.end());
    for (const auto& c : candidates) report.min_p = std::max(report.min_p, c.p);
    if (report.min_p > 0.0)
        for (const auto& c : candidates)
            if (c.p >= report.min_p - 1e-12) report.binding_constraints.push_back(c.where);
    return report;
}

double gwfp_noise_threshold(double p, int num_players) {
    if (num_players < 2) throw ArgumentError("noise threshold needs at least two players");
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("p must lie in [0,1]");
    return 1.0 - std::pow(p, 1.0 / (num_players - 1));
}

}  // namespace ffp
