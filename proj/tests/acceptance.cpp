// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: acceptance --cli <path-to-ffp-binary>

#include "ffp/environments.hpp"
#include "ffp/experiment.hpp"
#include "ffp/learning.hpp"
#include "ffp/lffp.hpp"
#include "oracles.hpp"
#include "properties.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace ffp;
namespace fs = std::filesystem;

namespace {

struct Report {
    int failed = 0;
    void line(int id, bool ok, const std::string& detail) {
        std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
        failed += ok ? 0 : 1;
    }
};

std::string fmt(double v, int digits = 1) {
    std::ostringstream o;
    o.precision(digits);
    o << std::fixed << v;
    return o.str();
}

// pct_converged per (algo, eps) from an aggregate table
std::map<std::pair<std::string, double>, double> metric(const std::vector<AggregateRow>& agg, const std::string& name) {
    std::map<std::pair<std::string, double>, double> m;
    for (const auto& a : agg)
        if (a.metric == name) m[{a.algo, std::round(a.eps * 1000) / 1000}] = a.value;
    return m;
}

bool uav_sweep(std::string& detail) {
    const auto result = sweep_matrix(default_matrix_sweep());
    const auto pct = metric(result.aggregate, "pct_converged");
    bool ok = true;
    double sum_ffp = 0, sum_gwfp = 0;
    int cells = 0;
    for (const auto& [key, value] : pct) {
        const auto& [algo, eps] = key;
        if (algo == "gwfp") {
            sum_gwfp += value;
            ++cells;
            if (eps <= 0.1 + 1e-9) ok &= value >= 96;
            if (eps >= 0.3 - 1e-9) ok &= value <= 10;
        } else {
            sum_ffp += value;
            if (eps <= 0.3 + 1e-9) ok &= value >= 90;
            if (eps >= 0.5 - 1e-9) ok &= value <= 50;
        }
    }
    const double gap = (sum_ffp - sum_gwfp) / cells;
    ok &= gap >= 25;
    std::ostringstream o;
    o << "FFP mean " << fmt(sum_ffp / cells) << "%, GWFP mean " << fmt(sum_gwfp / cells) << "%, gap " << fmt(gap)
      << " [";
    for (const auto& [key, value] : pct) o << ' ' << key.first << '@' << fmt(key.second, 2) << '=' << fmt(value, 0);
    o << " ]";
    detail = o.str();
    return ok;
}

MixedStrategy two(double a, double b) {
    MixedStrategy s(2);
    s << a, b;
    return s;
}

int basin_converged(const NormalFormGame& g, double eps, int seeds) {
    FpOptions start;
    start.initial_beliefs = {{two(0.5, 0.5), two(0.95, 0.05)}, {two(0.05, 0.95), two(0.5, 0.5)}};
    int count = 0;
    for (int s = 0; s < seeds; ++s)
        count += run_fp(g, eps, {FilterKind::identity, eps}, {0.0, 0.8}, 10000, 1000 + static_cast<std::uint64_t>(s), start)
                     .verdict.converged();
    return count;
}

bool threshold_property(std::string& detail) {
    bool ok = true;
    std::ostringstream o;
    for (const std::string name : {"uav", "anticoordination"}) {
        const auto g = resolve_game(name);
        const JointAction eq{1, 0};
        const double p = min_p_dominance(g, eq).min_p;
        const double grid = oracle::min_p_grid(g, eq);
        const double threshold = gwfp_noise_threshold(p, 2);
        const int below = basin_converged(g, threshold - 0.05, 100);
        const int above = basin_converged(g, threshold + 0.05, 100);
        ok &= std::abs(p - grid) <= 2e-3 && below > 90 && above < 10;
        o << name << ": p=" << fmt(p, 4) << " grid=" << fmt(grid, 4) << " threshold=" << fmt(threshold, 4) << " -> "
          << below << "% at " << fmt(threshold - 0.05, 3) << ", " << above << "% at " << fmt(threshold + 0.05, 3) << "; ";
    }
    detail = o.str();
    return ok;
}

bool precision(std::string& detail) {
    Eigen::VectorXd r0 = Eigen::VectorXd::Zero(4), r1(4);
    r1 << 1, 0, 1, 0;
    const NormalFormGame g({2, 2}, {r0, r1});
    const auto bayes = run_fp(g, 0.3, {FilterKind::bayes, 0.3}, {0.0, 0.7}, 10000, 8);
    const auto naive = run_fp(g, 0.3, {FilterKind::identity, 0.3}, {0.0, 1.0}, 10000, 8);
    const double pb = precision_estimate(bayes, 0, 1, 2), pn = precision_estimate(naive, 0, 1, 2);
    const auto a = filter_posterior({FilterKind::bayes, 0.2}, two(0.5, 0.5), 0);
    const auto b = filter_posterior({FilterKind::bayes, 0.2}, two(0.9, 0.1), 1);
    const double err = std::max({std::abs(a[0] - 0.8), std::abs(a[1] - 0.2), std::abs(b[0] - 9.0 / 13),
                                 std::abs(b[1] - 4.0 / 13)});
    std::ostringstream o;
    o << "bayes gap " << fmt(pb, 4) << ", identity gap " << fmt(pn, 4) << ", exact posterior error " << err;
    detail = o.str();
    return pb <= 0.05 && std::abs(pn - 0.3) <= 0.02 && err <= 1e-12;
}

Posg random_fixture(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pay(-3, 5), next(0, 2);
    std::vector<NormalFormGame> stages;
    std::vector<std::vector<int>> transitions;
    for (int s = 0; s < 3; ++s) {
        Eigen::VectorXd r0(4), r1(4);
        for (int k = 0; k < 4; ++k) {
            r0[k] = pay(rng);
            r1[k] = pay(rng);
        }
        stages.emplace_back(std::vector<int>{2, 2}, std::vector<Eigen::VectorXd>{r0, r1});
        transitions.push_back({next(rng), next(rng), next(rng), next(rng)});
    }
    return Posg(std::move(stages), std::move(transitions), 0.8, 0);
}

bool oracles(std::string& detail) {
    std::mt19937_64 rng(20240);
    int mismatches = 0, equilibria = 0;
    for (int k = 0; k < 200; ++k) {
        const auto g = k % 2 ? oracle::random_game(rng) : oracle::random_potential_game(rng);
        auto expected = oracle::pure_nash(g);
        std::sort(expected.begin(), expected.end());
        const auto got = pure_nash(g);
        if (got.size() != expected.size()) {
            ++mismatches;
            continue;
        }
        for (std::size_t e = 0; e < got.size(); ++e) {
            ++equilibria;
            if (got[e].actions != expected[e].actions || got[e].strict != expected[e].strict) ++mismatches;
            if (std::abs(min_p_dominance(g, got[e].actions).min_p - oracle::min_p_grid(g, got[e].actions)) > 2e-3)
                ++mismatches;
        }
        if (std::holds_alternative<PotentialFunction>(potential_reconstruct(g)) != oracle::is_potential_game(g))
            ++mismatches;
    }
    int dp_checks = 0, dp_mismatches = 0;
    for (int k = 0; k < 21; ++k) {
        const Posg posg = k == 0 ? toy_posg() : random_fixture(rng);
        std::vector<int> opp(static_cast<std::size_t>(posg.num_states()));
        for (auto& o : opp) o = static_cast<int>(rng() % 2);
        for (int player = 0; player < 2; ++player) {
            PerStateBeliefs beliefs = uniform_per_state(posg);
            for (int s = 0; s < posg.num_states(); ++s)
                beliefs[static_cast<std::size_t>(s)][static_cast<std::size_t>(1 - player)] =
                    pure_strategy(2, opp[static_cast<std::size_t>(s)]);
            for (int depth = 1; depth <= 4; ++depth) {
                LffpConfig c;
                c.depth = depth;
                c.xi0 = 0.0;
                SeededRng draw(static_cast<std::uint64_t>(k));
                for (int s = 0; s < posg.num_states(); ++s) {
                    ++dp_checks;
                    const int a = select_action(posg, player, point_belief(posg, s), beliefs, c, 1, draw);
                    Lookahead search(posg, player, c);
                    const auto d = search.select(point_belief(posg, s), beliefs, 1, draw);
                    const double want = oracle::dp_value(posg, player, opp, depth, s);
                    if (!oracle::dp_root_actions(posg, player, opp, depth, s).count(a) ||
                        std::abs(d.root_values.maxCoeff() - want) > 1e-9 * std::max(1.0, std::abs(want)))
                        ++dp_mismatches;
                }
            }
        }
    }
    detail = "200 games, " + std::to_string(equilibria) + " equilibria, " + std::to_string(mismatches) +
             " mismatches; " + std::to_string(dp_checks) + " lookahead checks, " + std::to_string(dp_mismatches) +
             " mismatches";
    return mismatches == 0 && dp_mismatches == 0;
}

bool box_pushing(std::string& detail) {
    const auto result = sweep_posg(default_posg_sweep());
    std::map<std::pair<std::string, double>, std::map<std::uint64_t, double>> rewards;
    for (const auto& r : result.rows) {
        if (!r.error.empty()) {
            detail = "run failed: " + r.error;
            return false;
        }
        rewards[{r.algo, std::round(r.eps * 1000) / 1000}][r.seed] = r.mean_episode_reward;
    }
    auto mean = [](const std::map<std::uint64_t, double>& m) {
        double s = 0;
        for (const auto& [seed, v] : m) s += v;
        return s / static_cast<double>(m.size());
    };
    // one-sided paired t critical values at 95%, indexed by degrees of freedom
    auto t_critical = [](int df) {
        static const double table[] = {0,     6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860, 1.833, 1.812,
                                       1.796, 1.782, 1.771, 1.761, 1.753, 1.746, 1.740, 1.734, 1.729, 1.725};
        return df <= 20 ? table[df] : 1.645;
    };
    bool ok = true;
    std::ostringstream o;
    for (double eps : {0.1, 0.2, 0.3}) {
        const auto& l = rewards[{"lffp", eps}];
        const auto& g = rewards[{"lgwfp", eps}];
        std::vector<double> diff;
        for (const auto& [seed, v] : l)
            if (g.count(seed)) diff.push_back(v - g.at(seed));
        const int n = static_cast<int>(diff.size());
        double m = 0, ss = 0;
        for (double d : diff) m += d;
        m /= n;
        for (double d : diff) ss += (d - m) * (d - m);
        const double se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
        const bool significant = m > 0 && (se == 0.0 || m / se > t_critical(n - 1));
        ok &= n >= 2 && significant;
        o << "eps " << eps << ": lffp " << fmt(mean(l)) << " vs lgwfp " << fmt(mean(g)) << " (t="
          << (se > 0 ? fmt(m / se, 2) : std::string("inf")) << "); ";
    }
    const double l0 = mean(rewards[{"lffp", 0.0}]), g0 = mean(rewards[{"lgwfp", 0.0}]);
    const double g2 = mean(rewards[{"lgwfp", 0.2}]), l3 = mean(rewards[{"lffp", 0.3}]);
    ok &= g2 < 0.5 * g0 && l3 >= 0.7 * l0;
    o << "lgwfp retains " << fmt(100 * g2 / g0) << "% at 0.2, lffp retains " << fmt(100 * l3 / l0) << "% at 0.3";
    detail = o.str();
    return ok;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool determinism(const std::string& cli, std::string& detail) {
    if (cli.empty()) {
        detail = "no --cli path given";
        return false;
    }
    const fs::path root = fs::temp_directory_path() / "ffp_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream(root / "matrix.json") << R"({"seeds": 12, "iterations": 3000})";
        std::ofstream(root / "posg.json") << R"({"env": "toy", "seeds": 6, "steps": 2000, "horizon": 20})";
    }
    bool ok = true;
    std::ostringstream o;
    for (const std::string kind : {"matrix", "posg"}) {
        std::string first;
        for (int workers : {1, 3, 1}) {
            const fs::path out = root / (kind + std::to_string(workers) + (first.empty() ? "a" : "b"));
            const std::string cmd = "\"" + cli + "\" --config \"" + (root / (kind + ".json")).string() +
                                    "\" --workers " + std::to_string(workers) + " --out \"" + out.string() +
                                    "\" sweep-" + kind + " > /dev/null";
            if (std::system(cmd.c_str()) != 0) {
                detail = "command failed: " + cmd;
                return false;
            }
            const std::string rows = slurp(out / "rows.csv");
            if (first.empty()) first = rows;
            ok &= !rows.empty() && rows == first;
        }
        o << kind << " rows.csv identical across workers 1/3/1: " << (ok ? "yes" : "no") << "; ";
    }
    fs::remove_all(root);
    detail = o.str();
    return ok;
}

bool properties(std::string& detail) {
    const props::Outcome all[] = {props::simplex_preservation(101, 1000), props::epsilon_best_response_bound(102, 1000),
                                  props::potential_maxima_are_equilibria(103, 1000),
                                  props::optimistic_dominance(104, 1000), props::likelihood_rows(105, 1000)};
    const char* names[] = {"simplex", "eps-BR bound", "potential maxima", "v_opt>=v_star", "likelihood rows"};
    bool ok = true;
    std::ostringstream o;
    for (int k = 0; k < 5; ++k) {
        ok &= all[k].passed(1000);
        o << names[k] << " " << all[k].cases - all[k].failures << "/" << all[k].cases << "; ";
    }
    detail = o.str();
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc)
            cli = argv[++i];
        else
            only.push_back(std::atoi(argv[i]));
    }
    auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    Report report;
    std::string detail;
    if (wanted(1)) report.line(1, uav_sweep(detail), detail);
    if (wanted(2)) report.line(2, threshold_property(detail), detail);
    if (wanted(3)) report.line(3, precision(detail), detail);
    if (wanted(4)) report.line(4, oracles(detail), detail);
    if (wanted(5)) report.line(5, box_pushing(detail), detail);
    if (wanted(6)) report.line(6, determinism(cli, detail), detail);
    if (wanted(7)) report.line(7, properties(detail), detail);
    return report.failed == 0 ? 0 : 1;
}
