// Command-line front end: single runs, epsilon sweeps and game inspection.
#include "ffp/environments.hpp"
#include "ffp/experiment.hpp"
#include "ffp/game.hpp"
#include "ffp/learning.hpp"
#include "ffp/lffp.hpp"
#include "ffp/serialization.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace ffp;
namespace fs = std::filesystem;

ffp::StepSchedule parse_schedule(const std::string& text) {
    std::stringstream ss(text);
    std::string c, rho;
    if (!std::getline(ss, c, ',') || !std::getline(ss, rho)) throw ArgumentError("--schedule expects c,rho");
    return {std::stod(c), std::stod(rho)};
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + (dir / name).string());
    return out;
}

std::string describe_strategy(const MixedStrategy& s) {
    std::ostringstream os;
    for (Eigen::Index a = 0; a < s.size(); ++a) os << (a ? " " : "") << format_number(s[a]);
    return os.str();
}

nlohmann::json env_config_arg(const std::string& value) {
    if (value.empty()) return nlohmann::json::object();
    return nlohmann::json(value);  // a path, loaded by resolve_posg
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fictitious play learners for noisy games and lookahead learning for POSGs"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    int workers = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "run seed, or base seed for sweeps");

    // shared run options
    double eps = 0.0;
    std::optional<double> assumed_eps;
    std::string algo, schedule_text, game_ref = "uav", env = "box", env_config;
    long iters = 10000, steps = 20000, horizon = 100, snapshot_stride = 0;
    int depth = 3;
    double xi0 = 1.0;
    std::string state_mode = "distribution";
    bool record_timing = false;
    std::optional<int> seeds;

    auto* run_matrix = app.add_subcommand("run-matrix", "one repeated-game run");
    run_matrix->add_option("--game", game_ref, "uav | uav-printed | anticoordination | game JSON file");
    run_matrix->add_option("--algo", algo, "gwfp | ffp")->required()->check(CLI::IsMember({"gwfp", "ffp"}));
    run_matrix->add_option("--eps", eps, "true observation noise")->check(CLI::Range(0.0, 1.0));
    run_matrix->add_option("--assumed-eps", assumed_eps, "noise assumed by the filter (default: --eps)");
    run_matrix->add_option("--iters", iters, "iterations");
    run_matrix->add_option("--schedule", schedule_text, "step schedule c,rho (default 0,0.8)");
    run_matrix->add_option("--snapshot-stride", snapshot_stride, "belief snapshot interval (0: none)");

    auto* run_posg = app.add_subcommand("run-posg", "one online POSG run");
    run_posg->add_option("--env", env, "box | toy | file")->check(CLI::IsMember({"box", "toy", "file"}));
    run_posg->add_option("--env-config", env_config, "box pushing config or POSG file (JSON)");
    run_posg->add_option("--algo", algo, "lffp | lgwfp")->required()->check(CLI::IsMember({"lffp", "lgwfp"}));
    run_posg->add_option("--eps", eps, "true observation noise")->check(CLI::Range(0.0, 1.0));
    run_posg->add_option("--assumed-eps", assumed_eps, "noise assumed by the filter (default: --eps)");
    run_posg->add_option("--depth", depth, "lookahead depth");
    run_posg->add_option("--xi0", xi0, "initial optimism weight");
    run_posg->add_option("--steps", steps, "total steps");
    run_posg->add_option("--horizon", horizon, "steps per episode");
    run_posg->add_option("--schedule", schedule_text, "step schedule c,rho (default 0,1)");
    run_posg->add_option("--state-mode", state_mode, "distribution | point")
        ->check(CLI::IsMember({"distribution", "point"}));

    auto* sweep_matrix_cmd = app.add_subcommand("sweep-matrix", "epsilon sweep over a normal-form game");
    auto* sweep_posg_cmd = app.add_subcommand("sweep-posg", "epsilon sweep over a POSG");
    for (auto* sub : {sweep_matrix_cmd, sweep_posg_cmd}) {
        sub->add_option("--seeds", seeds, "seed battery size");
        sub->add_flag("--record-timing", record_timing, "fill the wall_time column");
    }

    auto* show = app.add_subcommand("show-game", "print a game or POSG with its analysis");
    show->add_option("--game", game_ref, "uav | uav-printed | anticoordination | game JSON file");
    auto* show_env = show->add_option("--env", env, "box | toy | file: show a POSG instead")
                         ->check(CLI::IsMember({"box", "toy", "file"}));
    show->add_option("--env-config", env_config, "box pushing config or POSG file (JSON)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_matrix) {
            const NormalFormGame game = resolve_game(game_ref);
            const StepSchedule schedule = schedule_text.empty() ? StepSchedule{0.0, 0.8} : parse_schedule(schedule_text);
            const FilterSpec filter{algo == "ffp" ? FilterKind::bayes : FilterKind::identity, assumed_eps.value_or(eps)};
            FpOptions options;
            options.snapshot_stride = snapshot_stride;
            const RunTrace trace = run_fp(game, eps, filter, schedule, iters, seed.value_or(1), options);
            std::cout << "verdict " << trace.verdict.label() << '\n';
            for (int i = 0; i < game.num_players(); ++i)
                for (int j = 0; j < game.num_players(); ++j)
                    if (i != j)
                        std::cout << "belief " << i << " about " << j << ": "
                                  << describe_strategy(trace.final_beliefs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                                  << '\n';
            if (!out_dir.empty()) {
                auto out = open_output(out_dir, "trace.csv");
                write_trace_csv(out, trace);
            }
            return 0;
        }

        if (*run_posg) {
            const Posg posg = resolve_posg(env, env_config_arg(env_config));
            LffpConfig config;
            config.depth = depth;
            config.xi0 = xi0;
            config.filter = {algo == "lffp" ? FilterKind::bayes : FilterKind::identity, assumed_eps.value_or(eps)};
            if (!schedule_text.empty()) config.schedule = parse_schedule(schedule_text);
            config.state_mode = state_mode == "point" ? StateMode::point : StateMode::distribution;
            const std::uint64_t run_seed = seed.value_or(1);
            const LffpTrace trace = run_lffp(posg, eps, config, steps, horizon, run_seed);
            std::cout << "episodes " << trace.episode_rewards.size() << " final_quartile_reward "
                      << format_number(final_quartile_mean(trace.episode_rewards)) << " tracking_resets "
                      << trace.tracking_resets << '\n';
            if (!out_dir.empty()) {
                auto out = open_output(out_dir, "episodes.csv");
                write_episode_csv(out, trace, eps, algo, run_seed);
            } else {
                write_episode_csv(std::cout, trace, eps, algo, run_seed);
            }
            return 0;
        }

        if (*sweep_matrix_cmd || *sweep_posg_cmd) {
            ExperimentConfig config = *sweep_matrix_cmd ? default_matrix_sweep() : default_posg_sweep();
            if (!config_path.empty()) config = config_from_json(read_json_file(config_path), config);
            config.kind = *sweep_matrix_cmd ? ExperimentKind::matrix_sweep : ExperimentKind::posg_sweep;
            config.workers = workers;
            if (seed) config.base_seed = *seed;
            if (seeds) config.seeds = *seeds;
            if (record_timing) config.record_timing = true;
            const SweepResult result = run_sweep(config);
            emit_outputs(result, out_dir.empty() ? fs::path("results") : fs::path(out_dir));
            write_aggregate_csv(std::cout, result.aggregate);
            return 0;
        }

        if (*show) {
            if (show_env->count() > 0) {
                const Posg posg = resolve_posg(env, env_config_arg(env_config));
                std::cerr << "states " << posg.num_states() << " players " << posg.num_players() << " signals "
                          << posg.num_signals() << '\n';
                std::cout << to_json(posg).dump() << '\n';
                return 0;
            }
            const NormalFormGame game = resolve_game(game_ref);
            std::cout << to_json(game).dump() << '\n';
            for (const auto& ne : pure_nash(game)) {
                std::cout << "pure NE";
                for (int a : ne.actions) std::cout << ' ' << a;
                std::cout << (ne.strict ? " (strict)" : "");
                try {
                    const auto report = min_p_dominance(game, ne.actions);
                    std::cout << " min-p " << format_number(report.min_p) << " noise threshold "
                              << format_number(gwfp_noise_threshold(report.min_p, game.num_players()));
                } catch (const std::exception&) {
                }
                std::cout << '\n';
            }
            const auto potential = potential_reconstruct(game);
            std::cout << (std::holds_alternative<PotentialFunction>(potential) ? "potential game" : "not a potential game")
                      << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
