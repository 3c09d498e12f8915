#include "ffp/experiment.hpp"

#include "ffp/serialization.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ios>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace ffp {

using nlohmann::json;

ExperimentConfig default_matrix_sweep() {
    ExperimentConfig c;
    c.kind = ExperimentKind::matrix_sweep;
    c.algorithms = {"ffp", "gwfp"};
    for (int k = 0; k <= 10; ++k) c.eps.push_back(0.05 * k);
    c.seeds = 100;
    c.base_seed = 1000;
    c.iterations = 10000;
    c.schedule = {0.0, 0.8};
    return c;
}

ExperimentConfig default_posg_sweep() {
    ExperimentConfig c;
    c.kind = ExperimentKind::posg_sweep;
    c.env = "box";
    c.algorithms = {"lffp", "lgwfp"};
    c.eps = {0.0, 0.1, 0.2, 0.3};
    c.seeds = 20;
    c.base_seed = 1000;
    c.steps = 20000;
    c.horizon = 100;
    c.schedule = {0.0, 0.7};
    c.lffp.depth = 3;
    c.lffp.xi0 = 100.0;
    return c;
}

void validate(const ExperimentConfig& c) {
    if (c.eps.empty()) throw ArgumentError("eps grid is empty");
    for (double e : c.eps)
        if (!(e >= 0.0 && e <= 1.0)) throw ArgumentError("eps grid entries must lie in [0,1]");
    if (c.seeds < 1) throw ArgumentError("seed battery is empty");
    if (c.algorithms.empty()) throw ArgumentError("no algorithms selected");
    if (c.workers < 1) throw ArgumentError("workers must be at least 1");
    for (const auto& a : c.algorithms) {
        const bool ok = c.kind == ExperimentKind::matrix_sweep ? (a == "gwfp" || a == "ffp") : (a == "lffp" || a == "lgwfp");
        if (!ok) throw ArgumentError("algorithm '" + a + "' does not fit this experiment kind");
    }
    if (c.kind == ExperimentKind::matrix_sweep && c.iterations < 1) throw ArgumentError("iterations must be positive");
    if (c.kind == ExperimentKind::posg_sweep) {
        if (c.horizon < 1 || c.steps < c.horizon) throw ArgumentError("need steps >= horizon >= 1");
        validate(c.lffp);
    }
    validate(c.schedule);
    if (c.assumed_eps > 1.0) throw ArgumentError("assumed eps must lie in [0,1]");
}

namespace {

const char* kind_name(ExperimentKind k) { return k == ExperimentKind::matrix_sweep ? "matrix-sweep" : "posg-sweep"; }

template <typename T>
void take(const json& doc, const char* name, T& out) {
    if (doc.contains(name)) out = doc.at(name).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& doc, ExperimentConfig c) {
    if (!doc.is_object()) throw FormatError("experiment config must be an object");
    try {
        if (doc.contains("kind")) {
            const auto k = doc.at("kind").get<std::string>();
            if (k == "matrix-sweep")
                c.kind = ExperimentKind::matrix_sweep;
            else if (k == "posg-sweep")
                c.kind = ExperimentKind::posg_sweep;
            else
                throw FormatError("unknown experiment kind '" + k + "'");
        }
        take(doc, "game", c.game);
        take(doc, "env", c.env);
        take(doc, "env_config", c.env_config);
        take(doc, "algorithms", c.algorithms);
        take(doc, "eps", c.eps);
        if (doc.contains("seeds")) {
            const auto& s = doc.at("seeds");
            if (s.is_object()) {
                take(s, "count", c.seeds);
                take(s, "base", c.base_seed);
            } else {
                c.seeds = s.get<int>();
            }
        }
        take(doc, "base_seed", c.base_seed);
        take(doc, "iterations", c.iterations);
        take(doc, "steps", c.steps);
        take(doc, "horizon", c.horizon);
        if (doc.contains("schedule")) {
            take(doc.at("schedule"), "c", c.schedule.c);
            take(doc.at("schedule"), "rho", c.schedule.rho);
        }
        take(doc, "assumed_eps", c.assumed_eps);
        take(doc, "window", c.window);
        take(doc, "tol", c.tol);
        take(doc, "workers", c.workers);
        take(doc, "record_timing", c.record_timing);
        if (doc.contains("lffp")) {
            const auto& l = doc.at("lffp");
            take(l, "depth", c.lffp.depth);
            take(l, "xi0", c.lffp.xi0);
            if (l.contains("state_mode")) {
                const auto m = l.at("state_mode").get<std::string>();
                if (m != "distribution" && m != "point") throw FormatError("state_mode is 'distribution' or 'point'");
                c.lffp.state_mode = m == "point" ? StateMode::point : StateMode::distribution;
            }
        }
    } catch (const json::exception& e) {
        throw FormatError(e.what());
    }
    return c;
}

json to_json(const ExperimentConfig& c) {
    return {{"kind", kind_name(c.kind)},
            {"game", c.game},
            {"env", c.env},
            {"env_config", c.env_config},
            {"algorithms", c.algorithms},
            {"eps", c.eps},
            {"seeds", {{"count", c.seeds}, {"base", c.base_seed}}},
            {"iterations", c.iterations},
            {"steps", c.steps},
            {"horizon", c.horizon},
            {"schedule", {{"c", c.schedule.c}, {"rho", c.schedule.rho}}},
            {"assumed_eps", c.assumed_eps},
            {"window", c.window},
            {"tol", c.tol},
            {"workers", c.workers},
            {"record_timing", c.record_timing},
            {"lffp",
             {{"depth", c.lffp.depth},
              {"xi0", c.lffp.xi0},
              {"state_mode", c.lffp.state_mode == StateMode::point ? "point" : "distribution"}}}};
}

NormalFormGame resolve_game(const std::string& ref) {
    if (ref == "uav") return uav_game();
    if (ref == "uav-printed") return uav_game(true);
    if (ref == "anticoordination") {
        Eigen::VectorXd row(4), col(4);
        row << 0, 0, 3, -6;
        col << 0, 3, 0, -6;
        return NormalFormGame({2, 2}, {row, col});
    }
    return game_from_json(read_json_file(ref));
}

Posg resolve_posg(const std::string& env, const json& env_config) {
    if (env == "toy") return toy_posg();
    if (env == "box") {
        if (env_config.is_string()) return box_pushing(box_config_from_json(read_json_file(env_config.get<std::string>()))).posg;
        return box_pushing(box_config_from_json(env_config.is_null() ? json::object() : env_config)).posg;
    }
    if (env == "file") {
        if (env_config.is_string()) return posg_from_json(read_json_file(env_config.get<std::string>()));
        if (env_config.is_object() && env_config.contains("path"))
            return posg_from_json(read_json_file(env_config.at("path").get<std::string>()));
        return posg_from_json(env_config);
    }
    throw ArgumentError("unknown environment '" + env + "'");
}

namespace {

double learner_eps(const ExperimentConfig& c, double eps) { return c.assumed_eps >= 0.0 ? c.assumed_eps : eps; }

template <typename Body>
ResultRow timed(const ExperimentConfig& config, const std::string& algo, double eps, std::uint64_t seed, Body&& body) {
    ResultRow row;
    row.algo = algo;
    row.eps = eps;
    row.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(row);
    } catch (const std::exception& e) {
        row.converged = false;
        row.converged_to = "error";
        row.mean_episode_reward = 0.0;
        row.error = e.what();
    }
    if (config.record_timing)
        row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

}  // namespace

ResultRow matrix_row(const NormalFormGame& game, const ExperimentConfig& config, const std::string& algo, double eps,
                     std::uint64_t seed) {
    return timed(config, algo, eps, seed, [&](ResultRow& row) {
        const FilterSpec filter{algo == "ffp" ? FilterKind::bayes : FilterKind::identity, learner_eps(config, eps)};
        FpOptions options;
        options.window = config.window;
        options.tol = config.tol;
        const RunTrace trace = run_fp(game, eps, filter, config.schedule, config.iterations, seed, options);
        row.converged = trace.verdict.converged();
        row.converged_to = trace.verdict.label();
        row.iterations = trace.iterations;
        const long window = config.window > 0 ? std::min(config.window, trace.iterations) : default_window(trace.iterations);
        double total = 0.0;
        JointAction a(static_cast<std::size_t>(game.num_players()));
        for (long t = trace.iterations - window; t < trace.iterations; ++t) {
            for (int j = 0; j < game.num_players(); ++j) a[static_cast<std::size_t>(j)] = trace.true_action(t, j);
            const Eigen::Index joint = game.joint_index(a);
            for (int j = 0; j < game.num_players(); ++j) total += game.payoff(j, joint);
        }
        row.mean_episode_reward = total / (static_cast<double>(window) * game.num_players());
    });
}

ResultRow posg_row(const Posg& posg, const ExperimentConfig& config, const std::string& algo, double eps,
                   std::uint64_t seed) {
    return timed(config, algo, eps, seed, [&](ResultRow& row) {
        LffpConfig lffp = config.lffp;
        lffp.schedule = config.schedule;
        lffp.filter = {algo == "lffp" ? FilterKind::bayes : FilterKind::identity, learner_eps(config, eps)};
        const LffpTrace trace = run_lffp(posg, eps, lffp, config.steps, config.horizon, seed);
        const double mean = final_quartile_mean(trace.episode_rewards);
        const std::size_t n = trace.episode_rewards.size();
        const std::size_t k = std::max<std::size_t>(1, (n + 3) / 4);
        bool stable = true;
        for (std::size_t e = n - k; e < n; ++e)
            if (std::abs(trace.episode_rewards[e] - mean) > 0.1 * std::abs(mean)) stable = false;
        row.converged = stable;
        row.converged_to = stable ? "stable" : "none";
        row.mean_episode_reward = mean;
        row.iterations = trace.total_steps;
    });
}

namespace {

struct Cell3 {
    std::string algo;
    double eps;
    std::uint64_t seed;
};

template <typename RunOne>
std::vector<ResultRow> run_cells(const ExperimentConfig& config, RunOne&& run_one) {
    std::vector<std::string> algos = config.algorithms;
    std::sort(algos.begin(), algos.end());
    algos.erase(std::unique(algos.begin(), algos.end()), algos.end());
    std::vector<double> grid = config.eps;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<Cell3> cells;
    for (const auto& a : algos)
        for (double e : grid)
            for (int k = 0; k < config.seeds; ++k) cells.push_back({a, e, config.base_seed + static_cast<std::uint64_t>(k)});

    std::vector<ResultRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) rows[i] = run_one(cells[i].algo, cells[i].eps, cells[i].seed);
    };
    const int count = std::min<int>(config.workers, static_cast<int>(cells.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < count; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

}  // namespace

SweepResult sweep_matrix(const ExperimentConfig& config) {
    validate(config);
    if (config.kind != ExperimentKind::matrix_sweep) throw ArgumentError("not a matrix sweep");
    const NormalFormGame game = resolve_game(config.game);
    SweepResult result{config, {}, {}};
    result.rows = run_cells(config, [&](const std::string& a, double e, std::uint64_t s) {
        return matrix_row(game, config, a, e, s);
    });
    result.aggregate = aggregate(result.rows);
    return result;
}

SweepResult sweep_posg(const ExperimentConfig& config) {
    validate(config);
    if (config.kind != ExperimentKind::posg_sweep) throw ArgumentError("not a POSG sweep");
    const Posg posg = resolve_posg(config.env, config.env_config);
    SweepResult result{config, {}, {}};
    result.rows = run_cells(config, [&](const std::string& a, double e, std::uint64_t s) {
        return posg_row(posg, config, a, e, s);
    });
    result.aggregate = aggregate(result.rows);
    return result;
}

SweepResult run_sweep(const ExperimentConfig& config) {
    return config.kind == ExperimentKind::matrix_sweep ? sweep_matrix(config) : sweep_posg(config);
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
    std::vector<ResultRow> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(), [](const ResultRow& a, const ResultRow& b) {
        return a.algo != b.algo ? a.algo < b.algo : a.eps < b.eps;
    });
    auto summarize = [](const std::vector<double>& xs) {
        const double n = static_cast<double>(xs.size());
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= n;
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        return std::pair{mean, 2.0 * sd / std::sqrt(n)};
    };

    std::vector<AggregateRow> out;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        std::vector<double> conv, reward;
        while (j < sorted.size() && sorted[j].algo == sorted[i].algo && sorted[j].eps == sorted[i].eps) {
            conv.push_back(sorted[j].converged ? 100.0 : 0.0);
            reward.push_back(sorted[j].mean_episode_reward);
            ++j;
        }
        const int n = static_cast<int>(j - i);
        const auto [pc, pc_se] = summarize(conv);
        const auto [mr, mr_se] = summarize(reward);
        out.push_back({sorted[i].algo, sorted[i].eps, "pct_converged", pc, pc_se, n});
        out.push_back({sorted[i].algo, sorted[i].eps, "mean_reward", mr, mr_se, n});
        i = j;
    }
    return out;
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "algo,eps,seed,converged,converged_to,mean_episode_reward,iterations,wall_time\n";
    for (const auto& r : rows)
        out << r.algo << ',' << format_number(r.eps) << ',' << r.seed << ',' << (r.converged ? 1 : 0) << ','
            << r.converged_to << ',' << format_number(r.mean_episode_reward) << ',' << r.iterations << ','
            << (r.wall_time >= 0.0 ? format_number(r.wall_time) : std::string()) << '\n';
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "algo,eps,metric,value,two_se,n\n";
    for (const auto& r : rows)
        out << r.algo << ',' << format_number(r.eps) << ',' << r.metric << ',' << format_number(r.value) << ','
            << format_number(r.two_se) << ',' << r.n << '\n';
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("bad number '" + s + "'");
    return v;
}

}  // namespace

std::vector<ResultRow> read_rows_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "algo,eps,seed,converged,converged_to,mean_episode_reward,iterations,wall_time")
        throw FormatError("unexpected rows.csv header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 8) throw FormatError("rows.csv line has " + std::to_string(f.size()) + " fields");
        ResultRow r;
        r.algo = f[0];
        r.eps = parse_double(f[1]);
        r.seed = std::stoull(f[2]);
        r.converged = f[3] == "1";
        r.converged_to = f[4];
        r.mean_episode_reward = parse_double(f[5]);
        r.iterations = std::stol(f[6]);
        r.wall_time = f[7].empty() ? -1.0 : parse_double(f[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_outputs(const SweepResult& result, const std::filesystem::path& dir) {
    if (result.rows.empty()) throw ArgumentError("nothing to write");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw std::ios_base::failure("cannot create output directory " + dir.string());
    for (const char* name : {"rows.csv", "aggregate.csv", "manifest.json"}) {
        const auto path = dir / name;
        const bool existed = std::filesystem::exists(path);
        std::ofstream probe(path, std::ios::app);
        if (!probe) throw std::ios_base::failure("cannot write " + path.string());
        probe.close();
        if (!existed) std::filesystem::remove(path);
    }

    auto write = [&](const char* name, auto&& body) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        body(out);
        if (!out) throw std::ios_base::failure(std::string("write failed: ") + name);
    };
    write("rows.csv", [&](std::ostream& o) { write_rows_csv(o, result.rows); });
    write("aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, result.aggregate); });

    json failures = json::array();
    for (const auto& r : result.rows)
        if (!r.error.empty()) failures.push_back({{"algo", r.algo}, {"eps", r.eps}, {"seed", r.seed}, {"error", r.error}});
    json manifest{{"artifact_version", kArtifactVersion},
                  {"base_seed", result.config.base_seed},
                  {"config", to_json(result.config)},
                  {"rows", result.rows.size()},
                  {"failures", failures}};
    if (result.config.kind == ExperimentKind::posg_sweep)
        manifest["notes"] = json::array({"PBPG is not reimplemented; no comparison column is produced."});
    write("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
}

void write_episode_csv(std::ostream& out, const LffpTrace& trace, double eps, const std::string& algo,
                       std::uint64_t seed) {
    out << "episode,steps_elapsed,team_reward,eps,algo,seed\n";
    long elapsed = 0;
    for (std::size_t e = 0; e < trace.episode_rewards.size(); ++e) {
        elapsed += trace.episode_steps[e];
        out << e << ',' << elapsed << ',' << format_number(trace.episode_rewards[e]) << ',' << format_number(eps) << ','
            << algo << ',' << seed << '\n';
    }
}

}  // namespace ffp
