#pragma once

#include "ffp/environments.hpp"
#include "ffp/learning.hpp"
#include "ffp/lffp.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ffp {

enum class ExperimentKind { matrix_sweep, posg_sweep };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::matrix_sweep;
    /// Matrix sweeps: "uav", "uav-printed", "anticoordination" or a JSON game file.
    std::string game = "uav";
    /// POSG sweeps: "box", "toy" or "file" (then env_config names a POSG file).
    std::string env = "box";
    /// Box pushing overrides (object) or, for env "file", {"path": ...}.
    nlohmann::json env_config = nlohmann::json::object();
    std::vector<std::string> algorithms;
    std::vector<double> eps;
    int seeds = 0;
    std::uint64_t base_seed = 1;
    long iterations = 10000;  ///< matrix sweeps
    long steps = 20000;       ///< POSG sweeps
    long horizon = 100;
    StepSchedule schedule;
    double assumed_eps = -1.0;  ///< negative: learners assume the true eps
    long window = 0;            ///< convergence window; 0 picks the default
    double tol = 0.05;
    LffpConfig lffp;
    int workers = 1;
    bool record_timing = false;
};

/// Defaults for the UAV threshold sweep: eps 0..0.5 in steps of 0.05,
/// 100 seeds, 10^4 iterations, both gwfp and ffp.
ExperimentConfig default_matrix_sweep();

/// Defaults for the box pushing sweep: eps {0, 0.1, 0.2, 0.3}, 20 seeds,
/// 2*10^4 steps of horizon-100 episodes, lffp and lgwfp.
ExperimentConfig default_posg_sweep();

/// Throws ArgumentError on an empty grid, no seeds, no algorithms, eps
/// outside [0,1] or an algorithm that does not match the kind.
void validate(const ExperimentConfig& config);

/// Fields missing from `doc` keep the values of `base`.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base);
nlohmann::json to_json(const ExperimentConfig& config);

NormalFormGame resolve_game(const std::string& ref);
Posg resolve_posg(const std::string& env, const nlohmann::json& env_config);

struct ResultRow {
    std::string algo;
    double eps = 0.0;
    std::uint64_t seed = 0;
    bool converged = false;
    std::string converged_to = "none";
    double mean_episode_reward = 0.0;
    long iterations = 0;
    double wall_time = -1.0;  ///< seconds; negative when not recorded
    std::string error;        ///< empty unless the run failed
};

struct AggregateRow {
    std::string algo;
    double eps = 0.0;
    std::string metric;
    double value = 0.0;
    double two_se = 0.0;
    int n = 0;
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> aggregate;
};

/// One seeded run of a matrix-game learner ("gwfp" or "ffp").
ResultRow matrix_row(const NormalFormGame& game, const ExperimentConfig& config, const std::string& algo, double eps,
                     std::uint64_t seed);

/// One seeded POSG run ("lffp" or "lgwfp"). The reward column is the
/// final-quartile mean episode reward.
ResultRow posg_row(const Posg& posg, const ExperimentConfig& config, const std::string& algo, double eps,
                   std::uint64_t seed);

/// Every (algo, eps, seed) cell, run on `config.workers` threads. Rows come
/// back sorted by (algo, eps, seed). Failed runs are recorded, not thrown.
SweepResult sweep_matrix(const ExperimentConfig& config);
SweepResult sweep_posg(const ExperimentConfig& config);
SweepResult run_sweep(const ExperimentConfig& config);

/// Per (algo, eps): pct_converged and mean_reward with 2*sd/sqrt(n).
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

/// Parses rows.csv as written by write_rows_csv.
std::vector<ResultRow> read_rows_csv(std::istream& in);

/// Writes rows.csv, aggregate.csv and manifest.json under `dir`, creating it
/// if needed. Throws std::ios_base::failure before writing anything when the
/// directory is not writable.
void emit_outputs(const SweepResult& result, const std::filesystem::path& dir);

/// Round-trip decimal formatting shared by every CSV writer.
std::string format_number(double value);

/// Per-episode CSV for a single POSG run.
void write_episode_csv(std::ostream& out, const LffpTrace& trace, double eps, const std::string& algo,
                       std::uint64_t seed);

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace ffp
