// Batch front-end: run scenarios, compare planner modes across speed sweeps,
// train the fuzzy Q-learning tuner, export metrics/trajectories/SVG.
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "orcafl/controllers.hpp"
#include "orcafl/fis_json.hpp"
#include "orcafl/report.hpp"
#include "orcafl/scenario.hpp"
#include "orcafl/sim.hpp"
#include "orcafl/svg.hpp"
#include "orcafl/tune.hpp"

namespace {

using namespace orcafl;

int log_level() {
    static const int level = [] {
        const char* v = std::getenv("ORCAFL_LOG");
        if (v == nullptr) {
            return 0;
        }
        const std::string s(v);
        if (s == "debug" || s == "2") {
            return 2;
        }
        if (s == "info" || s == "1") {
            return 1;
        }
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) {
        std::fprintf(stderr, "[orcafl] %s\n", msg.c_str());
    }
}

struct ExitError {
    int code;
    std::string message;
};

struct CommonOptions {
    std::string scenario = "circle";
    std::string mode = "orca";
    double vmax = 10.0;
    double dt = 0.1;
    double tau = 2.0;
    double acc_max = 20.0;
    double sensor_range = 15.0;
    int max_steps = 2000;
    std::uint64_t seed = 0;
    std::string flc1_path;
    std::string flc2_path;
    bool no_goal_snap = false;
    int workers = 1;
    bool print_config = false;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--scenario", opt.scenario,
                    "built-in scenario name or scenario file path");
    cmd->add_option("--mode", opt.mode, "planner mode: orca or orca-fl");
    cmd->add_option("--vmax", opt.vmax, "agent max speed override (m/s)");
    cmd->add_option("--dt", opt.dt, "step length (s)")->default_val(0.1);
    cmd->add_option("--tau", opt.tau, "planning horizon (s)")->default_val(2.0);
    cmd->add_option("--acc-max", opt.acc_max, "agent max acceleration override (m/s^2)")
        ->default_val(20.0);
    cmd->add_option("--sensor-range", opt.sensor_range, "sensing radius (m)")
        ->default_val(15.0);
    cmd->add_option("--max-steps", opt.max_steps, "step budget per run")->default_val(2000);
    cmd->add_option("--seed", opt.seed, "run seed (recorded; drives jitter/training)");
    cmd->add_option("--flc1", opt.flc1_path, "FIS file overriding the built-in FLC1");
    cmd->add_option("--flc2", opt.flc2_path, "FIS file overriding the built-in FLC2");
    cmd->add_flag("--no-goal-snap", opt.no_goal_snap,
                  "disable the goal snap (reproduces goal oscillation)");
    cmd->add_option("--workers", opt.workers, "planning worker threads")->default_val(1);
    cmd->add_flag("--print-config", opt.print_config, "dump the resolved configuration");
}

Scenario resolve_scenario(const std::string& ref) {
    for (const auto& name : scenario_names()) {
        if (ref == name) {
            return scenario_by_name(ref);
        }
    }
    if (!std::filesystem::exists(ref)) {
        throw ExitError{2, "scenario not found: '" + ref +
                               "' is neither a built-in name nor an existing file"};
    }
    return load_scenario(ref);
}

SimConfig make_sim_config(const CommonOptions& opt) {
    SimConfig cfg;
    cfg.dt = opt.dt;
    cfg.tau = opt.tau;
    cfg.max_steps = opt.max_steps;
    cfg.sensor_range = opt.sensor_range;
    cfg.seed = opt.seed;
    cfg.mode = parse_mode(opt.mode);
    cfg.goal_snap = !opt.no_goal_snap;
    cfg.workers = opt.workers;
    return cfg;
}

struct Controllers {
    fis::FuzzyInferenceSystem flc1;
    fis::FuzzyInferenceSystem flc2;
};

Controllers load_controllers(const CommonOptions& opt) {
    return {opt.flc1_path.empty() ? fis::build_flc1() : fis::parse_fis_file(opt.flc1_path),
            opt.flc2_path.empty() ? fis::build_flc2() : fis::parse_fis_file(opt.flc2_path)};
}

void write_file_or_fail(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw ExitError{2, "cannot write output file: " + path.string()};
    }
    out << content;
}

void dump_config(const CommonOptions& opt, const Scenario& scenario) {
    nlohmann::json j;
    j["scenario"] = opt.scenario;
    j["scenario_name"] = scenario.name;
    j["mode"] = opt.mode;
    j["vmax"] = opt.vmax;
    j["dt"] = opt.dt;
    j["tau"] = opt.tau;
    j["acc_max"] = opt.acc_max;
    j["sensor_range"] = opt.sensor_range;
    j["max_steps"] = opt.max_steps;
    j["seed"] = opt.seed;
    j["flc1"] = opt.flc1_path.empty() ? "built-in" : opt.flc1_path;
    j["flc2"] = opt.flc2_path.empty() ? "built-in" : opt.flc2_path;
    j["goal_snap"] = !opt.no_goal_snap;
    j["workers"] = opt.workers;
    std::cout << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
    CommonOptions common;
    std::string metrics_out;
    std::string traj_out;
    std::string svg_out;
};

int cmd_run(const RunOptions& opt, const CLI::App* cmd) {
    Scenario scenario = resolve_scenario(opt.common.scenario);
    // Precedence: explicit flags > scenario file values > built-in defaults.
    if (cmd->count("--vmax") > 0 || cmd->count("--acc-max") > 0) {
        double vmax = opt.common.vmax;
        double acc = opt.common.acc_max;
        if (cmd->count("--vmax") == 0) {
            vmax = scenario.entities.front().v_max;
        }
        if (cmd->count("--acc-max") == 0) {
            acc = scenario.entities.front().acc_max;
        }
        apply_speed_limits(scenario, vmax, acc);
    }
    if (opt.common.print_config) {
        dump_config(opt.common, scenario);
    }
    const SimConfig cfg = make_sim_config(opt.common);
    const Controllers flc = load_controllers(opt.common);

    log_info("running scenario '" + scenario.name + "' in mode " + opt.common.mode);
    const RunResult result = run(scenario, cfg, &flc.flc1, &flc.flc2);
    log_info("finished in " + std::to_string(result.metrics.num_steps) + " steps, " +
             std::to_string(result.metrics.num_collisions) + " collisions");

    const std::string csv =
        std::string(kMetricsCsvHeader) + "\n" +
        metrics_csv_row(scenario.name, cfg.mode, opt.common.vmax,
                        std::to_string(opt.common.seed), result.metrics) +
        "\n";
    if (opt.metrics_out.empty()) {
        std::cout << csv;
    } else {
        write_file_or_fail(opt.metrics_out, csv);
    }
    if (!opt.traj_out.empty()) {
        write_file_or_fail(opt.traj_out, trajectory_jsonl(result.trajectory));
    }
    if (!opt.svg_out.empty()) {
        write_file_or_fail(opt.svg_out, render_svg(scenario, result.trajectory));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareOptions {
    CommonOptions common;
    std::vector<std::string> scenarios;
    std::vector<std::string> modes{"orca", "orca-fl"};
    std::vector<double> vmaxes{10.0};
    int num_seeds = 1;
    double jitter = 0.5;
    std::string out;
};

struct Cell {
    std::string scenario;
    PlannerMode mode = PlannerMode::Orca;
    double vmax = 0.0;
    std::uint64_t seed = 0;
    Metrics metrics;
    bool failed = false;
    std::string error;
};

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) {
        return 0.0;
    }
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

int cmd_compare(const CompareOptions& opt) {
    const Controllers flc = load_controllers(opt.common);
    std::vector<Cell> cells;
    for (const auto& scenario : opt.scenarios) {
        for (const auto& mode : opt.modes) {
            for (double vmax : opt.vmaxes) {
                for (int s = 1; s <= opt.num_seeds; ++s) {
                    Cell c;
                    c.scenario = scenario;
                    c.mode = parse_mode(mode);
                    c.vmax = vmax;
                    c.seed = std::uint64_t(s);
                    cells.push_back(c);
                }
            }
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            Cell& c = cells[i];
            try {
                Scenario scenario = resolve_scenario(c.scenario);
                apply_speed_limits(scenario, c.vmax, opt.common.acc_max);
                if (opt.jitter > 0.0) {
                    jitter_starts(scenario, c.seed, opt.jitter);
                }
                SimConfig cfg = make_sim_config(opt.common);
                cfg.mode = c.mode;
                cfg.seed = c.seed;
                cfg.workers = 1;  // cells parallelize instead
                c.metrics = run(scenario, cfg, &flc.flc1, &flc.flc2).metrics;
            } catch (const std::exception& e) {
                c.failed = true;
                c.error = e.what();
            }
        }
    };
    const int workers = std::max(1, opt.common.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::string csv = std::string(kMetricsCsvHeader) + "\n";
    for (const auto& c : cells) {
        if (c.failed) {
            log_info("cell failed (" + c.scenario + ", seed " + std::to_string(c.seed) +
                     "): " + c.error);
            continue;
        }
        csv += metrics_csv_row(c.scenario, c.mode, c.vmax, std::to_string(c.seed),
                               c.metrics) +
               "\n";
    }
    // Median summary rows per (scenario, mode, vmax) block.
    for (const auto& scenario : opt.scenarios) {
        for (const auto& mode : opt.modes) {
            for (double vmax : opt.vmaxes) {
                std::vector<double> steps;
                std::vector<double> collisions;
                std::vector<double> walls;
                Metrics sample;
                bool all_converged = true;
                bool any = false;
                for (const auto& c : cells) {
                    if (c.failed || c.scenario != scenario || c.vmax != vmax ||
                        c.mode != parse_mode(mode)) {
                        continue;
                    }
                    any = true;
                    sample = c.metrics;
                    steps.push_back(double(c.metrics.num_steps));
                    collisions.push_back(double(c.metrics.num_collisions));
                    walls.push_back(c.metrics.wall_elapsed);
                    all_converged = all_converged && c.metrics.converged;
                }
                if (!any) {
                    continue;
                }
                Metrics m = sample;
                m.num_steps = int(median(steps));
                m.sim_elapsed = median(steps) * opt.common.dt;
                m.wall_elapsed = median(walls);
                m.num_collisions = int(median(collisions));
                m.converged = all_converged;
                csv += metrics_csv_row(scenario, parse_mode(mode), vmax, "median", m) + "\n";
            }
        }
    }

    if (opt.out.empty()) {
        std::cout << csv;
    } else {
        write_file_or_fail(opt.out, csv);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// tune

struct TuneOptions {
    CommonOptions common;
    std::string which = "flc1";
    std::string out;
    int episodes = 20;
    int horizon = 400;
    double eta = 0.1;
    double gamma = 0.9;
    double lambda = 0.0;
    double epsilon = 0.1;
    bool every_episode = false;
};

int cmd_tune(const TuneOptions& opt, const CLI::App* cmd) {
    Scenario scenario = resolve_scenario(opt.common.scenario);
    if (cmd->count("--vmax") > 0) {
        apply_speed_limits(scenario, opt.common.vmax, opt.common.acc_max);
    }
    SimConfig cfg = make_sim_config(opt.common);
    cfg.mode = PlannerMode::OrcaFl;

    fql::FQLConfig fcfg;
    fcfg.eta = opt.eta;
    fcfg.gamma = opt.gamma;
    fcfg.lambda = opt.lambda;
    fcfg.epsilon = opt.epsilon;
    fcfg.episodes = opt.episodes;
    fcfg.horizon = opt.horizon;
    fcfg.gated_replay = !opt.every_episode;
    fcfg.seed = opt.common.seed;

    const Controllers flc = load_controllers(opt.common);
    const TunedController which =
        opt.which == "flc2" ? TunedController::Flc2 : TunedController::Flc1;

    log_info("tuning " + opt.which + " on '" + scenario.name + "' for " +
             std::to_string(opt.episodes) + " episodes");
    const TuneResult result = tune_flc(scenario, which, flc.flc1, flc.flc2, cfg, fcfg);
    fis::write_fis_file(result.tuned, opt.out);

    double best = 0.0;
    double last = 0.0;
    if (!result.episode_returns.empty()) {
        best = *std::max_element(result.episode_returns.begin(),
                                 result.episode_returns.end());
        last = result.episode_returns.back();
    }
    std::printf("episodes,%zu\nfirst_return,%g\nbest_return,%g\nlast_return,%g\n",
                result.episode_returns.size(),
                result.episode_returns.empty() ? 0.0 : result.episode_returns.front(), best,
                last);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-agent local collision avoidance: orca / orca-fl batch runner"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run_cmd = app.add_subcommand("run", "run one scenario and export results");
    add_common_options(run_cmd, run_opt.common);
    run_cmd->add_option("--metrics-out", run_opt.metrics_out, "metrics CSV path (default stdout)");
    run_cmd->add_option("--traj-out", run_opt.traj_out, "trajectory JSONL path");
    run_cmd->add_option("--svg-out", run_opt.svg_out, "SVG rendering path");

    CompareOptions cmp_opt;
    cmp_opt.scenarios = scenario_names();
    CLI::App* cmp_cmd =
        app.add_subcommand("compare", "run a scenario x mode x vmax x seed grid");
    add_common_options(cmp_cmd, cmp_opt.common);
    cmp_cmd->add_option("--scenarios", cmp_opt.scenarios, "scenario names or files")
        ->delimiter(',');
    cmp_cmd->add_option("--modes", cmp_opt.modes, "modes to compare")->delimiter(',');
    cmp_cmd->add_option("--vmax-list", cmp_opt.vmaxes, "vmax sweep values")->delimiter(',');
    cmp_cmd->add_option("--seeds", cmp_opt.num_seeds, "number of seeds (1..N)");
    cmp_cmd->add_option("--jitter", cmp_opt.jitter,
                        "seeded start jitter magnitude in meters (0 disables)");
    cmp_cmd->add_option("--out", cmp_opt.out, "comparison CSV path (default stdout)");

    TuneOptions tune_opt;
    CLI::App* tune_cmd =
        app.add_subcommand("tune", "learn rule consequents by fuzzy Q-learning");
    add_common_options(tune_cmd, tune_opt.common);
    tune_cmd->add_option("--which", tune_opt.which, "flc1 or flc2")
        ->check(CLI::IsMember({"flc1", "flc2"}));
    tune_cmd->add_option("--out", tune_opt.out, "tuned FIS output path")->required();
    tune_cmd->add_option("--episodes", tune_opt.episodes, "training episodes");
    tune_cmd->add_option("--horizon", tune_opt.horizon, "max steps per episode");
    tune_cmd->add_option("--eta", tune_opt.eta, "learning rate");
    tune_cmd->add_option("--gamma", tune_opt.gamma, "discount factor");
    tune_cmd->add_option("--lambda", tune_opt.lambda, "trace decay");
    tune_cmd->add_option("--epsilon", tune_opt.epsilon, "exploration rate");
    tune_cmd->add_flag("--every-episode", tune_opt.every_episode,
                       "update on every episode instead of the improvement gate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return cmd_run(run_opt, run_cmd);
        }
        if (cmp_cmd->parsed()) {
            return cmd_compare(cmp_opt);
        }
        if (tune_cmd->parsed()) {
            return cmd_tune(tune_opt, tune_cmd);
        }
    } catch (const ExitError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.code;
    } catch (const ScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const fis::FisFormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
