#include "orcafl/tune.hpp"

#include <algorithm>

#include "orcafl/geometry.hpp"

namespace orcafl {

namespace {

using fql::FuzzyQTable;

struct Decision {
    std::vector<double> weights;
    std::vector<int> selections;
    double reward = 0.0;
    std::vector<double> next_alphas;  // empty = terminal for this agent
};

// Decision stream of one agent over one episode.
using AgentEpisode = std::vector<Decision>;

std::vector<double> controller_inputs(TunedController which, const AgentState& self,
                                      const NeighborView& nearest) {
    const AgentState& nb = *nearest.state;
    if (which == TunedController::Flc1) {
        return {distance(self.position, nb.position), norm(nb.velocity), nearest.est_accel};
    }
    return {norm(nb.velocity), nearest.density, nearest.est_accel};
}

void normalize(std::vector<double>& w) {
    double total = 0.0;
    for (double v : w) {
        total += v;
    }
    if (total > 0.0) {
        for (double& v : w) {
            v /= total;
        }
    }
}

std::vector<int> select_conclusions(const FuzzyQTable& table,
                                    std::span<const double> weights, double epsilon,
                                    std::mt19937_64& rng) {
    std::vector<int> sel(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) {
            sel[i] = fql::eep_select(table.q_row(int(i)), epsilon, rng);
        } else {
            const auto row = table.q_row(int(i));
            sel[i] = int(std::max_element(row.begin(), row.end()) - row.begin());
        }
    }
    return sel;
}

struct EpisodeOutcome {
    std::vector<AgentEpisode> per_agent;
    double total_return = 0.0;
};

EpisodeOutcome run_episode(const Scenario& scenario, TunedController which,
                           const fis::FuzzyInferenceSystem& flc1,
                           const fis::FuzzyInferenceSystem& flc2,
                           const fis::FuzzyInferenceSystem& tuned_fis,
                           const FuzzyQTable& table, const SimConfig& sim_cfg,
                           const fql::FQLConfig& fql_cfg, std::mt19937_64& rng) {
    World world = make_world(scenario);
    const PlannerConfig pcfg{sim_cfg.tau, PlannerMode::OrcaFl, sim_cfg.fixed_share,
                             sim_cfg.dt};

    EpisodeOutcome outcome;
    outcome.per_agent.resize(world.entities.size());
    // Indices of open decisions awaiting their reward/next state.
    std::vector<int> pending(world.entities.size(), -1);

    std::vector<double> alphas(std::size_t(tuned_fis.rules().size()));
    const int horizon = std::min(sim_cfg.max_steps, fql_cfg.horizon);
    for (int step_idx = 0; step_idx < horizon; ++step_idx) {
        std::vector<bool> was_done(world.entities.size());
        for (std::size_t i = 0; i < world.entities.size(); ++i) {
            was_done[i] = world.entities[i].done;
        }

        step_with_planner(
            world, sim_cfg,
            [&](const World& w, int index, std::span<const NeighborView> views) {
                const AgentState& self = w.entities[std::size_t(index)];
                std::vector<int> selections;
                if (!views.empty()) {
                    const auto crisp = controller_inputs(which, self, views.front());
                    tuned_fis.firing_strengths(crisp, alphas);
                    Decision d;
                    d.weights = alphas;
                    normalize(d.weights);
                    d.selections = select_conclusions(table, d.weights,
                                                      fql_cfg.epsilon, rng);
                    selections = d.selections;
                    pending[std::size_t(index)] =
                        int(outcome.per_agent[std::size_t(index)].size());
                    outcome.per_agent[std::size_t(index)].push_back(std::move(d));
                }

                std::vector<HalfPlane> planes;
                planes.reserve(views.size());
                for (const auto& nb : views) {
                    const AgentState& other = *nb.state;
                    double share;
                    Vec2 shift;
                    if (which == TunedController::Flc1) {
                        const std::vector<double> in{
                            distance(self.position, other.position), norm(other.velocity),
                            nb.est_accel};
                        const double raw =
                            selections.empty()
                                ? flc1.evaluate(in)
                                : tuned_fis.evaluate_with_consequents(in, selections);
                        share = std::clamp(raw, 0.0, 1.0);
                        shift = predicted_velocity_shift(flc2, other.velocity, nb.density,
                                                         nb.est_accel);
                    } else {
                        share = responsibility_share(
                            flc1, distance(self.position, other.position),
                            norm(other.velocity), nb.est_accel);
                        if (norm_sq(other.velocity) == 0.0 || selections.empty()) {
                            shift = predicted_velocity_shift(flc2, other.velocity,
                                                             nb.density, nb.est_accel);
                        } else {
                            const std::vector<double> in{norm(other.velocity), nb.density,
                                                         nb.est_accel};
                            const double m =
                                tuned_fis.evaluate_with_consequents(in, selections);
                            shift = (m - 1.0) * other.velocity;
                        }
                    }
                    planes.push_back(plane_for_neighbor(self, other, pcfg, share, shift));
                }
                return solve_velocity(preferred_velocity(self, pcfg.dt), planes,
                                      self.v_max);
            });

        // Close the open decisions with the observed reward and next state.
        bool all_done = true;
        for (std::size_t i = 0; i < world.entities.size(); ++i) {
            const AgentState& e = world.entities[i];
            if (e.is_agent() && !e.done) {
                all_done = false;
            }
            const int open = pending[i];
            if (open < 0) {
                continue;
            }
            pending[i] = -1;
            Decision& d = outcome.per_agent[i][std::size_t(open)];
            const bool reached_goal = !was_done[i] && e.done;
            d.reward = fql::reward(reached_goal);
            outcome.total_return += d.reward;
            if (!reached_goal) {
                const auto neighbor_idx = neighbors_in_range(
                    world, int(i), sim_cfg.sensor_range, sim_cfg.max_neighbors);
                if (!neighbor_idx.empty()) {
                    const AgentState& nb =
                        world.entities[std::size_t(neighbor_idx.front())];
                    NeighborView view{&nb,
                                      double(density_at(world, int(i),
                                                        sim_cfg.sensor_range)),
                                      estimate_accel(nb, sim_cfg.dt)};
                    const auto crisp = controller_inputs(which, e, view);
                    tuned_fis.firing_strengths(crisp, alphas);
                    d.next_alphas = alphas;
                }
            }
        }
        if (all_done) {
            break;
        }
    }
    return outcome;
}

void replay(FuzzyQTable& table, const std::vector<AgentEpisode>& per_agent,
            const fql::FQLConfig& cfg) {
    for (const auto& episode : per_agent) {
        if (episode.empty()) {
            continue;
        }
        table.reset_traces();
        for (const auto& d : episode) {
            fql::update_traces(table, cfg.lambda, cfg.gamma, d.weights, d.selections);
            const double q_hat = fql::inferred_q(d.weights, d.selections, table);
            const double q_star = d.next_alphas.empty()
                                      ? 0.0
                                      : fql::optimal_state_value(d.next_alphas, table);
            fql::update_q(table, cfg.eta,
                          fql::td_error(d.reward, cfg.gamma, q_star, q_hat));
        }
    }
}

}  // namespace

TuneResult tune_flc(const Scenario& scenario, TunedController which,
                    const fis::FuzzyInferenceSystem& flc1,
                    const fis::FuzzyInferenceSystem& flc2, const SimConfig& sim_cfg,
                    const fql::FQLConfig& fql_cfg) {
    const fis::FuzzyInferenceSystem& base =
        which == TunedController::Flc1 ? flc1 : flc2;
    const int num_rules = int(base.rules().size());
    const int num_conclusions = int(base.output().num_terms());

    FuzzyQTable table(num_rules, num_conclusions);
    // Conclusion value = the output term's triangle centroid.
    for (int j = 0; j < num_conclusions; ++j) {
        const auto& mf = base.output().terms()[std::size_t(j)].mf;
        const double centroid = (mf.a + mf.b + mf.c) / 3.0;
        for (int i = 0; i < num_rules; ++i) {
            table.actions[std::size_t(i) * std::size_t(num_conclusions) + std::size_t(j)] =
                centroid;
        }
    }
    // Seed each rule's own consequent so zero-episode tuning is the identity.
    for (int i = 0; i < num_rules; ++i) {
        table.q_at(i, base.rules()[std::size_t(i)].consequent) = 1e-9;
    }

    // Training mutates shared per-episode state from the planner hook; keep
    // the stepping single-threaded.
    SimConfig cfg = sim_cfg;
    cfg.workers = 1;

    std::mt19937_64 rng(fql_cfg.seed);
    TuneResult result{base, {}, {}};
    double r_tot = 0.0;
    for (int episode = 0; episode < fql_cfg.episodes; ++episode) {
        auto outcome =
            run_episode(scenario, which, flc1, flc2, base, table, cfg, fql_cfg, rng);
        result.episode_returns.push_back(outcome.total_return);
        if (fql_cfg.gated_replay) {
            if (outcome.total_return > r_tot) {
                replay(table, outcome.per_agent, fql_cfg);
                const auto remeasure =
                    run_episode(scenario, which, flc1, flc2, base, table, cfg, fql_cfg, rng);
                r_tot = remeasure.total_return;
            }
        } else {
            replay(table, outcome.per_agent, fql_cfg);
        }
    }

    // Tuned controller: same variables, greedy consequents.
    const auto greedy = table.greedy_selections();
    std::vector<fis::FuzzyRule> rules = base.rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
        rules[i].consequent = greedy[i];
    }
    result.tuned = fis::FuzzyInferenceSystem(base.inputs(), base.output(), std::move(rules),
                                             base.defuzz_resolution());
    result.table = std::move(table);
    return result;
}

}  // namespace orcafl
