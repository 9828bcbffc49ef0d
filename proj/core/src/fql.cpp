#include "orcafl/fql.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace orcafl::fql {

FuzzyQTable::FuzzyQTable(int rules, int conclusions)
    : num_rules(rules),
      num_conclusions(conclusions),
      q(std::size_t(rules) * std::size_t(conclusions), 0.0),
      e(std::size_t(rules) * std::size_t(conclusions), 0.0),
      actions(std::size_t(rules) * std::size_t(conclusions), 0.0) {
    if (rules <= 0 || conclusions <= 0) {
        throw std::invalid_argument("FuzzyQTable: needs positive dimensions");
    }
}

FuzzyQTable FuzzyQTable::with_shared_actions(int rules, std::span<const double> values) {
    FuzzyQTable t(rules, int(values.size()));
    for (int i = 0; i < rules; ++i) {
        for (int j = 0; j < t.num_conclusions; ++j) {
            t.actions[std::size_t(i) * std::size_t(t.num_conclusions) + std::size_t(j)] =
                values[std::size_t(j)];
        }
    }
    return t;
}

std::vector<int> FuzzyQTable::greedy_selections() const {
    std::vector<int> sel(std::size_t(num_rules), 0);
    for (int i = 0; i < num_rules; ++i) {
        const auto row = q_row(i);
        sel[std::size_t(i)] =
            int(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return sel;
}

void FuzzyQTable::reset_traces() { std::fill(e.begin(), e.end(), 0.0); }

double reward(bool next_is_goal) { return next_is_goal ? 1.0 : -1.0; }

int eep_select(std::span<const double> q_row, double epsilon, std::mt19937_64& rng) {
    if (q_row.empty()) {
        throw std::invalid_argument("eep_select: empty q row");
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
        std::uniform_int_distribution<int> pick(0, int(q_row.size()) - 1);
        return pick(rng);
    }
    return int(std::max_element(q_row.begin(), q_row.end()) - q_row.begin());
}

namespace {

double weight_sum(std::span<const double> weights) {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

}  // namespace

double inferred_action(std::span<const double> weights, std::span<const int> selections,
                       const FuzzyQTable& table) {
    const double total = weight_sum(weights);
    if (total <= 0.0) {
        throw std::domain_error("inferred_action: zero total firing strength");
    }
    double out = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out += weights[i] * table.action_at(int(i), selections[i]);
    }
    return out / total;
}

double inferred_q(std::span<const double> weights, std::span<const int> selections,
                  const FuzzyQTable& table) {
    const double total = weight_sum(weights);
    if (total <= 0.0) {
        throw std::domain_error("inferred_q: zero total firing strength");
    }
    double out = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out += weights[i] * table.q_at(int(i), selections[i]);
    }
    return out / total;
}

double optimal_state_value(std::span<const double> alphas, const FuzzyQTable& table) {
    const double total = weight_sum(alphas);
    if (total <= 0.0) {
        throw std::domain_error("optimal_state_value: zero total firing strength");
    }
    double out = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (alphas[i] == 0.0) {
            continue;
        }
        const auto row = table.q_row(int(i));
        out += alphas[i] * *std::max_element(row.begin(), row.end());
    }
    return out / total;
}

double td_error(double r, double gamma, double q_star_next, double q_hat) {
    return r + gamma * q_star_next - q_hat;
}

void update_traces(FuzzyQTable& table, double lambda, double gamma,
                   std::span<const double> weights, std::span<const int> selections) {
    const double decay = lambda * gamma;
    for (double& v : table.e) {
        v *= decay;
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        table.e_at(int(i), selections[i]) += weights[i];
    }
}

void update_q(FuzzyQTable& table, double eta, double delta) {
    for (std::size_t k = 0; k < table.q.size(); ++k) {
        table.q[k] += eta * delta * table.e[k];
    }
}

namespace {

struct Transition {
    std::vector<double> weights;  // normalized firing strengths at s
    std::vector<int> selections;
    double reward = 0.0;
    std::vector<double> next_alphas;  // raw firing strengths at s'; empty if terminal
};

void normalize(std::vector<double>& w) {
    const double total = weight_sum(w);
    if (total > 0.0) {
        for (double& v : w) {
            v /= total;
        }
    }
}

// One epsilon-greedy rollout of at most `horizon` steps.
std::vector<Transition> rollout(FqlEnvironment& env, const FuzzyQTable& table,
                                const FQLConfig& cfg, std::mt19937_64& rng) {
    std::vector<Transition> episode;
    env.reset(rng);
    std::vector<double> alphas(std::size_t(env.num_rules()));
    for (int step = 0; step < cfg.horizon && !env.at_goal(); ++step) {
        Transition tr;
        env.firing_strengths(alphas);
        tr.weights = alphas;
        normalize(tr.weights);
        tr.selections.resize(alphas.size());
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            // Unfired rules keep the greedy conclusion; their weight is zero.
            if (tr.weights[i] > 0.0) {
                tr.selections[i] = eep_select(table.q_row(int(i)), cfg.epsilon, rng);
            } else {
                const auto row = table.q_row(int(i));
                tr.selections[i] =
                    int(std::max_element(row.begin(), row.end()) - row.begin());
            }
        }
        tr.reward = env.apply_action(inferred_action(tr.weights, tr.selections, table));
        if (!env.at_goal()) {
            env.firing_strengths(alphas);
            tr.next_alphas = alphas;
        }
        episode.push_back(std::move(tr));
    }
    return episode;
}

double episode_return(const std::vector<Transition>& episode) {
    double total = 0.0;
    for (const auto& tr : episode) {
        total += tr.reward;
    }
    return total;
}

void replay_update(FuzzyQTable& table, const std::vector<Transition>& episode,
                   const FQLConfig& cfg) {
    table.reset_traces();
    for (const auto& tr : episode) {
        update_traces(table, cfg.lambda, cfg.gamma, tr.weights, tr.selections);
        const double q_hat = inferred_q(tr.weights, tr.selections, table);
        const double q_star_next =
            tr.next_alphas.empty() ? 0.0 : optimal_state_value(tr.next_alphas, table);
        update_q(table, cfg.eta, td_error(tr.reward, cfg.gamma, q_star_next, q_hat));
    }
}

}  // namespace

FqlResult fql_train(FqlEnvironment& env, FuzzyQTable table, const FQLConfig& cfg) {
    if (table.num_rules != env.num_rules()) {
        throw std::invalid_argument("fql_train: table/environment rule count mismatch");
    }
    std::mt19937_64 rng(cfg.seed);
    FqlResult result;
    double r_tot = 0.0;
    for (int episode = 0; episode < cfg.episodes; ++episode) {
        const auto trajectory = rollout(env, table, cfg, rng);
        const double ret = episode_return(trajectory);
        result.episode_returns.push_back(ret);
        if (cfg.gated_replay) {
            // Improvement-gated replay: learn only from episodes beating the
            // benchmark, then re-measure with a fresh rollout.
            if (ret > r_tot) {
                replay_update(table, trajectory, cfg);
                r_tot = episode_return(rollout(env, table, cfg, rng));
            }
        } else {
            replay_update(table, trajectory, cfg);
            r_tot = std::max(r_tot, ret);
        }
        result.r_tot_trace.push_back(r_tot);
    }
    result.table = std::move(table);
    return result;
}

TDState semi_gradient_td_lambda(const TdTask& task, const FQLConfig& cfg) {
    TDState state;
    state.w.assign(std::size_t(task.dim), 0.0);
    state.z.assign(std::size_t(task.dim), 0.0);
    std::mt19937_64 rng(cfg.seed);
    std::vector<double> phi(std::size_t(task.dim));
    std::vector<double> phi_next(std::size_t(task.dim));

    auto value = [&](std::span<const double> f) {
        double v = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            v += state.w[i] * f[i];
        }
        return v;
    };

    for (int episode = 0; episode < cfg.episodes; ++episode) {
        task.reset(rng);
        std::fill(state.z.begin(), state.z.end(), 0.0);
        int guard = 0;
        while (!task.terminal() && guard++ < cfg.horizon) {
            task.features(phi);
            const double r = task.step();
            const bool terminal = task.terminal();
            double v_next = 0.0;
            if (!terminal) {
                task.features(phi_next);
                v_next = value(phi_next);
            }
            const double delta = r + cfg.gamma * v_next - value(phi);
            for (std::size_t i = 0; i < phi.size(); ++i) {
                state.z[i] = cfg.lambda * cfg.gamma * state.z[i] + phi[i];
                state.w[i] += cfg.eta * delta * state.z[i];
            }
        }
    }
    return state;
}

}  // namespace orcafl::fql
