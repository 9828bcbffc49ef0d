#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace orcafl::fql {

/// Per-rule q-values and eligibility traces over competing conclusions, plus
/// the action value each (rule, conclusion) cell stands for. q and e start
/// at zero.
struct FuzzyQTable {
    int num_rules = 0;
    int num_conclusions = 0;
    std::vector<double> q;        // row-major [num_rules x num_conclusions]
    std::vector<double> e;        // eligibility traces, same shape
    std::vector<double> actions;  // action value per cell

    FuzzyQTable() = default;
    FuzzyQTable(int rules, int conclusions);

    /// All rules share the same conclusion values.
    static FuzzyQTable with_shared_actions(int rules, std::span<const double> values);

    double& q_at(int rule, int conclusion) { return q[index(rule, conclusion)]; }
    double q_at(int rule, int conclusion) const { return q[index(rule, conclusion)]; }
    double& e_at(int rule, int conclusion) { return e[index(rule, conclusion)]; }
    double e_at(int rule, int conclusion) const { return e[index(rule, conclusion)]; }
    double action_at(int rule, int conclusion) const { return actions[index(rule, conclusion)]; }

    std::span<const double> q_row(int rule) const {
        return {q.data() + index(rule, 0), std::size_t(num_conclusions)};
    }

    /// Greedy conclusion per rule (lowest index on ties).
    std::vector<int> greedy_selections() const;

    void reset_traces();

private:
    std::size_t index(int rule, int conclusion) const {
        return std::size_t(rule) * std::size_t(num_conclusions) + std::size_t(conclusion);
    }
};

struct FQLConfig {
    double eta = 0.1;      // learning rate, (0, 1]
    double gamma = 0.9;    // discount, [0, 1)
    double lambda = 0.0;   // trace decay, [0, 1]
    double epsilon = 0.1;  // exploration, [0, 1]
    int episodes = 100;
    int horizon = 200;  // max steps per episode (M)
    /// When true, episodes replay through the q-update only after beating the
    /// best return so far, followed by a fresh rollout that resets the
    /// benchmark. When false, every episode updates online.
    bool gated_replay = true;
    std::uint64_t seed = 0;
};

/// Weights and traces of the linear TD(lambda) value estimator.
struct TDState {
    std::vector<double> w;
    std::vector<double> z;
};

/// +1 when the next state is a goal state, -1 otherwise.
double reward(bool next_is_goal);

/// Epsilon-greedy conclusion choice over one rule's q row: argmax (lowest
/// index on ties) with probability 1 - epsilon, uniform otherwise.
int eep_select(std::span<const double> q_row, double epsilon, std::mt19937_64& rng);

/// Inferred action sum(w_i * a[i, sel_i]); weights renormalized when needed.
double inferred_action(std::span<const double> weights, std::span<const int> selections,
                       const FuzzyQTable& table);

/// Quality of the inferred action, sum(w_i * q[i, sel_i]).
double inferred_q(std::span<const double> weights, std::span<const int> selections,
                  const FuzzyQTable& table);

/// Optimal state value sum(alpha_i * max_j q[i,j]) / sum(alpha_i). Throws
/// std::domain_error when no rule fires.
double optimal_state_value(std::span<const double> alphas, const FuzzyQTable& table);

/// Temporal-difference error R + gamma * qStarNext - qHat.
double td_error(double r, double gamma, double q_star_next, double q_hat);

/// e'[i,j] = lambda * gamma * e[i,j] (+ w_i at the selected cells).
void update_traces(FuzzyQTable& table, double lambda, double gamma,
                   std::span<const double> weights, std::span<const int> selections);

/// q'[i,j] = q[i,j] + eta * delta * e[i,j].
void update_q(FuzzyQTable& table, double eta, double delta);

/// Episodic environment with a fuzzified state exposed as rule firing
/// strengths; actions are the inferred real values.
class FqlEnvironment {
public:
    virtual ~FqlEnvironment() = default;

    virtual int num_rules() const = 0;
    virtual void reset(std::mt19937_64& rng) = 0;
    virtual void firing_strengths(std::span<double> alphas) const = 0;
    /// Applies the action and returns the reward of the transition.
    virtual double apply_action(double action) = 0;
    virtual bool at_goal() const = 0;
};

struct FqlResult {
    FuzzyQTable table;
    std::vector<double> episode_returns;  // first rollout per episode
    std::vector<double> r_tot_trace;      // benchmark after each episode
};

/// Trains the q-table on the environment: per episode, roll out up to
/// `horizon` steps with per-rule epsilon-greedy conclusion selection. In
/// gated mode the episode replays through the trace update only when its
/// return beats the running benchmark, after which a fresh rollout resets
/// the benchmark; otherwise every step updates online.
FqlResult fql_train(FqlEnvironment& env, FuzzyQTable table, const FQLConfig& cfg);

/// Episodic task for policy evaluation: transition under the fixed policy,
/// features of the current state, terminal predicate.
struct TdTask {
    std::function<void(std::mt19937_64&)> reset;
    std::function<double()> step;  // advance, return reward
    std::function<bool()> terminal;
    std::function<void(std::span<double>)> features;
    int dim = 0;
};

/// Semi-gradient TD(lambda) policy evaluation with accumulating traces on a
/// linear value function; terminal states keep value 0.
TDState semi_gradient_td_lambda(const TdTask& task, const FQLConfig& cfg);

}  // namespace orcafl::fql
