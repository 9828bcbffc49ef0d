#include <array>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "orcafl/fql.hpp"
#include "orcafl/gridworld.hpp"

using namespace orcafl::fql;

namespace {

// Value-iteration oracle on the gridworld dynamics: optimal action sets.
std::vector<std::set<int>> value_iteration(int size, int gx, int gy, double gamma) {
    const int n = size * size;
    const int goal = gy * size + gx;
    std::vector<double> v(n, 0.0);
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double delta = 0.0;
        for (int s = 0; s < n; ++s) {
            if (s == goal) {
                continue;
            }
            const int x = s % size;
            const int y = s / size;
            double best = -1e100;
            for (int a = 0; a < 4; ++a) {
                const auto [nx, ny] = FuzzyGridworld::move(x, y, a, size);
                const int sn = ny * size + nx;
                const double r = sn == goal ? 1.0 : -1.0;
                best = std::max(best, r + gamma * (sn == goal ? 0.0 : v[std::size_t(sn)]));
            }
            delta = std::max(delta, std::abs(best - v[std::size_t(s)]));
            v[std::size_t(s)] = best;
        }
        if (delta < 1e-12) {
            break;
        }
    }
    auto optimal = std::vector<std::set<int>>(std::size_t(n));
    for (int s = 0; s < n; ++s) {
        if (s == goal) {
            continue;
        }
        const int x = s % size;
        const int y = s / size;
        std::array<double, 4> qa{};
        double best = -1e100;
        for (int a = 0; a < 4; ++a) {
            const auto [nx, ny] = FuzzyGridworld::move(x, y, a, size);
            const int sn = ny * size + nx;
            const double r = sn == goal ? 1.0 : -1.0;
            qa[std::size_t(a)] = r + gamma * (sn == goal ? 0.0 : v[std::size_t(sn)]);
            best = std::max(best, qa[std::size_t(a)]);
        }
        for (int a = 0; a < 4; ++a) {
            if (qa[std::size_t(a)] > best - 1e-9) {
                optimal[std::size_t(s)].insert(a);
            }
        }
    }
    return optimal;
}

// Environment where every action immediately reaches the goal.
class OneStepGoal : public FqlEnvironment {
public:
    int num_rules() const override { return 1; }
    void reset(std::mt19937_64&) override { done_ = false; }
    void firing_strengths(std::span<double> alphas) const override { alphas[0] = 1.0; }
    double apply_action(double) override {
        done_ = true;
        return reward(true);
    }
    bool at_goal() const override { return done_; }

private:
    bool done_ = false;
};

// Five-state chain s0..s4 with goal s4; fixed always-right policy.
struct Chain {
    int state = 0;
    static constexpr int kGoal = 4;

    TdTask task() {
        TdTask t;
        t.dim = 5;
        t.reset = [this](std::mt19937_64&) { state = 0; };
        t.step = [this]() {
            state += 1;
            return reward(state == kGoal);
        };
        t.terminal = [this]() { return state == kGoal; };
        t.features = [this](std::span<double> phi) {
            std::fill(phi.begin(), phi.end(), 0.0);
            phi[std::size_t(state)] = 1.0;
        };
        return t;
    }
};

// Independent one-step TD(0) reference, no trace vector.
std::vector<double> td0_reference(int episodes, double eta, double gamma) {
    std::vector<double> w(5, 0.0);
    for (int ep = 0; ep < episodes; ++ep) {
        int s = 0;
        while (s != Chain::kGoal) {
            const int sn = s + 1;
            const double r = reward(sn == Chain::kGoal);
            const double v_next = sn == Chain::kGoal ? 0.0 : w[std::size_t(sn)];
            const double delta = r + gamma * v_next - w[std::size_t(s)];
            w[std::size_t(s)] += eta * delta;
            s = sn;
        }
    }
    return w;
}

}  // namespace

TEST_CASE("reward is the goal indicator") {
    CHECK(reward(true) == 1.0);
    CHECK(reward(false) == -1.0);
}

TEST_CASE("eep_select") {
    std::mt19937_64 rng(1);
    SUBCASE("pure greedy takes the argmax") {
        const std::array<double, 3> row{0.0, 2.0, 1.0};
        CHECK(eep_select(row, 0.0, rng) == 1);
    }
    SUBCASE("ties break to the lowest index") {
        const std::array<double, 4> row{0.5, 0.5, 0.5, 0.5};
        CHECK(eep_select(row, 0.0, rng) == 0);
    }
    SUBCASE("pure exploration is uniform (chi-square over 1e4 draws)") {
        const std::array<double, 4> row{9.0, 0.0, 0.0, 0.0};
        std::array<int, 4> counts{};
        const int draws = 10000;
        for (int i = 0; i < draws; ++i) {
            ++counts[std::size_t(eep_select(row, 1.0, rng))];
        }
        double chi2 = 0.0;
        const double expected = draws / 4.0;
        for (int c : counts) {
            chi2 += (c - expected) * (c - expected) / expected;
        }
        CHECK(chi2 < 16.27);  // chi-square df=3, p=0.001
    }
}

TEST_CASE("inferred_action") {
    FuzzyQTable t = FuzzyQTable::with_shared_actions(2, std::array<double, 2>{0.0, 1.0});
    const std::array<int, 2> pick_second{1, 1};
    SUBCASE("single firing rule returns its action value") {
        const std::array<double, 2> w{1.0, 0.0};
        CHECK(inferred_action(w, pick_second, t) == 1.0);
    }
    SUBCASE("equal weights blend convexly") {
        const std::array<double, 2> w{0.5, 0.5};
        const std::array<int, 2> split{0, 1};
        CHECK(inferred_action(w, split, t) == doctest::Approx(0.5));
    }
    SUBCASE("unnormalized weights renormalize") {
        const std::array<double, 2> w{2.0, 2.0};
        const std::array<int, 2> split{0, 1};
        CHECK(inferred_action(w, split, t) == doctest::Approx(0.5));
    }
}

TEST_CASE("inferred_q") {
    FuzzyQTable t(2, 3);
    const std::array<int, 2> sel{1, 2};
    const std::array<double, 2> w{0.5, 0.5};
    SUBCASE("all-zero table gives zero") { CHECK(inferred_q(w, sel, t) == 0.0); }
    SUBCASE("single rule passes through; convex bounds hold") {
        t.q_at(0, 1) = 3.0;
        t.q_at(1, 2) = -1.0;
        const std::array<double, 2> lone{1.0, 0.0};
        CHECK(inferred_q(lone, sel, t) == 3.0);
        const double mixed = inferred_q(w, sel, t);
        CHECK(mixed >= -1.0);
        CHECK(mixed <= 3.0);
    }
}

TEST_CASE("optimal_state_value") {
    FuzzyQTable t(2, 3);
    SUBCASE("all zero") {
        const std::array<double, 2> a{1.0, 1.0};
        CHECK(optimal_state_value(a, t) == 0.0);
    }
    SUBCASE("single rule takes its row max") {
        t.q_at(0, 0) = -1.0;
        t.q_at(0, 1) = 3.0;
        const std::array<double, 2> a{1.0, 0.0};
        CHECK(optimal_state_value(a, t) == 3.0);
    }
    SUBCASE("two equal rules average their maxes") {
        t.q_at(0, 1) = 2.0;
        t.q_at(1, 2) = 4.0;
        const std::array<double, 2> a{1.0, 1.0};
        CHECK(optimal_state_value(a, t) == doctest::Approx(3.0));
    }
    SUBCASE("zero firing errors") {
        const std::array<double, 2> a{0.0, 0.0};
        CHECK_THROWS_AS(optimal_state_value(a, t), std::domain_error);
    }
}

TEST_CASE("td_error pinned cases") {
    CHECK(td_error(-1.0, 0.9, 0.0, 0.0) == -1.0);
    CHECK(td_error(1.0, 0.9, 10.0, 10.0) == doctest::Approx(0.0));  // Bellman fixed point
    CHECK(td_error(0.0, 0.0, 123.0, 4.0) == -4.0);                  // myopic limit
}

TEST_CASE("update_traces") {
    FuzzyQTable t(2, 2);
    const std::array<double, 2> w{0.75, 0.25};
    const std::array<int, 2> sel{0, 1};
    SUBCASE("lambda 0 keeps only the current selections") {
        t.e_at(0, 1) = 5.0;
        update_traces(t, 0.0, 0.9, w, sel);
        CHECK(t.e_at(0, 0) == 0.75);
        CHECK(t.e_at(1, 1) == 0.25);
        CHECK(t.e_at(0, 1) == 0.0);
    }
    SUBCASE("lambda=gamma=1 accumulates") {
        FuzzyQTable acc(1, 2);
        const std::array<double, 1> w1{1.0};
        const std::array<int, 1> s1{0};
        for (int k = 0; k < 4; ++k) {
            update_traces(acc, 1.0, 1.0, w1, s1);
        }
        CHECK(acc.e_at(0, 0) == 4.0);
    }
    SUBCASE("zero weights decay only") {
        t.e_at(0, 0) = 2.0;
        const std::array<double, 2> none{0.0, 0.0};
        update_traces(t, 0.5, 0.8, none, sel);
        CHECK(t.e_at(0, 0) == doctest::Approx(0.8));
    }
}

TEST_CASE("update_q") {
    FuzzyQTable t(2, 2);
    SUBCASE("zero traces leave q unchanged") {
        update_q(t, 0.1, 5.0);
        CHECK(t.q == std::vector<double>(4, 0.0));
    }
    SUBCASE("eta 0 is the identity") {
        t.e_at(0, 0) = 1.0;
        update_q(t, 0.0, 5.0);
        CHECK(t.q_at(0, 0) == 0.0);
    }
    SUBCASE("lambda-0 step equals the per-weight closed form, cell exact") {
        FuzzyQTable a(3, 2);
        FuzzyQTable b(3, 2);
        const std::array<double, 3> w{0.5, 0.3, 0.2};
        const std::array<int, 3> sel{1, 0, 1};
        const double eta = 0.1;
        const double delta = -0.7;
        update_traces(a, 0.0, 0.9, w, sel);
        update_q(a, eta, delta);
        for (std::size_t i = 0; i < 3; ++i) {
            b.q_at(int(i), sel[i]) += eta * delta * w[i];
        }
        CHECK(a.q == b.q);
    }
    SUBCASE("update magnitude bound") {
        FuzzyQTable t2(2, 2);
        t2.e_at(0, 1) = 0.6;
        t2.e_at(1, 0) = 0.4;
        const auto before = t2.q;
        const double eta = 0.2;
        const double delta = 3.0;
        update_q(t2, eta, delta);
        for (std::size_t k = 0; k < t2.q.size(); ++k) {
            CHECK(std::abs(t2.q[k] - before[k]) <= eta * std::abs(delta) * 0.6 + 1e-15);
        }
    }
}

TEST_CASE("semi_gradient_td_lambda") {
    SUBCASE("lambda 0 bit-matches an independent TD(0) over the same stream") {
        Chain chain;
        FQLConfig cfg;
        cfg.eta = 0.1;
        cfg.gamma = 0.9;
        cfg.lambda = 0.0;
        cfg.episodes = 25;  // 4 steps per episode -> 100 steps
        cfg.horizon = 10;
        const TDState got = semi_gradient_td_lambda(chain.task(), cfg);
        const auto expected = td0_reference(25, 0.1, 0.9);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(got.w[i] == expected[i]);  // bit exact
        }
    }
    SUBCASE("chain converges to the analytic returns") {
        // gamma = 1: v(s) = sum of rewards to goal = -(3 - s) + 1.
        Chain chain;
        FQLConfig cfg;
        cfg.eta = 0.05;
        cfg.gamma = 1.0;
        cfg.lambda = 0.5;
        cfg.episodes = 1000;
        cfg.horizon = 10;
        const TDState got = semi_gradient_td_lambda(chain.task(), cfg);
        const double expected[4] = {-2.0, -1.0, 0.0, 1.0};
        for (std::size_t s = 0; s < 4; ++s) {
            CHECK(got.w[s] == doctest::Approx(expected[s]).epsilon(1e-3));
        }
        // Terminal value is never updated away from zero.
        CHECK(got.w[4] == 0.0);
    }
}

TEST_CASE("fql_train") {
    SUBCASE("cold start: a winning first episode defines the benchmark") {
        OneStepGoal env;
        FQLConfig cfg;
        cfg.epsilon = 0.0;
        cfg.episodes = 3;
        cfg.horizon = 5;
        cfg.gated_replay = true;
        const auto result = fql_train(env, FuzzyQTable(1, 2), cfg);
        REQUIRE(result.r_tot_trace.size() == 3);
        CHECK(result.episode_returns[0] == 1.0);
        CHECK(result.r_tot_trace[0] == 1.0);
    }
    SUBCASE("r_tot trace is non-decreasing in every-episode mode") {
        FuzzyGridworld env(4, 3, 3);
        FQLConfig cfg;
        cfg.episodes = 200;
        cfg.gated_replay = false;
        cfg.seed = 9;
        const auto result = fql_train(env, env.make_table(), cfg);
        for (std::size_t i = 1; i < result.r_tot_trace.size(); ++i) {
            CHECK(result.r_tot_trace[i] >= result.r_tot_trace[i - 1]);
        }
    }
    SUBCASE("fixed seed reproduces the training bit-exactly") {
        FuzzyGridworld env1(4, 3, 3);
        FuzzyGridworld env2(4, 3, 3);
        FQLConfig cfg;
        cfg.episodes = 100;
        cfg.gated_replay = false;
        cfg.seed = 77;
        const auto a = fql_train(env1, env1.make_table(), cfg);
        const auto b = fql_train(env2, env2.make_table(), cfg);
        CHECK(a.table.q == b.table.q);
        CHECK(a.episode_returns == b.episode_returns);
    }
}

TEST_CASE("fql gridworld reaches the value-iteration policy") {
    FuzzyGridworld env(5, 4, 4);
    FQLConfig cfg;
    cfg.gamma = 0.95;
    cfg.eta = 0.1;
    cfg.epsilon = 0.1;
    cfg.episodes = 1000;
    cfg.horizon = 50;
    cfg.lambda = 0.3;
    cfg.gated_replay = false;
    cfg.seed = 12345;
    const auto result = fql_train(env, env.make_table(), cfg);
    const auto optimal = value_iteration(5, 4, 4, cfg.gamma);
    const auto greedy = result.table.greedy_selections();
    int agree = 0;
    int total = 0;
    for (int s = 0; s < 25; ++s) {
        if (s == env.goal_index()) {
            continue;
        }
        ++total;
        if (optimal[std::size_t(s)].count(greedy[std::size_t(s)]) > 0) {
            ++agree;
        }
    }
    CHECK(double(agree) / double(total) >= 0.9);
}
