#pragma once

#include "orcafl/fql.hpp"

namespace orcafl::fql {

/// N x N deterministic gridworld with a fuzzy position basis: one triangular
/// term per integer coordinate on each axis (feet one cell wide), rules the
/// product of the two term sets. At integer positions exactly one rule fires.
///
/// Actions are the four moves encoded as conclusion values 0..3
/// (up, down, left, right); the inferred real action is rounded and clamped.
/// Bumping the border leaves the position unchanged. Reaching the goal cell
/// ends the episode; rewards are +1 on entering the goal and -1 otherwise.
/// Episodes start uniformly over the non-goal cells (exploring starts).
class FuzzyGridworld : public FqlEnvironment {
public:
    FuzzyGridworld(int size, int goal_x, int goal_y);

    int num_rules() const override { return size_ * size_; }
    void reset(std::mt19937_64& rng) override;
    void firing_strengths(std::span<double> alphas) const override;
    double apply_action(double action) override;
    bool at_goal() const override;

    int size() const { return size_; }
    int x() const { return x_; }
    int y() const { return y_; }
    void set_state(int x, int y);
    int state_index() const { return y_ * size_ + x_; }
    int goal_index() const { return goal_y_ * size_ + goal_x_; }

    /// Applies an integer move to a coordinate pair (shared with the
    /// value-iteration oracle in the tests).
    static std::pair<int, int> move(int x, int y, int action, int size);

    /// Q-table with the four move conclusions shared by every rule.
    FuzzyQTable make_table() const;

private:
    int size_;
    int goal_x_;
    int goal_y_;
    int x_ = 0;
    int y_ = 0;
};

}  // namespace orcafl::fql
