#include "orcafl/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "orcafl/fis.hpp"

namespace orcafl::fql {

FuzzyGridworld::FuzzyGridworld(int size, int goal_x, int goal_y)
    : size_(size), goal_x_(goal_x), goal_y_(goal_y) {
    if (size < 2 || goal_x < 0 || goal_x >= size || goal_y < 0 || goal_y >= size) {
        throw std::invalid_argument("FuzzyGridworld: bad size or goal");
    }
}

void FuzzyGridworld::reset(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, size_ * size_ - 1);
    int s = goal_index();
    while (s == goal_index()) {
        s = pick(rng);
    }
    x_ = s % size_;
    y_ = s / size_;
}

void FuzzyGridworld::set_state(int x, int y) {
    x_ = x;
    y_ = y;
}

void FuzzyGridworld::firing_strengths(std::span<double> alphas) const {
    // Triangular term k peaks at coordinate k with feet one cell away.
    auto term = [](double v, int k) {
        return fis::trimf_eval(v, {double(k) - 1.0, double(k), double(k) + 1.0});
    };
    for (int gy = 0; gy < size_; ++gy) {
        const double my = term(double(y_), gy);
        for (int gx = 0; gx < size_; ++gx) {
            alphas[std::size_t(gy * size_ + gx)] = std::min(term(double(x_), gx), my);
        }
    }
}

std::pair<int, int> FuzzyGridworld::move(int x, int y, int action, int size) {
    switch (action) {
        case 0: y = std::min(y + 1, size - 1); break;  // up
        case 1: y = std::max(y - 1, 0); break;         // down
        case 2: x = std::max(x - 1, 0); break;         // left
        case 3: x = std::min(x + 1, size - 1); break;  // right
        default: break;
    }
    return {x, y};
}

double FuzzyGridworld::apply_action(double action) {
    const int a = std::clamp(int(std::lround(action)), 0, 3);
    auto [nx, ny] = move(x_, y_, a, size_);
    x_ = nx;
    y_ = ny;
    return reward(at_goal());
}

bool FuzzyGridworld::at_goal() const { return x_ == goal_x_ && y_ == goal_y_; }

FuzzyQTable FuzzyGridworld::make_table() const {
    const double moves[4] = {0.0, 1.0, 2.0, 3.0};
    return FuzzyQTable::with_shared_actions(num_rules(), moves);
}

}  // namespace orcafl::fql
