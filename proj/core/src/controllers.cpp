#include "orcafl/controllers.hpp"

#include <cmath>

namespace orcafl::fis {

namespace {

FuzzyVariable distance_variable() {
    return FuzzyVariable("distance", 0.0, 100.0,
                         {{"VN", {-33.0, 0.0, 33.0}},
                          {"N", {0.0, 33.0, 66.0}},
                          {"F", {33.0, 66.0, 100.0}},
                          {"VF", {66.0, 100.0, 100.0}}});
}

// The printed Very Fast triple duplicates Fast; restored as the right
// shoulder of the uniform partition.
FuzzyVariable velocity_variable() {
    return FuzzyVariable("velocity", 0.0, 200.0,
                         {{"VS", {-66.67, 0.0, 66.67}},
                          {"S", {0.0, 66.67, 133.33}},
                          {"F", {66.67, 133.33, 200.0}},
                          {"VF", {133.33, 200.0, 200.0}}});
}

FuzzyVariable acceleration_variable() {
    return FuzzyVariable("acceleration", -500.0, 500.0,
                         {{"DCC", {-500.0, -250.0, 0.0}},
                          {"ZERO", {-100.0, 0.0, 100.0}},
                          {"ACC", {0.0, 250.0, 500.0}}});
}

FuzzyVariable density_variable() {
    return FuzzyVariable("density", 0.0, 12.0,
                         {{"L", {-4.0, 0.0, 4.0}},
                          {"M", {0.0, 4.0, 8.0}},
                          {"H", {4.0, 8.0, 12.0}}});
}

FuzzyVariable responsibility_variable() {
    return FuzzyVariable("responsibility", -0.119, 1.1119,
                         {{"a", {-0.119, 0.0, 0.119}},
                          {"b", {0.0238, 0.1429, 0.2619}},
                          {"c", {0.1667, 0.2857, 0.4048}},
                          {"d", {0.3095, 0.4286, 0.5476}},
                          {"e", {0.4524, 0.5714, 0.6905}},
                          {"f", {0.5952, 0.7142, 0.8333}},
                          {"g", {0.7381, 0.8571, 0.9762}},
                          {"h", {0.81, 1.0, 1.1119}}});
}

FuzzyVariable expected_velocity_variable() {
    return FuzzyVariable("expected_velocity", -0.333, 3.6667,
                         {{"a", {-0.333, 0.0, 0.333}},
                          {"b", {0.0, 0.333, 0.6667}},
                          {"c", {0.3333, 0.6667, 1.0}},
                          {"d", {0.6667, 1.0, 1.333}},
                          {"e", {1.0, 1.333, 1.6667}},
                          {"f", {1.333, 1.6667, 2.0}},
                          {"g", {1.6667, 2.0, 3.6667}}});
}

int scaled_round(int score, int max_score, int num_conclusions) {
    return int(std::lround(double((num_conclusions - 1) * score) / double(max_score)));
}

}  // namespace

FuzzyInferenceSystem build_flc1() {
    // Inputs in table order: distance, velocity, acceleration.
    std::vector<FuzzyVariable> inputs{distance_variable(), velocity_variable(),
                                      acceleration_variable()};
    // Threat score: closer, faster and accelerating neighbors demand a larger
    // share. Distance contributes 3..0 (VN..VF), velocity 0..3 (VS..VF),
    // acceleration 0..2 (DCC..ACC); score 0..8 maps linearly onto a..h.
    std::vector<FuzzyRule> rules;
    rules.reserve(48);
    for (int d = 0; d < 4; ++d) {
        for (int v = 0; v < 4; ++v) {
            for (int a = 0; a < 3; ++a) {
                const int score = (3 - d) + v + a;
                rules.push_back({{d, v, a}, scaled_round(score, 8, 8)});
            }
        }
    }
    return FuzzyInferenceSystem(std::move(inputs), responsibility_variable(),
                                std::move(rules));
}

FuzzyInferenceSystem build_flc2() {
    // Inputs in table order: velocity, density, acceleration.
    std::vector<FuzzyVariable> inputs{velocity_variable(), density_variable(),
                                      acceleration_variable()};
    // Prediction score: fast, unconstrained (low density), accelerating
    // neighbors are expected to speed up. Velocity contributes 0..3,
    // density 2..0 (L..H), acceleration 0..2; score 0..7 maps onto a..g.
    std::vector<FuzzyRule> rules;
    rules.reserve(36);
    for (int v = 0; v < 4; ++v) {
        for (int d = 0; d < 3; ++d) {
            for (int a = 0; a < 3; ++a) {
                const int score = v + (2 - d) + a;
                rules.push_back({{v, d, a}, scaled_round(score, 7, 7)});
            }
        }
    }
    return FuzzyInferenceSystem(std::move(inputs), expected_velocity_variable(),
                                std::move(rules));
}

}  // namespace orcafl::fis
