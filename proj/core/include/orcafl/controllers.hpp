#pragma once

#include "orcafl/fis.hpp"

namespace orcafl::fis {

/// Responsibility-share controller. Inputs distance (m), velocity (m/s) and
/// acceleration (m/s^2) of the nearest neighbor; output is the share of
/// avoidance responsibility, term set a..h over [-0.119, 1.1119]. Full
/// 4x4x3 = 48-rule base generated from a threat score.
FuzzyInferenceSystem build_flc1();

/// Predicted-velocity controller. Inputs neighbor velocity (m/s), local
/// density (entity count) and neighbor acceleration (m/s^2); output is a
/// speed multiplier for the neighbor's next scanning cycle, term set a..g
/// over [-0.333, 3.6667]. Full 4x3x3 = 36-rule base from a prediction score.
FuzzyInferenceSystem build_flc2();

}  // namespace orcafl::fis
