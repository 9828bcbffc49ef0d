#pragma once

#include "orcafl/fql.hpp"
#include "orcafl/sim.hpp"

namespace orcafl {

enum class TunedController { Flc1, Flc2 };

struct TuneResult {
    fis::FuzzyInferenceSystem tuned;
    std::vector<double> episode_returns;
    fql::FuzzyQTable table;
};

/// Re-learns the rule consequents of one controller by fuzzy Q-learning over
/// repeated scenario runs.
///
/// An episode is one full run in OrcaFl mode. Each step, each active agent
/// with a sensed neighborhood is one decision: the state is the controller's
/// crisp inputs for the nearest neighbor, the per-rule conclusions are chosen
/// epsilon-greedily and drive that agent's planning for the step, and the
/// reward is +1 on reaching the goal, -1 otherwise (a collision is just a
/// non-goal step). The q-table is shared across agents; traces are kept per
/// agent. With zero episodes the consequents come back unchanged.
TuneResult tune_flc(const Scenario& scenario, TunedController which,
                    const fis::FuzzyInferenceSystem& flc1,
                    const fis::FuzzyInferenceSystem& flc2, const SimConfig& sim_cfg,
                    const fql::FQLConfig& fql_cfg);

}  // namespace orcafl
