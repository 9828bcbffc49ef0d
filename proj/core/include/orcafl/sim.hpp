#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "orcafl/orca.hpp"
#include "orcafl/scenario.hpp"

namespace orcafl {

struct SimConfig {
    double dt = 0.1;             // s
    double tau = 2.0;            // planning horizon (s)
    int max_steps = 2000;
    double sensor_range = 15.0;  // m
    int max_neighbors = 10;
    double goal_tolerance = 0.1;  // m
    std::uint64_t seed = 0;
    PlannerMode mode = PlannerMode::Orca;
    double fixed_share = 0.5;
    bool goal_snap = true;  // off reproduces the oscillation pathology
    int workers = 1;
    double pref_speed_factor = 1.0;
    double planning_margin = 0.0;
    // Consistent-handedness goal-direction bias: symmetric encounters
    // otherwise deadlock or funnel everyone through one point. The base is
    // a shared rotation convention; the spread staggers agents per seed.
    double bias_base = 0.2;    // uniform goal-direction bias (rad)
    double bias_spread = 0.02; // per-agent seeded bias on top (rad)

    PlannerConfig planner() const {
        return {tau, mode, fixed_share, dt, pref_speed_factor, planning_margin};
    }
};

struct Metrics {
    int num_steps = 0;
    double sim_elapsed = 0.0;   // num_steps * dt
    double wall_elapsed = 0.0;  // seconds of wall clock
    int num_collisions = 0;     // agent_agent + agent_obstacle
    int agent_agent_collisions = 0;
    int agent_obstacle_collisions = 0;
    int num_obstacles = 0;
    int num_agents = 0;
    bool converged = false;
};

/// One event per contiguous overlap interval of an entity pair,
/// ids ordered low/high.
struct CollisionEvent {
    int id_a = 0;
    int id_b = 0;
    int start_step = 0;
};

struct TrajectoryRecord {
    int step = 0;
    int id = 0;
    Vec2 position;
    Vec2 velocity;
    bool done = false;
};

/// Mutable simulation state: entity list plus the obstacle scripts.
struct World {
    std::vector<AgentState> entities;
    std::vector<ObstacleScript> scripts;
    int step_index = 0;
};

World make_world(const Scenario& scenario);

/// Indices of the other entities within sensor_range of entity `index`
/// (closed ball), nearest first, ties by ascending id, truncated to
/// max_neighbors.
std::vector<int> neighbors_in_range(const World& world, int index, double sensor_range,
                                    int max_neighbors);

/// Count of other entities within sensor_range (closed ball).
int density_at(const World& world, int index, double sensor_range);

/// Signed acceleration estimate from the velocity finite difference: the
/// magnitude of the velocity change over dt, negative when the speed dropped.
double estimate_accel(const AgentState& entity, double dt);

/// Custom planner hook: maps (world, entity index, neighbor views) to the
/// requested velocity. Used by the fuzzy Q-learning tuner; the default wraps
/// plan_step.
using PlannerFn =
    std::function<Vec2(const World&, int, std::span<const NeighborView>)>;

/// Synchronous double-buffered step: every agent plans from the same pre-step
/// snapshot (optionally fanned out across cfg.workers threads); velocities
/// are clamped to the speed and acceleration limits; positions integrate;
/// scripted obstacles advance; agents within goal_tolerance snap to the goal
/// with zeroed velocity and latch done (unless goal_snap is off).
void step(World& world, const SimConfig& cfg, const fis::FuzzyInferenceSystem* flc1,
          const fis::FuzzyInferenceSystem* flc2);
void step_with_planner(World& world, const SimConfig& cfg, const PlannerFn& planner);

/// Appends a CollisionEvent for every pair transitioning from non-overlap to
/// overlap between the two world states. Squares use their exact extent.
void detect_collisions(const World& before, const World& after,
                       std::vector<CollisionEvent>& ledger);

bool pair_overlaps(const AgentState& a, const AgentState& b);

struct RunResult {
    Metrics metrics;
    std::vector<TrajectoryRecord> trajectory;
    std::vector<CollisionEvent> events;
};

/// Steps until every agent is done or max_steps is reached (converged=false
/// then). The trajectory log holds one record per entity per step, including
/// the initial state at step 0.
RunResult run(const Scenario& scenario, const SimConfig& cfg,
              const fis::FuzzyInferenceSystem* flc1, const fis::FuzzyInferenceSystem* flc2);

}  // namespace orcafl
