#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "orcafl/agent.hpp"

namespace orcafl {

struct Rect {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    bool contains(Vec2 p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }

    bool operator==(const Rect&) const = default;
};

/// Piecewise-constant velocity script for a scripted obstacle. Segment k
/// applies while step < until_step; after the last segment the obstacle keeps
/// the final velocity.
struct ObstacleScript {
    struct Segment {
        double vx = 0.0;
        double vy = 0.0;
        int until_step = 0;

        bool operator==(const Segment&) const = default;
    };
    std::vector<Segment> segments;

    Vec2 velocity_at(int step) const;

    bool operator==(const ObstacleScript&) const = default;
};

/// A runnable world description: entities (agents and scripted obstacles, in
/// one list), one script per entity (empty for agents), and the arena bounds.
struct Scenario {
    std::string name;
    std::vector<AgentState> entities;
    std::vector<ObstacleScript> scripts;  // parallel to entities
    Rect bounds;

    int agent_count() const;
    int obstacle_count() const;

    bool operator==(const Scenario&) const = default;
};

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Checks ids unique, radii positive, no two entities initially overlapping,
/// all agent goals within bounds, finite values. Throws ScenarioError naming
/// the offending entity.
void validate(const Scenario& scenario);

/// numAgents agents evenly spaced on a circle, each heading to the antipodal
/// point. Throws when the spacing would make neighbors overlap.
Scenario build_circle(int num_agents, double circle_radius = 40.0);

/// Four 3x3 groups of agents on the arena sides crossing to the reflected
/// side around four static square obstacles.
Scenario build_four_groups_square_obstacles();

/// Same layout with disc obstacles.
Scenario build_four_groups_circular_obstacles();

/// Ten agents in five rows of two advancing across the arena while one large
/// scripted obstacle sweeps back and forth across their path.
Scenario build_row_vs_moving_obstacle(ShapeKind shape);

/// Builder lookup by CLI name (circle, four-groups-square, four-groups-circle,
/// row-moving-square, row-moving-circle). Throws ScenarioError for unknown
/// names.
Scenario scenario_by_name(const std::string& name);
std::vector<std::string> scenario_names();

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& scenario);
void write_scenario_file(const Scenario& scenario, const std::filesystem::path& path);

/// Overrides the speed/acceleration limits of every agent (not obstacles).
void apply_speed_limits(Scenario& scenario, double v_max, double acc_max);

/// Displaces agent start positions by a deterministic uniform jitter in
/// [-magnitude, magnitude] per axis and revalidates. Used by the comparison
/// harness to realize seed variation on the deterministic builders.
void jitter_starts(Scenario& scenario, std::uint64_t seed, double magnitude);

}  // namespace orcafl
