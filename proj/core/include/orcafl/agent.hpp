#pragma once

#include <cmath>

#include "orcafl/vec2.hpp"

namespace orcafl {

enum class EntityKind { Agent, ScriptedObstacle };

enum class ShapeKind { Disc, Square };

/// State of one planning agent or scripted obstacle.
///
/// For squares, `radius` holds the circumscribed disc radius (side * sqrt2/2)
/// used for planning; `side` keeps the exact extent for collision accounting.
struct AgentState {
    int id = 0;
    Vec2 position;
    Vec2 velocity;
    Vec2 prev_velocity;
    double radius = 1.0;
    Vec2 goal;
    double v_max = 10.0;
    double acc_max = 20.0;
    EntityKind kind = EntityKind::Agent;
    ShapeKind shape = ShapeKind::Disc;
    double side = 0.0;  // square side; 0 for discs
    bool done = false;

    bool is_agent() const { return kind == EntityKind::Agent; }
    double planning_radius() const { return radius; }

    bool operator==(const AgentState&) const = default;
};

inline double square_circumscribed_radius(double side) {
    return side * std::sqrt(2.0) * 0.5;
}

}  // namespace orcafl
