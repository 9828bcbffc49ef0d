#pragma once

#include "orcafl/vec2.hpp"

namespace orcafl {

/// Disc in workspace (m) or velocity space (m/s).
struct Disc {
    Vec2 center;
    double radius = 0.0;  // >= 0
};

/// Velocity-obstacle cone of a neighbor at relative position rel_pos
/// (neighbor minus self), truncated by the cutoff disc at the time horizon.
///
/// The obstacle set is the union of discs D(rel_pos / t, r / t) over
/// t in (0, tau]; its boundary is the cutoff arc (the t = tau disc) plus the
/// two leg rays from the origin tangent to every disc of the family.
struct TruncatedCone {
    Vec2 cutoff_center;        // rel_pos / tau
    double cutoff_radius = 0;  // r / tau, > 0
    Vec2 left_leg;             // unit, tangent to the cutoff disc
    Vec2 right_leg;            // unit, tangent to the cutoff disc
};

/// Relative position of b as seen from a.
Vec2 relative_position(Vec2 pa, Vec2 pb);

/// Euclidean distance between two points.
double distance(Vec2 pa, Vec2 pb);

/// True iff the two discs overlap within the extra margin:
/// distance < ra + rb + margin (strict).
bool collision_predicate(Vec2 pa, Vec2 pb, double ra, double rb, double margin);

/// Builds the truncated velocity-obstacle cone for combined radius r_ab > 0
/// at relative position rel_pos (norm(rel_pos) > r_ab) and horizon tau > 0.
TruncatedCone truncated_cone(Vec2 rel_pos, double r_ab, double tau);

/// True iff the relative velocity v_rel = vA - vB leads to a collision within
/// the horizon, i.e. exists t in (0, tau] with norm(t * v_rel - rel_pos) < r_ab.
/// Closed form (quadratic minimization over t); no sampling.
///
/// Throws std::invalid_argument when the agents already overlap
/// (norm(rel_pos) <= r_ab): the cone degenerates and callers must handle the
/// in-collision case on a separate path.
bool vo_contains(Vec2 v_rel, Vec2 rel_pos, double r_ab, double tau);

/// Reciprocal variant: vA is in the VO translated by (vA + vB) / 2, which
/// reduces to vo_contains of half the relative velocity. Membership predicate
/// only; no planner consumes it.
bool rvo_contains(Vec2 va, Vec2 vb, Vec2 rel_pos, double r_ab, double tau);

/// Distance from a point to an axis-aligned square (0 inside).
double point_to_square_distance(Vec2 p, Vec2 square_center, double side);

}  // namespace orcafl
