#pragma once

#include <span>
#include <vector>

#include "orcafl/agent.hpp"
#include "orcafl/fis.hpp"
#include "orcafl/geometry.hpp"

namespace orcafl {

/// Half-plane of permitted velocities: { v | dot(v - point, normal) >= 0 }.
/// normal is unit length and points into the permitted side.
struct HalfPlane {
    Vec2 point;
    Vec2 normal;
};

/// Minimal relative-velocity change u escaping the velocity obstacle, and
/// the outward normal n of the obstacle boundary at the escape point.
/// dot(u, n) >= 0 when the queried velocity is inside the obstacle (u pushes
/// out), <= 0 when outside (u points toward the boundary).
struct AvoidanceGeometry {
    Vec2 u;
    Vec2 n;
};

enum class PlannerMode { Orca, OrcaFl };

struct PlannerConfig {
    double tau = 2.0;                      // planning horizon (s)
    PlannerMode mode = PlannerMode::Orca;
    double fixed_share = 0.5;              // responsibility share in Orca mode
    double dt = 0.1;                       // step length; sizes the emergency plane
    double pref_speed_factor = 1.0;        // preferred speed as a fraction of v_max
    double planning_margin = 0.0;          // buffer added to combined radii (m)
};

/// Neighbor snapshot handed to the planner: state plus the sensed context the
/// fuzzy controllers consume.
struct NeighborView {
    const AgentState* state = nullptr;
    double density = 0.0;    // entity count near the sensing robot
    double est_accel = 0.0;  // signed acceleration estimate (m/s^2)
};

/// Exact closest point of the truncated-cone velocity obstacle boundary to
/// v_rel_opt, via the cutoff-arc / leg case analysis. rel_pos is the
/// neighbor's position relative to self; requires norm(rel_pos) > r_ab.
AvoidanceGeometry compute_u_n(Vec2 v_rel_opt, Vec2 rel_pos, double r_ab, double tau);

/// FLC1 output clamped into [0, 1].
double responsibility_share(const fis::FuzzyInferenceSystem& flc1, double dist,
                            double neighbor_speed, double neighbor_accel);

/// Anticipated change of the neighbor's velocity over the next scanning
/// cycle: the FLC2 output m acts as a speed multiplier, so the shift is
/// (m - 1) * neighbor_vel (zero for a stationary neighbor).
Vec2 predicted_velocity_shift(const fis::FuzzyInferenceSystem& flc2, Vec2 neighbor_vel,
                              double density, double neighbor_accel);

/// Permitted-velocity half-plane for self against one non-overlapping
/// neighbor. Optimization velocities are the current velocities; the
/// avoidance geometry is computed at the shifted relative velocity
/// (v_self - v_neighbor - predicted_shift), and the plane anchors at
/// v_self + share * u.
HalfPlane orca_halfplane(const AgentState& self, const AgentState& neighbor,
                         const PlannerConfig& cfg, double share, Vec2 predicted_shift);

/// Fallback plane for an already-overlapping pair: pushes the relative
/// velocity out of the collide-within-one-dt disc so the overlap clears
/// within a step.
HalfPlane emergency_halfplane(const AgentState& self, const AgentState& neighbor,
                              double share, double dt);

/// Plane for one neighbor: the ORCA half-plane when separated, the emergency
/// plane when overlapping.
HalfPlane plane_for_neighbor(const AgentState& self, const AgentState& neighbor,
                             const PlannerConfig& cfg, double share, Vec2 predicted_shift);

/// Closest velocity to v_pref within norm(v) <= v_max intersected with all
/// half-planes (incremental 2D linear program). When the intersection is
/// empty, returns the disc velocity minimizing the maximum plane violation
/// (projected linear program). Always returns a result.
///
/// The first hard_count planes are hard constraints: mutually feasible by
/// construction and kept satisfied by the fallback, which trades off only
/// the remaining planes.
Vec2 solve_velocity(Vec2 v_pref, std::span<const HalfPlane> planes, double v_max,
                    std::size_t hard_count = 0);

/// Tangent facets of the disc of velocities reachable within one step
/// (center v_current, radius acc_max * dt), slightly inscribed so the facet
/// polygon stays inside the disc. Used as hard planes so avoidance
/// constraints are honored under the acceleration limit instead of being
/// cut by a post-hoc clamp.
std::vector<HalfPlane> reachability_facets(Vec2 v_current, double dv_max,
                                           int facet_count = 16);

/// Goal-seeking velocity: cruise speed toward the goal (v_max scaled by the
/// preferred-speed factor), shortened to arrive exactly when closer than one
/// step's travel.
Vec2 preferred_velocity(const AgentState& agent, double dt, double pref_speed_factor = 1.0);

/// One planning cycle for self against its sensed neighbors: one half-plane
/// per neighbor (emergency plane when overlapping), then the constrained
/// closest-velocity solve toward the goal. The fuzzy controllers may be null
/// in Orca mode.
///
/// When `reachable` is set and neighbors exist, the solve is additionally
/// restricted to that velocity disc (hard reachability facets); the sim
/// passes the one-step acceleration disc here.
Vec2 plan_step(const AgentState& self, std::span<const NeighborView> neighbors,
               const PlannerConfig& cfg, const fis::FuzzyInferenceSystem* flc1,
               const fis::FuzzyInferenceSystem* flc2,
               const Disc* reachable = nullptr);

}  // namespace orcafl
