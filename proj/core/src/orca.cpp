#include "orcafl/orca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace orcafl {

namespace {

constexpr double kEpsilon = 1e-12;

// Internal line form of a half-plane: the permitted side is the left of
// direction, with direction = (normal.y, -normal.x).
struct Line {
    Vec2 point;
    Vec2 direction;
};

Line to_line(const HalfPlane& hp) {
    return {hp.point, Vec2{hp.normal.y, -hp.normal.x}};
}

// 1D program on line `line_no` clipped by the disc and the previous lines.
// Optimizes the closest point to opt (or the extreme along opt when
// direction_opt). Returns false when infeasible.
bool linear_program1(const std::vector<Line>& lines, std::size_t line_no, double radius,
                     Vec2 opt, bool direction_opt, Vec2& result) {
    const Line& ln = lines[line_no];
    const double dot_product = dot(ln.point, ln.direction);
    const double discriminant = dot_product * dot_product + radius * radius - norm_sq(ln.point);
    if (discriminant < 0.0) {
        return false;  // the disc misses this line entirely
    }
    const double sqrt_disc = std::sqrt(discriminant);
    double t_left = -dot_product - sqrt_disc;
    double t_right = -dot_product + sqrt_disc;

    for (std::size_t i = 0; i < line_no; ++i) {
        const double denominator = det(ln.direction, lines[i].direction);
        const double numerator = det(lines[i].direction, ln.point - lines[i].point);
        if (std::abs(denominator) <= kEpsilon) {
            if (numerator < 0.0) {
                return false;  // parallel and on the forbidden side
            }
            continue;
        }
        const double t = numerator / denominator;
        if (denominator >= 0.0) {
            t_right = std::min(t_right, t);
        } else {
            t_left = std::max(t_left, t);
        }
        if (t_left > t_right) {
            return false;
        }
    }

    if (direction_opt) {
        result = dot(opt, ln.direction) > 0.0 ? ln.point + t_right * ln.direction
                                              : ln.point + t_left * ln.direction;
    } else {
        const double t = dot(ln.direction, opt - ln.point);
        result = ln.point + std::clamp(t, t_left, t_right) * ln.direction;
    }
    return true;
}

// Incremental 2D program over all lines within the disc. Returns lines.size()
// on success, else the index of the first infeasible line (result then holds
// the optimum of the feasible prefix).
std::size_t linear_program2(const std::vector<Line>& lines, double radius, Vec2 opt,
                            bool direction_opt, Vec2& result) {
    if (direction_opt) {
        result = opt * radius;  // opt is unit length in this case
    } else if (norm_sq(opt) > radius * radius) {
        result = normalized(opt) * radius;
    } else {
        result = opt;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (det(lines[i].direction, lines[i].point - result) > 0.0) {
            const Vec2 temp = result;
            if (!linear_program1(lines, i, radius, opt, direction_opt, result)) {
                result = temp;
                return i;
            }
        }
    }
    return lines.size();
}

// Fallback when the intersection is empty: walk the remaining soft lines and
// re-optimize along the direction that equalizes violations, yielding the
// disc velocity minimizing the maximum soft violation. The first num_hard
// lines stay satisfied throughout.
void linear_program3(const std::vector<Line>& lines, std::size_t num_hard,
                     std::size_t begin_line, double radius, Vec2& result) {
    double distance = 0.0;
    for (std::size_t i = begin_line; i < lines.size(); ++i) {
        if (det(lines[i].direction, lines[i].point - result) > distance) {
            std::vector<Line> proj_lines(lines.begin(),
                                         lines.begin() + std::ptrdiff_t(num_hard));
            proj_lines.reserve(i);
            for (std::size_t j = num_hard; j < i; ++j) {
                Line line;
                const double determinant = det(lines[i].direction, lines[j].direction);
                if (std::abs(determinant) <= kEpsilon) {
                    if (dot(lines[i].direction, lines[j].direction) > 0.0) {
                        continue;  // same direction, j is redundant here
                    }
                    line.point = 0.5 * (lines[i].point + lines[j].point);
                } else {
                    line.point = lines[i].point +
                                 (det(lines[j].direction, lines[i].point - lines[j].point) /
                                  determinant) *
                                     lines[i].direction;
                }
                line.direction = normalized(lines[j].direction - lines[i].direction);
                proj_lines.push_back(line);
            }
            const Vec2 temp = result;
            if (linear_program2(proj_lines, radius, perp_ccw(lines[i].direction), true,
                                result) < proj_lines.size()) {
                // Only reachable through floating-point noise; keep the
                // previous feasible value.
                result = temp;
            }
            distance = det(lines[i].direction, lines[i].point - result);
        }
    }
}

}  // namespace

AvoidanceGeometry compute_u_n(Vec2 v_rel_opt, Vec2 rel_pos, double r_ab, double tau) {
    const double dist_sq = norm_sq(rel_pos);
    if (r_ab <= 0.0 || tau <= 0.0) {
        throw std::invalid_argument("compute_u_n: requires r_ab > 0 and tau > 0");
    }
    if (dist_sq <= r_ab * r_ab) {
        throw std::invalid_argument("compute_u_n: agents overlap, use the emergency plane");
    }
    const double inv_tau = 1.0 / tau;
    const Vec2 w = v_rel_opt - rel_pos * inv_tau;  // cutoff center to velocity
    const double w_len_sq = norm_sq(w);
    const double dot1 = dot(w, rel_pos);

    if (dot1 < 0.0 && dot1 * dot1 > r_ab * r_ab * w_len_sq) {
        // Nearest to the cutoff arc.
        const double w_len = std::sqrt(w_len_sq);
        const Vec2 unit_w = w / w_len;
        return {(r_ab * inv_tau - w_len) * unit_w, unit_w};
    }

    // Nearest to one of the legs; project onto it.
    const double leg = std::sqrt(dist_sq - r_ab * r_ab);
    Vec2 dir;
    if (det(rel_pos, w) > 0.0) {
        dir = Vec2{rel_pos.x * leg - rel_pos.y * r_ab, rel_pos.x * r_ab + rel_pos.y * leg} /
              dist_sq;
    } else {
        dir = -Vec2{rel_pos.x * leg + rel_pos.y * r_ab,
                    -rel_pos.x * r_ab + rel_pos.y * leg} /
              dist_sq;
    }
    const Vec2 u = dot(v_rel_opt, dir) * dir - v_rel_opt;
    return {u, perp_ccw(dir)};
}

double responsibility_share(const fis::FuzzyInferenceSystem& flc1, double dist,
                            double neighbor_speed, double neighbor_accel) {
    const double s = flc1.evaluate({dist, neighbor_speed, neighbor_accel});
    return std::clamp(s, 0.0, 1.0);
}

Vec2 predicted_velocity_shift(const fis::FuzzyInferenceSystem& flc2, Vec2 neighbor_vel,
                              double density, double neighbor_accel) {
    if (norm_sq(neighbor_vel) == 0.0) {
        return {};
    }
    const double m = flc2.evaluate({norm(neighbor_vel), density, neighbor_accel});
    return (m - 1.0) * neighbor_vel;
}

HalfPlane orca_halfplane(const AgentState& self, const AgentState& neighbor,
                         const PlannerConfig& cfg, double share, Vec2 predicted_shift) {
    const Vec2 rel_pos = neighbor.position - self.position;
    const double r_ab =
        self.planning_radius() + neighbor.planning_radius() + cfg.planning_margin;
    const Vec2 v_rel_opt = self.velocity - neighbor.velocity - predicted_shift;
    const auto [u, n] = compute_u_n(v_rel_opt, rel_pos, r_ab, cfg.tau);
    return {self.velocity + share * u, n};
}

HalfPlane emergency_halfplane(const AgentState& self, const AgentState& neighbor,
                              double share, double dt) {
    const double inv_dt = 1.0 / dt;
    const Vec2 rel_pos = neighbor.position - self.position;
    const Vec2 rel_vel = self.velocity - neighbor.velocity;
    const double r_ab = self.planning_radius() + neighbor.planning_radius();
    const Vec2 w = rel_vel - rel_pos * inv_dt;
    const double w_len = norm(w);
    Vec2 unit_w;
    if (w_len > kEpsilon) {
        unit_w = w / w_len;
    } else if (norm_sq(rel_pos) > 0.0) {
        unit_w = normalized(-rel_pos);
    } else {
        unit_w = {1.0, 0.0};  // exactly coincident: any escape direction works
    }
    const Vec2 u = (r_ab * inv_dt - w_len) * unit_w;
    return {self.velocity + share * u, unit_w};
}

Vec2 solve_velocity_feasible(Vec2 v_pref, std::span<const HalfPlane> planes, double v_max,
                             std::size_t hard_count, bool* feasible) {
    if (v_max <= 0.0) {
        throw std::invalid_argument("solve_velocity: v_max must be > 0");
    }
    std::vector<Line> lines;
    lines.reserve(planes.size());
    for (const auto& hp : planes) {
        lines.push_back(to_line(hp));
    }
    Vec2 result;
    const std::size_t fail = linear_program2(lines, v_max, v_pref, false, result);
    if (feasible != nullptr) {
        *feasible = fail == lines.size();
    }
    if (fail < lines.size()) {
        linear_program3(lines, std::min(hard_count, fail), fail, v_max, result);
    }
    return result;
}

Vec2 solve_velocity(Vec2 v_pref, std::span<const HalfPlane> planes, double v_max,
                    std::size_t hard_count) {
    return solve_velocity_feasible(v_pref, planes, v_max, hard_count, nullptr);
}

std::vector<HalfPlane> reachability_facets(Vec2 v_current, double dv_max, int facet_count) {
    // Inscribed so the facet polygon is a subset of the disc: the returned
    // velocity then always respects the acceleration limit exactly.
    const double effective = dv_max * std::cos(std::numbers::pi / double(facet_count));
    std::vector<HalfPlane> facets;
    facets.reserve(std::size_t(facet_count));
    for (int j = 0; j < facet_count; ++j) {
        const double theta = 2.0 * std::numbers::pi * (double(j) + 0.5) / double(facet_count);
        const Vec2 dir{std::cos(theta), std::sin(theta)};
        facets.push_back({v_current + dir * effective, -dir});
    }
    return facets;
}

Vec2 preferred_velocity(const AgentState& agent, double dt, double pref_speed_factor) {
    const Vec2 to_goal = agent.goal - agent.position;
    const double dist = norm(to_goal);
    if (dist == 0.0) {
        return {};
    }
    const double speed = std::min(agent.v_max * pref_speed_factor, dist / dt);
    return to_goal * (speed / dist);
}

HalfPlane plane_for_neighbor(const AgentState& self, const AgentState& neighbor,
                             const PlannerConfig& cfg, double share, Vec2 predicted_shift) {
    const double r_ab =
        self.planning_radius() + neighbor.planning_radius() + cfg.planning_margin;
    if (norm_sq(neighbor.position - self.position) <= r_ab * r_ab) {
        return emergency_halfplane(self, neighbor, share, cfg.dt);
    }
    return orca_halfplane(self, neighbor, cfg, share, predicted_shift);
}

Vec2 plan_step(const AgentState& self, std::span<const NeighborView> neighbors,
               const PlannerConfig& cfg, const fis::FuzzyInferenceSystem* flc1,
               const fis::FuzzyInferenceSystem* flc2, const Disc* reachable) {
    const Vec2 v_pref = preferred_velocity(self, cfg.dt, cfg.pref_speed_factor);
    std::vector<HalfPlane> planes;
    std::vector<HalfPlane> anticipation;
    std::size_t hard_count = 0;
    if (reachable != nullptr && !neighbors.empty()) {
        planes = reachability_facets(reachable->center, reachable->radius);
        hard_count = planes.size();
    }
    planes.reserve(hard_count + neighbors.size());
    for (const auto& nb : neighbors) {
        const AgentState& other = *nb.state;
        double share = cfg.fixed_share;
        Vec2 shift{};
        if (cfg.mode == PlannerMode::OrcaFl) {
            if (flc1 == nullptr || flc2 == nullptr) {
                throw std::logic_error("plan_step: OrcaFl mode requires both controllers");
            }
            share = responsibility_share(*flc1, distance(self.position, other.position),
                                         norm(other.velocity), nb.est_accel);
            // Reciprocity floor: a peer running the same policy covers at
            // most 1 - s of the needed change, so shedding below one half
            // would leave part of u uncovered in symmetric encounters. The
            // fuzzy share only ever adds responsibility beyond the half.
            share = std::max(share, 0.5);
            shift = predicted_velocity_shift(*flc2, other.velocity, nb.density,
                                             nb.est_accel);
            // The prediction targets the next scanning cycle; no neighbor can
            // change velocity faster than its acceleration limit allows, so
            // larger shifts would anticipate impossible motion.
            const double shift_cap = other.acc_max * cfg.dt;
            const double shift_norm = norm(shift);
            if (shift_norm > shift_cap && shift_cap >= 0.0) {
                shift = shift_norm > 0.0 ? shift * (shift_cap / shift_norm) : Vec2{};
            }
        }
        if (!other.is_agent()) {
            // Scripted obstacles never yield; take the full change.
            share = 1.0;
        }
        // The plain reciprocal plane is always enforced so the pairwise
        // guarantee against the neighbor's current velocity survives any
        // prediction error; a non-neutral prediction adds one advisory
        // plane for the anticipated neighbor.
        planes.push_back(plane_for_neighbor(self, other, cfg, share, {}));
        if (norm_sq(shift) > 0.0) {
            anticipation.push_back(plane_for_neighbor(self, other, cfg, share, shift));
        }
    }
    if (anticipation.empty()) {
        return solve_velocity(v_pref, planes, self.v_max, hard_count);
    }
    // Anticipation participates while the program stays feasible and is shed
    // first under congestion, before the fallback would start trading away
    // the reciprocal base constraints.
    std::vector<HalfPlane> combined = planes;
    combined.insert(combined.end(), anticipation.begin(), anticipation.end());
    bool feasible = false;
    const Vec2 anticipated =
        solve_velocity_feasible(v_pref, combined, self.v_max, hard_count, &feasible);
    if (feasible) {
        return anticipated;
    }
    return solve_velocity(v_pref, planes, self.v_max, hard_count);
}

}  // namespace orcafl
