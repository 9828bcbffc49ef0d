#include "orcafl/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace orcafl {

Vec2 relative_position(Vec2 pa, Vec2 pb) { return pb - pa; }

double distance(Vec2 pa, Vec2 pb) { return norm(pb - pa); }

bool collision_predicate(Vec2 pa, Vec2 pb, double ra, double rb, double margin) {
    return distance(pa, pb) < ra + rb + margin;
}

TruncatedCone truncated_cone(Vec2 rel_pos, double r_ab, double tau) {
    if (r_ab <= 0.0 || tau <= 0.0) {
        throw std::invalid_argument("truncated_cone: requires r_ab > 0 and tau > 0");
    }
    const double dist_sq = norm_sq(rel_pos);
    if (dist_sq <= r_ab * r_ab) {
        throw std::invalid_argument("truncated_cone: agents overlap, cone undefined");
    }
    // Tangent directions from the origin; the legs touch every disc of the
    // family, so they can be computed from the untruncated pair (rel_pos, r).
    const double leg = std::sqrt(dist_sq - r_ab * r_ab);
    TruncatedCone cone;
    cone.cutoff_center = rel_pos / tau;
    cone.cutoff_radius = r_ab / tau;
    cone.left_leg = Vec2{rel_pos.x * leg - rel_pos.y * r_ab,
                         rel_pos.x * r_ab + rel_pos.y * leg} /
                    dist_sq;
    cone.right_leg = Vec2{rel_pos.x * leg + rel_pos.y * r_ab,
                          -rel_pos.x * r_ab + rel_pos.y * leg} /
                     dist_sq;
    return cone;
}

bool vo_contains(Vec2 v_rel, Vec2 rel_pos, double r_ab, double tau) {
    if (r_ab <= 0.0 || tau <= 0.0) {
        throw std::invalid_argument("vo_contains: requires r_ab > 0 and tau > 0");
    }
    const double dist_sq = norm_sq(rel_pos);
    if (dist_sq <= r_ab * r_ab) {
        throw std::invalid_argument("vo_contains: agents overlap, VO undefined");
    }
    // Membership in D(rel_pos / t, r / t) is norm(t * v_rel - rel_pos) < r,
    // a quadratic in t minimized at t* = dot(v_rel, rel_pos) / |v_rel|^2.
    const double vv = norm_sq(v_rel);
    if (vv == 0.0) {
        return false;  // zero relative velocity never closes the gap
    }
    const double vp = dot(v_rel, rel_pos);
    if (vp <= 0.0) {
        return false;  // diverging: the quadratic only grows on (0, tau]
    }
    const double t = std::min(vp / vv, tau);
    return norm_sq(v_rel * t - rel_pos) < r_ab * r_ab;
}

bool rvo_contains(Vec2 va, Vec2 vb, Vec2 rel_pos, double r_ab, double tau) {
    return vo_contains((va - vb) * 0.5, rel_pos, r_ab, tau);
}

double point_to_square_distance(Vec2 p, Vec2 square_center, double side) {
    const double half = side * 0.5;
    const double dx = std::max(std::abs(p.x - square_center.x) - half, 0.0);
    const double dy = std::max(std::abs(p.y - square_center.y) - half, 0.0);
    return std::hypot(dx, dy);
}

}  // namespace orcafl
