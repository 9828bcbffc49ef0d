#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "orcafl/controllers.hpp"
#include "orcafl/orca.hpp"

using namespace orcafl;

namespace {

const fis::FuzzyInferenceSystem& flc1() {
    static const auto instance = fis::build_flc1();
    return instance;
}

const fis::FuzzyInferenceSystem& flc2() {
    static const auto instance = fis::build_flc2();
    return instance;
}

AgentState agent_at(int id, Vec2 pos, Vec2 vel, Vec2 goal, double v_max = 10.0) {
    AgentState a;
    a.id = id;
    a.position = pos;
    a.velocity = vel;
    a.prev_velocity = vel;
    a.goal = goal;
    a.v_max = v_max;
    return a;
}

}  // namespace

TEST_CASE("compute_u_n cutoff-arc case pinned by the boundary oracle") {
    // Neighbor 10 m ahead, zero relative velocity, tau 2: cutoff disc at
    // (5, 0) radius 0.5, nearest boundary point (4.5, 0).
    const auto [u, n] = compute_u_n({0, 0}, {10, 0}, 1.0, 2.0);
    const auto oracle = oracles::nearest_boundary_sampled({0, 0}, {10, 0}, 1.0, 2.0);
    CHECK(u.x == doctest::Approx(4.5).epsilon(1e-9));
    CHECK(u.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(n.x == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(n.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(norm(Vec2{0, 0} + u - oracle.point) < 1e-4);
    CHECK(norm(n - oracle.normal) < 1e-3);
    // Outside the obstacle: u points toward the boundary.
    CHECK(dot(u, n) <= 0.0);
}

TEST_CASE("compute_u_n sign conventions") {
    SUBCASE("far outside along the receding direction") {
        const auto [u, n] = compute_u_n({-30, 0}, {10, 0}, 1.0, 2.0);
        CHECK(dot(u, n) <= 0.0);
    }
    SUBCASE("inside the obstacle pushes outward") {
        // (5, 0) is the cutoff center, well inside.
        const auto [u, n] = compute_u_n({4.9, 0}, {10, 0}, 1.0, 2.0);
        CHECK(dot(u, n) >= 0.0);
        CHECK(vo_contains({4.9, 0}, {10, 0}, 1.0, 2.0));
    }
    SUBCASE("on the boundary u vanishes") {
        const auto [u, n] = compute_u_n({4.5, 0}, {10, 0}, 1.0, 2.0);
        CHECK(norm(u) < 1e-12);
        CHECK(norm(n) == doctest::Approx(1.0));
    }
}

TEST_CASE("compute_u_n agrees with the boundary-sampling oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coord(-15.0, 15.0);
    std::uniform_real_distribution<double> radius(0.5, 3.0);
    int checked = 0;
    while (checked < 60) {
        const Vec2 rel{coord(rng), coord(rng)};
        const double r = radius(rng);
        if (norm(rel) <= r + 0.2) {
            continue;
        }
        const Vec2 v{coord(rng), coord(rng)};
        const double tau = 2.0;
        const auto [u, n] = compute_u_n(v, rel, r, tau);
        const auto oracle = oracles::nearest_boundary_sampled(v, rel, r, tau, 400000);
        // The oracle samples the boundary, so compare reached points and the
        // claimed minimal distance.
        CHECK(norm(v + u - oracle.point) < 5e-3);
        CHECK(norm(u) == doctest::Approx(norm(oracle.point - v)).epsilon(1e-3));
        CHECK(norm(n) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(norm(n - oracle.normal) < 5e-3);
        // Sign convention versus membership.
        if (vo_contains(v, rel, r, tau)) {
            CHECK(dot(u, n) >= -1e-12);
        } else {
            CHECK(dot(u, n) <= 1e-12);
        }
        ++checked;
    }
}

TEST_CASE("compute_u_n rejects overlap") {
    CHECK_THROWS_AS(compute_u_n({0, 0}, {1, 0}, 2.0, 2.0), std::invalid_argument);
}

TEST_CASE("responsibility_share pinned cases") {
    CHECK(responsibility_share(flc1(), 100.0, 0.0, -250.0) == doctest::Approx(0.0).epsilon(0.01));
    CHECK(responsibility_share(flc1(), 0.0, 200.0, 250.0) ==
          doctest::Approx(0.974).epsilon(1e-3));
    // Clamp idempotence beyond the universe.
    CHECK(responsibility_share(flc1(), 0.0, 200.0, 600.0) ==
          responsibility_share(flc1(), 0.0, 200.0, 500.0));
    // Always in [0, 1].
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(0, 120), v(0, 250), a(-600, 600);
    for (int i = 0; i < 100; ++i) {
        const double s = responsibility_share(flc1(), d(rng), v(rng), a(rng));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("predicted_velocity_shift") {
    CHECK(predicted_velocity_shift(flc2(), {0, 0}, 0.0, 0.0) == Vec2{0, 0});
    // m ~ 2.4445 at the (VF, L, ACC) apexes: shift = (m - 1) * v.
    const Vec2 y = predicted_velocity_shift(flc2(), {2, 0}, 0.0, 250.0);
    // Speed input 2 m/s sits inside VS, not VF; recompute with the real m.
    const double m = flc2().evaluate({2.0, 0.0, 250.0});
    CHECK(y.x == doctest::Approx((m - 1.0) * 2.0));
    CHECK(y.y == 0.0);
}

TEST_CASE("predicted_velocity_shift multiplier anchor at the VF apex") {
    // A neighbor moving at the velocity apex 200 with low density and
    // accelerating: m = centroid of 'g' = 2.4445, shift = 1.4445 * v.
    const Vec2 v{200.0, 0.0};
    const Vec2 y = predicted_velocity_shift(flc2(), v, 0.0, 250.0);
    CHECK(y.x == doctest::Approx(1.44446667 * 200.0).epsilon(1e-3));
    CHECK(y.y == 0.0);
}

TEST_CASE("orca_halfplane") {
    SUBCASE("cutoff-arc case anchors half of u") {
        AgentState self = agent_at(0, {0, 0}, {0, 0}, {50, 0});
        AgentState other = agent_at(1, {10, 0}, {0, 0}, {-50, 0});
        self.radius = other.radius = 0.5;
        const PlannerConfig cfg{2.0, PlannerMode::Orca, 0.5, 0.1};
        const HalfPlane hp = orca_halfplane(self, other, cfg, 0.5, {});
        CHECK(hp.point.x == doctest::Approx(2.25));
        CHECK(hp.point.y == doctest::Approx(0.0));
        CHECK(hp.normal.x == doctest::Approx(-1.0));
        // Current velocity (0,0) is permitted: no collision course yet.
        CHECK(dot(self.velocity - hp.point, hp.normal) >= 0.0);
    }
    SUBCASE("share 1 anchors the full u") {
        AgentState self = agent_at(0, {0, 0}, {3, 0}, {50, 0});
        AgentState other = agent_at(1, {8, 0}, {-3, 0}, {-50, 0});
        const PlannerConfig cfg{2.0, PlannerMode::Orca, 0.5, 0.1};
        const auto geo = compute_u_n(self.velocity - other.velocity,
                                     other.position - self.position, 2.0, cfg.tau);
        const HalfPlane hp = orca_halfplane(self, other, cfg, 1.0, {});
        CHECK(norm(hp.point - (self.velocity + geo.u)) < 1e-12);
    }
    SUBCASE("symmetric head-on pair: mirror planes, shares sum to the full u") {
        AgentState a = agent_at(0, {-5, 0}, {4, 0}, {5, 0});
        AgentState b = agent_at(1, {5, 0}, {-4, 0}, {-5, 0});
        const PlannerConfig cfg{2.0, PlannerMode::Orca, 0.5, 0.1};
        const auto geo_a = compute_u_n(a.velocity - b.velocity, b.position - a.position,
                                       2.0, cfg.tau);
        const auto geo_b = compute_u_n(b.velocity - a.velocity, a.position - b.position,
                                       2.0, cfg.tau);
        // Central symmetry of the pair geometry.
        CHECK(norm(geo_a.u + geo_b.u) < 1e-12);
        CHECK(norm(geo_a.n + geo_b.n) < 1e-12);
        const HalfPlane ha = orca_halfplane(a, b, cfg, 0.5, {});
        const HalfPlane hb = orca_halfplane(b, a, cfg, 0.5, {});
        // Required velocity change along each normal sums to norm(u): the
        // pair is inside the VO so u is parallel to n.
        const double change_a = dot(ha.point - a.velocity, ha.normal);
        const double change_b = dot(hb.point - b.velocity, hb.normal);
        CHECK(change_a + change_b == doctest::Approx(norm(geo_a.u)));
    }
}

TEST_CASE("solve_velocity basics") {
    SUBCASE("no planes clamps to the disc") {
        CHECK(solve_velocity({3, 4}, {}, 10.0) == Vec2{3, 4});
        const Vec2 clamped = solve_velocity({30, 40}, {}, 10.0);
        CHECK(norm(clamped) == doctest::Approx(10.0));
        CHECK(clamped.x == doctest::Approx(6.0));
        CHECK(clamped.y == doctest::Approx(8.0));
    }
    SUBCASE("single plane projection pinned by the grid oracle") {
        const HalfPlane plane{{0, 0}, {1, 0}};
        const Vec2 got = solve_velocity({-3, 1}, std::span(&plane, 1), 10.0);
        CHECK(got.x == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(got.y == doctest::Approx(1.0).epsilon(1e-12));
        const auto oracle = oracles::grid_argmin({-3, 1}, std::span(&plane, 1), 10.0, 0.01);
        REQUIRE(oracle.has_value());
        CHECK(norm(got - *oracle) < 0.015);
    }
    SUBCASE("empty intersection falls back to least violation") {
        const std::vector<HalfPlane> planes{{{0, 1}, {0, 1}}, {{0, -1}, {0, -1}}};
        const Vec2 got = solve_velocity({0, 0}, planes, 10.0);
        const auto [best, best_violation] = oracles::grid_min_violation(planes, 10.0, 0.05);
        CHECK(oracles::max_violation(got, planes) <= best_violation + 1e-9);
    }
}

TEST_CASE("solve_velocity scale invariance") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> coord(-8.0, 8.0);
    std::uniform_real_distribution<double> scale(0.25, 16.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<HalfPlane> planes;
        const int n = int(rng() % 4);
        for (int i = 0; i < n; ++i) {
            const Vec2 nrm = normalized({coord(rng), coord(rng)});
            if (norm(nrm) == 0.0) {
                continue;
            }
            planes.push_back({{coord(rng) * 0.25, coord(rng) * 0.25}, nrm});
        }
        const Vec2 pref{coord(rng), coord(rng)};
        const double k = scale(rng);
        const Vec2 base = solve_velocity(pref, planes, 10.0);
        std::vector<HalfPlane> scaled = planes;
        for (auto& hp : scaled) {
            hp.point *= k;
        }
        const Vec2 scaled_out = solve_velocity(pref * k, scaled, 10.0 * k);
        CHECK(norm(scaled_out - base * k) < 1e-6 * std::max(1.0, k));
    }
}

TEST_CASE("solve_velocity matches the grid oracle on random feasible instances") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    const double v_max = 10.0;
    const double cell = 0.001 * v_max;
    int checked = 0;
    while (checked < 40) {
        std::vector<HalfPlane> planes;
        const int n = 1 + int(rng() % 4);
        for (int i = 0; i < n; ++i) {
            Vec2 nrm = normalized({coord(rng), coord(rng)});
            if (norm(nrm) == 0.0) {
                nrm = {1, 0};
            }
            planes.push_back({{coord(rng) * 0.4, coord(rng) * 0.4}, nrm});
        }
        const Vec2 pref{coord(rng), coord(rng)};
        const auto oracle = oracles::grid_argmin(pref, planes, v_max, cell);
        if (!oracle.has_value()) {
            continue;
        }
        const Vec2 got = solve_velocity(pref, planes, v_max);
        CHECK(oracles::max_violation(got, planes) <= 1e-9);
        CHECK(norm(got) <= v_max + 1e-9);
        // Position match at grid precision. When the optimum lies on the
        // disc or a shallow constraint line, the nearest feasible grid
        // point can sit several cells away tangentially with a marginally
        // worse objective; grid-level optimality is then the objective
        // comparison.
        const bool position_match = norm(got - *oracle) <= cell * 1.5;
        const bool objective_match =
            norm(got - pref) <= norm(*oracle - pref) + 1e-9;
        CHECK((position_match || objective_match));
        ++checked;
    }
}

TEST_CASE("plan_step") {
    const PlannerConfig orca_cfg{2.0, PlannerMode::Orca, 0.5, 0.1};
    SUBCASE("no neighbors heads for the goal at full speed") {
        const AgentState self = agent_at(0, {0, 0}, {0, 0}, {100, 0});
        const Vec2 v = plan_step(self, {}, orca_cfg, nullptr, nullptr);
        CHECK(v.x == doctest::Approx(10.0));
        CHECK(v.y == doctest::Approx(0.0));
    }
    SUBCASE("distant neighbor outside the horizon leaves v_pref uncut") {
        const AgentState self = agent_at(0, {0, 0}, {10, 0}, {100, 0});
        AgentState other = agent_at(1, {0, 60}, {0, 0}, {0, -60});
        const NeighborView view{&other, 1.0, 0.0};
        const Vec2 v = plan_step(self, std::span(&view, 1), orca_cfg, nullptr, nullptr);
        CHECK(v.x == doctest::Approx(10.0));
        CHECK(v.y == doctest::Approx(0.0).epsilon(1e-12));
        // And the plane indeed permits it.
        const HalfPlane hp = orca_halfplane(self, other, orca_cfg, 0.5, {});
        CHECK(dot(v - hp.point, hp.normal) >= -1e-12);
    }
    SUBCASE("symmetric pair sidesteps with centrally symmetric outputs") {
        AgentState a = agent_at(0, {-8, 0}, {10, 0}, {8, 0});
        AgentState b = agent_at(1, {8, 0}, {-10, 0}, {-8, 0});
        const NeighborView nb_of_a{&b, 1.0, 0.0};
        const NeighborView nb_of_b{&a, 1.0, 0.0};
        const Vec2 va = plan_step(a, std::span(&nb_of_a, 1), orca_cfg, nullptr, nullptr);
        const Vec2 vb = plan_step(b, std::span(&nb_of_b, 1), orca_cfg, nullptr, nullptr);
        CHECK(norm(va + vb) < 1e-9);
        CHECK(norm(va) > 0.0);
    }
    SUBCASE("fl mode works against a moving neighbor") {
        AgentState a = agent_at(0, {-8, 0}, {10, 0}, {8, 0});
        AgentState b = agent_at(1, {8, 0}, {-10, 0}, {-8, 0});
        const NeighborView nb_of_a{&b, 2.0, 5.0};
        const PlannerConfig fl_cfg{2.0, PlannerMode::OrcaFl, 0.5, 0.1};
        const Vec2 va = plan_step(a, std::span(&nb_of_a, 1), fl_cfg, &flc1(), &flc2());
        CHECK(norm(va) <= a.v_max + 1e-9);
        CHECK_THROWS_AS(plan_step(a, std::span(&nb_of_a, 1), fl_cfg, nullptr, nullptr),
                        std::logic_error);
    }
}

TEST_CASE("hard planes survive the infeasibility fallback") {
    // Two incompatible soft planes plus one hard plane: the fallback result
    // must still satisfy the hard plane exactly.
    const std::vector<HalfPlane> planes{
        {{3, 0}, {1, 0}},    // hard: v.x >= 3
        {{0, 2}, {0, 1}},    // soft: v.y >= 2
        {{0, -2}, {0, -1}},  // soft: v.y <= -2 (conflicts with the above)
    };
    const Vec2 got = solve_velocity({0, 0}, planes, 10.0, 1);
    CHECK(dot(got - planes[0].point, planes[0].normal) >= -1e-9);
}

TEST_CASE("reachability facets keep the plan within one step's acceleration") {
    const Disc reachable{{5.0, 0.0}, 2.0};
    AgentState self = agent_at(0, {0, 0}, {5, 0}, {50, 0});
    AgentState other = agent_at(1, {6, 0}, {-5, 0}, {-50, 0});
    const NeighborView view{&other, 1.0, 0.0};
    const PlannerConfig cfg{2.0, PlannerMode::Orca, 0.5, 0.1};
    const Vec2 v = plan_step(self, std::span(&view, 1), cfg, nullptr, nullptr, &reachable);
    CHECK(norm(v - self.velocity) <= 2.0 + 1e-9);
    // Without neighbors the facets are skipped and v_pref comes back whole.
    const Vec2 unconstrained = plan_step(self, {}, cfg, nullptr, nullptr, &reachable);
    CHECK(norm(unconstrained) == doctest::Approx(10.0));
}

TEST_CASE("orca mode builds exactly one plane per neighbor") {
    // plan_step in Orca mode must equal the solve over exactly the
    // per-neighbor planes.
    const PlannerConfig cfg{2.0, PlannerMode::Orca, 0.5, 0.1};
    AgentState self = agent_at(0, {0, 0}, {5, 0}, {50, 0});
    std::vector<AgentState> others;
    others.push_back(agent_at(1, {12, 1}, {-4, 0}, {-50, 0}));
    others.push_back(agent_at(2, {8, -4}, {0, 3}, {0, 50}));
    others.push_back(agent_at(3, {-6, 6}, {2, -2}, {50, -50}));
    std::vector<NeighborView> views;
    std::vector<HalfPlane> expected_planes;
    for (const auto& o : others) {
        views.push_back({&o, 1.0, 0.0});
        expected_planes.push_back(plane_for_neighbor(self, o, cfg, 0.5, {}));
    }
    const Vec2 got = plan_step(self, views, cfg, nullptr, nullptr);
    const Vec2 expected =
        solve_velocity(preferred_velocity(self, cfg.dt), expected_planes, self.v_max);
    CHECK(norm(got - expected) == 0.0);
}

TEST_CASE("pairwise avoidance guarantee over the horizon") {
    // Two agents with constant intent, shares s and 1-s, y = 0, planning only
    // against each other: no collision while simulating tau seconds.
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> pos(-12.0, 12.0);
    std::uniform_real_distribution<double> share(0.0, 1.0);
    const double dt = 0.1;
    const double tau = 2.0;
    int checked = 0;
    while (checked < 150) {
        AgentState a = agent_at(0, {pos(rng), pos(rng)}, {0, 0}, {pos(rng), pos(rng)});
        AgentState b = agent_at(1, {pos(rng), pos(rng)}, {0, 0}, {pos(rng), pos(rng)});
        if (distance(a.position, b.position) <= a.radius + b.radius + 0.5) {
            continue;
        }
        a.velocity = preferred_velocity(a, dt);
        b.velocity = preferred_velocity(b, dt);
        const double s = share(rng);
        bool collided = false;
        for (int step = 0; step < int(tau / dt); ++step) {
            const PlannerConfig cfg{tau, PlannerMode::Orca, 0.5, dt};
            const HalfPlane pa = plane_for_neighbor(a, b, cfg, s, {});
            const HalfPlane pb = plane_for_neighbor(b, a, cfg, 1.0 - s, {});
            const Vec2 va = solve_velocity(preferred_velocity(a, dt), std::span(&pa, 1),
                                           a.v_max);
            const Vec2 vb = solve_velocity(preferred_velocity(b, dt), std::span(&pb, 1),
                                           b.v_max);
            a.velocity = va;
            b.velocity = vb;
            a.position += va * dt;
            b.position += vb * dt;
            if (collision_predicate(a.position, b.position, a.radius, b.radius, 0.0)) {
                collided = true;
                break;
            }
        }
        CHECK_FALSE(collided);
        ++checked;
    }
}
