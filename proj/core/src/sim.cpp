#include "orcafl/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "orcafl/geometry.hpp"

namespace orcafl {

World make_world(const Scenario& scenario) {
    World w;
    w.entities = scenario.entities;
    w.scripts = scenario.scripts;
    for (auto& e : w.entities) {
        e.prev_velocity = e.velocity;  // first-step acceleration estimate is 0
        e.done = false;
    }
    // Scripted obstacles start on their script.
    for (std::size_t i = 0; i < w.entities.size(); ++i) {
        if (!w.entities[i].is_agent()) {
            w.entities[i].velocity = w.scripts[i].velocity_at(0);
            w.entities[i].prev_velocity = w.entities[i].velocity;
        }
    }
    return w;
}

std::vector<int> neighbors_in_range(const World& world, int index, double sensor_range,
                                    int max_neighbors) {
    const AgentState& self = world.entities[std::size_t(index)];
    std::vector<std::pair<double, int>> found;
    for (std::size_t i = 0; i < world.entities.size(); ++i) {
        if (int(i) == index) {
            continue;
        }
        const double d = distance(self.position, world.entities[i].position);
        if (d <= sensor_range) {
            found.emplace_back(d, int(i));
        }
    }
    std::sort(found.begin(), found.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first < b.first;
        }
        return world.entities[std::size_t(a.second)].id <
               world.entities[std::size_t(b.second)].id;
    });
    if (int(found.size()) > max_neighbors) {
        found.resize(std::size_t(max_neighbors));
    }
    std::vector<int> out;
    out.reserve(found.size());
    for (const auto& [d, i] : found) {
        out.push_back(i);
    }
    return out;
}

int density_at(const World& world, int index, double sensor_range) {
    const AgentState& self = world.entities[std::size_t(index)];
    int count = 0;
    for (std::size_t i = 0; i < world.entities.size(); ++i) {
        if (int(i) != index &&
            distance(self.position, world.entities[i].position) <= sensor_range) {
            ++count;
        }
    }
    return count;
}

double estimate_accel(const AgentState& entity, double dt) {
    const double mag = norm(entity.velocity - entity.prev_velocity) / dt;
    const double speed_delta = norm(entity.velocity) - norm(entity.prev_velocity);
    return speed_delta >= 0.0 ? mag : -mag;
}

namespace {

// Clamp the planned velocity: target speed capped at v_max first, then the
// velocity moves from the old value toward the target by at most
// acc_max * dt. The result is a convex combination of two in-disc
// velocities, so both limits hold exactly.
Vec2 clamp_velocity(Vec2 v_old, Vec2 v_target, double v_max, double acc_max, double dt) {
    const double target_speed = norm(v_target);
    if (target_speed > v_max) {
        v_target *= v_max / target_speed;
    }
    const Vec2 dv = v_target - v_old;
    const double dv_norm = norm(dv);
    const double dv_max = acc_max * dt;
    if (dv_norm > dv_max) {
        return v_old + dv * (dv_max / dv_norm);
    }
    return v_target;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-agent goal-direction bias, up to +/-1e-3 rad. Perfectly
// symmetric configurations (the circle scenario) otherwise deadlock with
// every agent facing its mirror image; the bias is the seeded equivalent of
// the usual random preferred-velocity perturbation.
double symmetry_bias(int id, std::uint64_t seed, double base, double spread) {
    const std::uint64_t h = splitmix64(std::uint64_t(id) * 0x100000001b3ULL + seed);
    return base + (double(h >> 11) / 9007199254740992.0) * spread;
}

void plan_range(const World& world, const SimConfig& cfg,
                const PlannerFn& planner, std::size_t begin, std::size_t end,
                std::vector<Vec2>& next_vel) {
    std::vector<NeighborView> views;
    for (std::size_t i = begin; i < end; ++i) {
        const AgentState& self = world.entities[i];
        if (!self.is_agent() || self.done) {
            continue;
        }
        const auto neighbor_idx =
            neighbors_in_range(world, int(i), cfg.sensor_range, cfg.max_neighbors);
        const double ego_density = double(density_at(world, int(i), cfg.sensor_range));
        views.clear();
        views.reserve(neighbor_idx.size());
        for (int n : neighbor_idx) {
            const AgentState& nb = world.entities[std::size_t(n)];
            views.push_back({&nb, ego_density, estimate_accel(nb, cfg.dt)});
        }
        next_vel[i] = planner(world, int(i), views);
    }
}

}  // namespace

void step_with_planner(World& world, const SimConfig& cfg, const PlannerFn& planner) {
    const std::size_t n = world.entities.size();
    std::vector<Vec2> next_vel(n);

    // Planning reads the immutable pre-step world; each worker writes only
    // its own slots, so the result is identical for any worker count.
    const int workers = std::max(1, cfg.workers);
    if (workers == 1 || n < 2) {
        plan_range(world, cfg, planner, 0, n, next_vel);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + std::size_t(workers) - 1) / std::size_t(workers);
        for (int t = 0; t < workers; ++t) {
            const std::size_t begin = std::size_t(t) * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) {
                break;
            }
            pool.emplace_back([&, begin, end] {
                plan_range(world, cfg, planner, begin, end, next_vel);
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        AgentState& e = world.entities[i];
        if (!e.is_agent()) {
            e.prev_velocity = e.velocity;
            e.velocity = world.scripts[i].velocity_at(world.step_index);
            e.position += e.velocity * cfg.dt;
            continue;
        }
        if (e.done) {
            e.prev_velocity = e.velocity;
            continue;
        }
        e.prev_velocity = e.velocity;
        e.velocity = clamp_velocity(e.velocity, next_vel[i], e.v_max, e.acc_max, cfg.dt);
        e.position += e.velocity * cfg.dt;
        if (cfg.goal_snap && distance(e.position, e.goal) <= cfg.goal_tolerance) {
            e.position = e.goal;
            e.velocity = {};
            e.done = true;
        }
    }
    ++world.step_index;
}

void step(World& world, const SimConfig& cfg, const fis::FuzzyInferenceSystem* flc1,
          const fis::FuzzyInferenceSystem* flc2) {
    const PlannerConfig pcfg = cfg.planner();
    step_with_planner(world, cfg,
                      [&](const World& w, int index, std::span<const NeighborView> views) {
                          const AgentState& self = w.entities[std::size_t(index)];
                          if (views.empty()) {
                              return plan_step(self, views, pcfg, flc1, flc2);
                          }
                          AgentState biased = self;
                          const double angle = symmetry_bias(self.id, cfg.seed,
                                                             cfg.bias_base, cfg.bias_spread);
                          const Vec2 to_goal = self.goal - self.position;
                          const double c = std::cos(angle);
                          const double s = std::sin(angle);
                          biased.goal = self.position +
                                        Vec2{to_goal.x * c - to_goal.y * s,
                                             to_goal.x * s + to_goal.y * c};
                          const Disc reachable{self.velocity, self.acc_max * cfg.dt};
                          return plan_step(biased, views, pcfg, flc1, flc2, &reachable);
                      });
}

bool pair_overlaps(const AgentState& a, const AgentState& b) {
    if (a.shape == ShapeKind::Square && b.shape == ShapeKind::Disc) {
        return point_to_square_distance(b.position, a.position, a.side) < b.radius;
    }
    if (a.shape == ShapeKind::Disc && b.shape == ShapeKind::Square) {
        return point_to_square_distance(a.position, b.position, b.side) < a.radius;
    }
    return collision_predicate(a.position, b.position, a.radius, b.radius, 0.0);
}

void detect_collisions(const World& before, const World& after,
                       std::vector<CollisionEvent>& ledger) {
    const std::size_t n = after.entities.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool was = pair_overlaps(before.entities[i], before.entities[j]);
            const bool is = pair_overlaps(after.entities[i], after.entities[j]);
            if (!was && is) {
                const int a = after.entities[i].id;
                const int b = after.entities[j].id;
                ledger.push_back({std::min(a, b), std::max(a, b), after.step_index});
            }
        }
    }
}

RunResult run(const Scenario& scenario, const SimConfig& cfg,
              const fis::FuzzyInferenceSystem* flc1, const fis::FuzzyInferenceSystem* flc2) {
    const auto wall_start = std::chrono::steady_clock::now();
    RunResult result;
    World world = make_world(scenario);

    auto log_world = [&](const World& w) {
        for (const auto& e : w.entities) {
            result.trajectory.push_back({w.step_index, e.id, e.position, e.velocity, e.done});
        }
    };
    log_world(world);

    bool converged = false;
    int steps = 0;
    World before;
    while (steps < cfg.max_steps) {
        before = world;
        step(world, cfg, flc1, flc2);
        detect_collisions(before, world, result.events);
        ++steps;
        log_world(world);
        if (std::all_of(world.entities.begin(), world.entities.end(),
                        [](const AgentState& e) { return !e.is_agent() || e.done; })) {
            converged = true;
            break;
        }
    }

    Metrics& m = result.metrics;
    m.num_steps = steps;
    m.sim_elapsed = double(steps) * cfg.dt;
    m.num_agents = scenario.agent_count();
    m.num_obstacles = scenario.obstacle_count();
    m.converged = converged;
    for (const auto& ev : result.events) {
        auto find_kind = [&](int id) {
            for (const auto& e : scenario.entities) {
                if (e.id == id) {
                    return e.kind;
                }
            }
            return EntityKind::Agent;
        };
        if (find_kind(ev.id_a) == EntityKind::Agent && find_kind(ev.id_b) == EntityKind::Agent) {
            ++m.agent_agent_collisions;
        } else {
            ++m.agent_obstacle_collisions;
        }
    }
    m.num_collisions = int(result.events.size());
    m.wall_elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

}  // namespace orcafl
