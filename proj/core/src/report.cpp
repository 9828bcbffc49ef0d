#include "orcafl/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace orcafl {

std::string mode_name(PlannerMode mode) {
    return mode == PlannerMode::OrcaFl ? "orca-fl" : "orca";
}

PlannerMode parse_mode(const std::string& name) {
    if (name == "orca") {
        return PlannerMode::Orca;
    }
    if (name == "orca-fl") {
        return PlannerMode::OrcaFl;
    }
    throw std::invalid_argument("unknown mode '" + name + "' (expected orca or orca-fl)");
}

std::string metrics_csv_row(const std::string& scenario, PlannerMode mode, double v_max,
                            const std::string& seed, const Metrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%g,%s,%d,%g,%.4f,%d,%d,%d,%s",
                  scenario.c_str(), mode_name(mode).c_str(), v_max, seed.c_str(),
                  m.num_steps, m.sim_elapsed, m.wall_elapsed, m.num_obstacles,
                  m.num_agents, m.num_collisions, m.converged ? "true" : "false");
    return buf;
}

std::string trajectory_jsonl(std::span<const TrajectoryRecord> trajectory) {
    std::string out;
    out.reserve(trajectory.size() * 96);
    char buf[256];
    for (const auto& rec : trajectory) {
        std::snprintf(buf, sizeof(buf),
                      "{\"step\":%d,\"id\":%d,\"x\":%.17g,\"y\":%.17g,\"vx\":%.17g,"
                      "\"vy\":%.17g,\"done\":%s}\n",
                      rec.step, rec.id, rec.position.x, rec.position.y, rec.velocity.x,
                      rec.velocity.y, rec.done ? "true" : "false");
        out += buf;
    }
    return out;
}

}  // namespace orcafl
