#pragma once

#include <string>

#include "orcafl/sim.hpp"

namespace orcafl {

inline constexpr const char* kMetricsCsvHeader =
    "scenario,mode,vmax,seed,steps,sim_elapsed_s,wall_elapsed_s,obstacles,agents,"
    "collisions,converged";

std::string mode_name(PlannerMode mode);
PlannerMode parse_mode(const std::string& name);

/// One CSV row in the fixed column order of kMetricsCsvHeader.
std::string metrics_csv_row(const std::string& scenario, PlannerMode mode, double v_max,
                            const std::string& seed, const Metrics& metrics);

/// Line-delimited JSON records {step, id, x, y, vx, vy, done}, one per
/// trajectory entry. Formatting is fixed so identical runs are byte-identical.
std::string trajectory_jsonl(std::span<const TrajectoryRecord> trajectory);

}  // namespace orcafl
