#pragma once

#include <span>
#include <string>

#include "orcafl/sim.hpp"

namespace orcafl {

/// Static SVG rendering of a finished run: one polyline per entity, obstacle
/// shapes shaded at their initial position, start dots and goal markers.
std::string render_svg(const Scenario& scenario, std::span<const TrajectoryRecord> trajectory,
                       int width_px = 800);

void write_svg_file(const Scenario& scenario, std::span<const TrajectoryRecord> trajectory,
                    const std::filesystem::path& path, int width_px = 800);

}  // namespace orcafl
