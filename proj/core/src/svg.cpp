#include "orcafl/svg.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace orcafl {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string color_for(int index, int total) {
    const int hue = total > 0 ? (index * 360) / total : 0;
    return "hsl(" + std::to_string(hue) + ",70%,45%)";
}

}  // namespace

std::string render_svg(const Scenario& scenario, std::span<const TrajectoryRecord> trajectory,
                       int width_px) {
    const Rect& b = scenario.bounds;
    const double margin = 2.0;
    const double world_w = (b.xmax - b.xmin) + 2.0 * margin;
    const double world_h = (b.ymax - b.ymin) + 2.0 * margin;
    const double scale = double(width_px) / world_w;
    const int height_px = int(world_h * scale);

    // SVG y grows downward; flip the world y axis.
    auto sx = [&](double x) { return (x - b.xmin + margin) * scale; };
    auto sy = [&](double y) { return (b.ymax - y + margin) * scale; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\""
        << height_px << "\" viewBox=\"0 0 " << width_px << " " << height_px << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "  <rect x=\"" << fmt(sx(b.xmin)) << "\" y=\"" << fmt(sy(b.ymax)) << "\" width=\""
        << fmt((b.xmax - b.xmin) * scale) << "\" height=\"" << fmt((b.ymax - b.ymin) * scale)
        << "\" fill=\"none\" stroke=\"#999\"/>\n";

    // Obstacles at their initial placement.
    for (const auto& e : scenario.entities) {
        if (e.is_agent()) {
            continue;
        }
        if (e.shape == ShapeKind::Square) {
            out << "  <rect x=\"" << fmt(sx(e.position.x - e.side / 2.0)) << "\" y=\""
                << fmt(sy(e.position.y + e.side / 2.0)) << "\" width=\""
                << fmt(e.side * scale) << "\" height=\"" << fmt(e.side * scale)
                << "\" fill=\"#bbb\" stroke=\"#555\"/>\n";
        } else {
            out << "  <circle cx=\"" << fmt(sx(e.position.x)) << "\" cy=\""
                << fmt(sy(e.position.y)) << "\" r=\"" << fmt(e.radius * scale)
                << "\" fill=\"#bbb\" stroke=\"#555\"/>\n";
        }
    }

    // Per-entity polylines in trajectory order.
    std::map<int, std::string> paths;
    for (const auto& rec : trajectory) {
        std::string& path = paths[rec.id];
        if (!path.empty()) {
            path += ' ';
        }
        path += fmt(sx(rec.position.x)) + ',' + fmt(sy(rec.position.y));
    }
    int index = 0;
    for (const auto& e : scenario.entities) {
        const auto it = paths.find(e.id);
        if (it == paths.end()) {
            ++index;
            continue;
        }
        const std::string color =
            e.is_agent() ? color_for(index, int(scenario.entities.size())) : "#555";
        const char* dash = e.is_agent() ? "" : " stroke-dasharray=\"4 3\"";
        out << "  <polyline points=\"" << it->second << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.2\"" << dash << "/>\n";
        ++index;
    }

    // Start dots and goal rings.
    index = 0;
    for (const auto& e : scenario.entities) {
        const std::string color = color_for(index, int(scenario.entities.size()));
        if (e.is_agent()) {
            out << "  <circle cx=\"" << fmt(sx(e.position.x)) << "\" cy=\""
                << fmt(sy(e.position.y)) << "\" r=\"" << fmt(e.radius * scale)
                << "\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
            out << "  <circle cx=\"" << fmt(sx(e.goal.x)) << "\" cy=\"" << fmt(sy(e.goal.y))
                << "\" r=\"" << fmt(e.radius * scale) << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"/>\n";
        }
        ++index;
    }

    out << "</svg>\n";
    return out.str();
}

void write_svg_file(const Scenario& scenario, std::span<const TrajectoryRecord> trajectory,
                    const std::filesystem::path& path, int width_px) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write SVG file: " + path.string());
    }
    out << render_svg(scenario, trajectory, width_px);
}

}  // namespace orcafl
