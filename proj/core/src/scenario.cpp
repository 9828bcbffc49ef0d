#include "orcafl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "orcafl/geometry.hpp"

namespace orcafl {

namespace {

using nlohmann::json;

constexpr double kArenaHalf = 50.0;     // 100 x 100 m arena
constexpr double kAgentRadius = 1.0;
constexpr double kDefaultVMax = 10.0;
constexpr double kDefaultAccMax = 20.0;
constexpr double kSquareObstacleSide = 8.0;
constexpr double kCircularObstacleRadius = 5.0;
constexpr double kMovingObstacleRadius = 6.0;

AgentState make_agent(int id, Vec2 start, Vec2 goal) {
    AgentState a;
    a.id = id;
    a.position = start;
    a.goal = goal;
    a.radius = kAgentRadius;
    a.v_max = kDefaultVMax;
    a.acc_max = kDefaultAccMax;
    return a;
}

AgentState make_obstacle(int id, Vec2 start, ShapeKind shape, double size) {
    AgentState o;
    o.id = id;
    o.position = start;
    o.goal = start;
    o.kind = EntityKind::ScriptedObstacle;
    o.shape = shape;
    if (shape == ShapeKind::Square) {
        o.side = size;
        o.radius = square_circumscribed_radius(size);
    } else {
        o.radius = size;
    }
    o.v_max = 0.0;
    o.acc_max = kDefaultAccMax;  // bounds how fast neighbors believe it can maneuver
    return o;
}

// Surface gap between two entities; squares use their exact extent.
double surface_gap(const AgentState& a, const AgentState& b) {
    if (a.shape == ShapeKind::Square && b.shape == ShapeKind::Disc) {
        return point_to_square_distance(b.position, a.position, a.side) - b.radius;
    }
    if (a.shape == ShapeKind::Disc && b.shape == ShapeKind::Square) {
        return point_to_square_distance(a.position, b.position, b.side) - a.radius;
    }
    // Disc-disc, and square-square via circumscribed discs (conservative;
    // obstacle pairs never move toward each other in the built scenarios).
    return distance(a.position, b.position) - a.radius - b.radius;
}

}  // namespace

Vec2 ObstacleScript::velocity_at(int step) const {
    for (const auto& seg : segments) {
        if (step < seg.until_step) {
            return {seg.vx, seg.vy};
        }
    }
    if (!segments.empty()) {
        return {segments.back().vx, segments.back().vy};
    }
    return {};
}

int Scenario::agent_count() const {
    return int(std::count_if(entities.begin(), entities.end(),
                             [](const AgentState& e) { return e.is_agent(); }));
}

int Scenario::obstacle_count() const {
    return int(entities.size()) - agent_count();
}

void validate(const Scenario& scenario) {
    if (scenario.scripts.size() != scenario.entities.size()) {
        throw ScenarioError("scenario '" + scenario.name + "': scripts not aligned to entities");
    }
    std::set<int> ids;
    for (const auto& e : scenario.entities) {
        if (!ids.insert(e.id).second) {
            throw ScenarioError("duplicate entity id " + std::to_string(e.id));
        }
        if (!(e.radius > 0.0)) {
            throw ScenarioError("entity " + std::to_string(e.id) + ": radius must be > 0");
        }
        if (!is_finite(e.position) || !is_finite(e.goal) || !std::isfinite(e.v_max) ||
            !std::isfinite(e.acc_max)) {
            throw ScenarioError("entity " + std::to_string(e.id) + ": non-finite value");
        }
        if (e.is_agent() && !(e.v_max > 0.0)) {
            throw ScenarioError("entity " + std::to_string(e.id) + ": vMax must be > 0");
        }
        if (e.is_agent() && !scenario.bounds.contains(e.goal)) {
            throw ScenarioError("entity " + std::to_string(e.id) + ": goal outside bounds");
        }
    }
    for (std::size_t i = 0; i < scenario.entities.size(); ++i) {
        for (std::size_t j = i + 1; j < scenario.entities.size(); ++j) {
            if (surface_gap(scenario.entities[i], scenario.entities[j]) < 0.0) {
                throw ScenarioError("entities " + std::to_string(scenario.entities[i].id) +
                                    " and " + std::to_string(scenario.entities[j].id) +
                                    " overlap at start");
            }
        }
    }
}

Scenario build_circle(int num_agents, double circle_radius) {
    if (num_agents < 2) {
        throw ScenarioError("build_circle: needs >= 2 agents");
    }
    Scenario s;
    s.name = "circle";
    s.bounds = {-kArenaHalf, -kArenaHalf, kArenaHalf, kArenaHalf};
    for (int i = 0; i < num_agents; ++i) {
        const double angle = 2.0 * std::numbers::pi * double(i) / double(num_agents);
        const Vec2 start{circle_radius * std::cos(angle), circle_radius * std::sin(angle)};
        s.entities.push_back(make_agent(i, start, -start));
        s.scripts.emplace_back();
    }
    validate(s);
    return s;
}

namespace {

Scenario build_four_groups(ShapeKind obstacle_shape) {
    Scenario s;
    s.name = obstacle_shape == ShapeKind::Square ? "four-groups-square" : "four-groups-circle";
    s.bounds = {-kArenaHalf, -kArenaHalf, kArenaHalf, kArenaHalf};
    // 5 m pitch leaves 3 m gaps between parked agents, enough for a
    // late arrival to thread through to an interior goal.
    const Vec2 group_centers[4] = {{0.0, 38.0}, {38.0, 0.0}, {0.0, -38.0}, {-38.0, 0.0}};
    int id = 0;
    for (const Vec2& center : group_centers) {
        for (int gx = -1; gx <= 1; ++gx) {
            for (int gy = -1; gy <= 1; ++gy) {
                const Vec2 start = center + Vec2{5.0 * gx, 5.0 * gy};
                s.entities.push_back(make_agent(id++, start, -start));
                s.scripts.emplace_back();
            }
        }
    }
    const double size = obstacle_shape == ShapeKind::Square ? kSquareObstacleSide
                                                            : kCircularObstacleRadius;
    for (const Vec2 c : {Vec2{12.0, 12.0}, Vec2{-12.0, 12.0}, Vec2{-12.0, -12.0},
                         Vec2{12.0, -12.0}}) {
        s.entities.push_back(make_obstacle(id++, c, obstacle_shape, size));
        s.scripts.emplace_back();  // static: zero-velocity script
    }
    validate(s);
    return s;
}

}  // namespace

Scenario build_four_groups_square_obstacles() { return build_four_groups(ShapeKind::Square); }

Scenario build_four_groups_circular_obstacles() { return build_four_groups(ShapeKind::Disc); }

Scenario build_row_vs_moving_obstacle(ShapeKind shape) {
    Scenario s;
    s.name = shape == ShapeKind::Square ? "row-moving-square" : "row-moving-circle";
    s.bounds = {-kArenaHalf, -kArenaHalf, kArenaHalf, kArenaHalf};
    int id = 0;
    for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 2; ++col) {
            const Vec2 start{col == 0 ? -3.0 : 3.0, -20.0 - 4.0 * row};
            // Translate the whole formation: everyone travels the same 50 m,
            // so the rows arrive together without threading parked agents.
            const Vec2 goal = start + Vec2{0.0, 50.0};
            s.entities.push_back(make_agent(id++, start, goal));
            s.scripts.emplace_back();
        }
    }
    const double size = shape == ShapeKind::Square
                            ? kMovingObstacleRadius * std::numbers::sqrt2
                            : kMovingObstacleRadius;
    s.entities.push_back(make_obstacle(id, Vec2{-25.0, 0.0}, shape, size));

    // Sweep between +/-35 at 5 m/s, reversing at the bounds; generated far
    // past any realistic max_steps.
    ObstacleScript script;
    const double speed = 5.0;
    const double dt = 0.1;
    double x = -25.0;
    double dir = 1.0;
    int step = 0;
    while (step < 20000) {
        const double target = dir > 0.0 ? 35.0 : -35.0;
        const int steps = std::max(1, int(std::lround(std::abs(target - x) / (speed * dt))));
        step += steps;
        script.segments.push_back({dir * speed, 0.0, step});
        x = target;
        dir = -dir;
    }
    s.scripts.push_back(std::move(script));
    validate(s);
    return s;
}

Scenario scenario_by_name(const std::string& name) {
    if (name == "circle") {
        return build_circle(16);
    }
    if (name == "four-groups-square") {
        return build_four_groups_square_obstacles();
    }
    if (name == "four-groups-circle") {
        return build_four_groups_circular_obstacles();
    }
    if (name == "row-moving-square") {
        return build_row_vs_moving_obstacle(ShapeKind::Square);
    }
    if (name == "row-moving-circle") {
        return build_row_vs_moving_obstacle(ShapeKind::Disc);
    }
    throw ScenarioError("unknown scenario '" + name + "'");
}

std::vector<std::string> scenario_names() {
    return {"circle", "four-groups-square", "four-groups-circle", "row-moving-square",
            "row-moving-circle"};
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario syntax error: ") + e.what());
    }
    try {
        Scenario s;
        s.name = doc.value("name", "custom");
        const auto& b = doc.at("bounds");
        s.bounds = {b.at("xmin").get<double>(), b.at("ymin").get<double>(),
                    b.at("xmax").get<double>(), b.at("ymax").get<double>()};
        for (const auto& ja : doc.value("agents", json::array())) {
            AgentState a = make_agent(ja.at("id").get<int>(),
                                      {ja.at("start")[0].get<double>(),
                                       ja.at("start")[1].get<double>()},
                                      {ja.at("goal")[0].get<double>(),
                                       ja.at("goal")[1].get<double>()});
            a.radius = ja.value("radius", kAgentRadius);
            a.v_max = ja.value("vMax", kDefaultVMax);
            a.acc_max = ja.value("accMax", kDefaultAccMax);
            s.entities.push_back(a);
            s.scripts.emplace_back();
        }
        for (const auto& jo : doc.value("obstacles", json::array())) {
            const auto shape_name = jo.value("shape", std::string("disc"));
            if (shape_name != "disc" && shape_name != "square") {
                throw ScenarioError("obstacle " + std::to_string(jo.at("id").get<int>()) +
                                    ": unknown shape '" + shape_name + "'");
            }
            const ShapeKind shape =
                shape_name == "square" ? ShapeKind::Square : ShapeKind::Disc;
            s.entities.push_back(make_obstacle(jo.at("id").get<int>(),
                                               {jo.at("start")[0].get<double>(),
                                                jo.at("start")[1].get<double>()},
                                               shape, jo.at("size").get<double>()));
            ObstacleScript script;
            for (const auto& seg : jo.value("script", json::array())) {
                script.segments.push_back({seg.at("vx").get<double>(),
                                           seg.at("vy").get<double>(),
                                           seg.at("untilStep").get<int>()});
            }
            s.scripts.push_back(std::move(script));
        }
        validate(s);
        return s;
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open scenario file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& scenario) {
    json doc;
    doc["name"] = scenario.name;
    doc["bounds"] = {{"xmin", scenario.bounds.xmin},
                     {"ymin", scenario.bounds.ymin},
                     {"xmax", scenario.bounds.xmax},
                     {"ymax", scenario.bounds.ymax}};
    json agents = json::array();
    json obstacles = json::array();
    for (std::size_t i = 0; i < scenario.entities.size(); ++i) {
        const AgentState& e = scenario.entities[i];
        if (e.is_agent()) {
            agents.push_back({{"id", e.id},
                              {"start", {e.position.x, e.position.y}},
                              {"goal", {e.goal.x, e.goal.y}},
                              {"radius", e.radius},
                              {"vMax", e.v_max},
                              {"accMax", e.acc_max}});
        } else {
            json script = json::array();
            for (const auto& seg : scenario.scripts[i].segments) {
                script.push_back(
                    {{"vx", seg.vx}, {"vy", seg.vy}, {"untilStep", seg.until_step}});
            }
            obstacles.push_back(
                {{"id", e.id},
                 {"shape", e.shape == ShapeKind::Square ? "square" : "disc"},
                 {"size", e.shape == ShapeKind::Square ? e.side : e.radius},
                 {"start", {e.position.x, e.position.y}},
                 {"script", std::move(script)}});
        }
    }
    doc["agents"] = std::move(agents);
    doc["obstacles"] = std::move(obstacles);
    return doc.dump(2) + "\n";
}

void write_scenario_file(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ScenarioError("cannot write scenario file: " + path.string());
    }
    out << serialize_scenario(scenario);
}

void apply_speed_limits(Scenario& scenario, double v_max, double acc_max) {
    for (auto& e : scenario.entities) {
        if (e.is_agent()) {
            e.v_max = v_max;
            e.acc_max = acc_max;
        }
    }
}

void jitter_starts(Scenario& scenario, std::uint64_t seed, double magnitude) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-magnitude, magnitude);
    for (auto& e : scenario.entities) {
        if (e.is_agent()) {
            e.position.x += offset(rng);
            e.position.y += offset(rng);
        }
    }
    validate(scenario);
}

}  // namespace orcafl
