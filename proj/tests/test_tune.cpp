#include "doctest.h"
#include "orcafl/controllers.hpp"
#include "orcafl/fis_json.hpp"
#include "orcafl/tune.hpp"

#include <algorithm>

using namespace orcafl;

namespace {

Scenario tiny_pair() {
    Scenario s;
    s.name = "pair";
    s.bounds = {-50, -50, 50, 50};
    for (int i = 0; i < 2; ++i) {
        AgentState a;
        a.id = i;
        a.position = {i == 0 ? -10.0 : 10.0, 0.0};
        a.goal = -a.position;
        s.entities.push_back(a);
        s.scripts.emplace_back();
    }
    return s;
}

}  // namespace

TEST_CASE("tune_flc with zero episodes is the identity") {
    const auto flc1 = fis::build_flc1();
    const auto flc2 = fis::build_flc2();
    SimConfig sim_cfg;
    sim_cfg.mode = PlannerMode::OrcaFl;
    fql::FQLConfig cfg;
    cfg.episodes = 0;
    const auto result = tune_flc(tiny_pair(), TunedController::Flc1, flc1, flc2, sim_cfg, cfg);
    CHECK(result.tuned == flc1);
    CHECK(result.episode_returns.empty());
}

TEST_CASE("tune_flc on a short scenario stays in the output hull and reports returns") {
    const auto flc1 = fis::build_flc1();
    const auto flc2 = fis::build_flc2();
    SimConfig sim_cfg;
    sim_cfg.mode = PlannerMode::OrcaFl;
    sim_cfg.max_steps = 60;
    fql::FQLConfig cfg;
    cfg.episodes = 3;
    cfg.horizon = 60;
    cfg.gated_replay = false;
    cfg.seed = 5;

    for (auto which : {TunedController::Flc1, TunedController::Flc2}) {
        const auto result = tune_flc(tiny_pair(), which, flc1, flc2, sim_cfg, cfg);
        CHECK(result.episode_returns.size() == 3);
        const auto& base = which == TunedController::Flc1 ? flc1 : flc2;
        CHECK(result.tuned.rules().size() == base.rules().size());
        // Tuned output stays within the same support hull.
        const std::vector<double> probe{10.0, 5.0, 0.0};
        const double out = result.tuned.evaluate(probe);
        CHECK(out >= base.grid_lo());
        CHECK(out <= base.grid_hi());
        // Drop-in: serializes and reparses.
        const auto reparsed = fis::parse_fis(fis::serialize_fis(result.tuned));
        CHECK(reparsed == result.tuned);
    }
}

TEST_CASE("tuned FLC1 does not degrade the circle at high speed") {
    // Paired 10-seed comparison at vmax 30: the tuned controller's median
    // collision count must not exceed the untuned one.
    const auto flc1 = fis::build_flc1();
    const auto flc2 = fis::build_flc2();
    Scenario base = build_circle(16);
    apply_speed_limits(base, 30.0, 20.0);
    SimConfig sim_cfg;
    sim_cfg.mode = PlannerMode::OrcaFl;
    sim_cfg.max_steps = 600;
    fql::FQLConfig cfg;
    cfg.episodes = 8;
    cfg.horizon = 600;
    cfg.gated_replay = false;
    cfg.seed = 3;
    const auto tuned = tune_flc(base, TunedController::Flc1, flc1, flc2, sim_cfg, cfg);

    auto median10 = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return 0.5 * (v[4] + v[5]);
    };
    std::vector<double> untuned_collisions;
    std::vector<double> tuned_collisions;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Scenario s = build_circle(16);
        apply_speed_limits(s, 30.0, 20.0);
        jitter_starts(s, seed, 0.5);
        SimConfig rc = sim_cfg;
        rc.seed = seed;
        untuned_collisions.push_back(double(run(s, rc, &flc1, &flc2).metrics.num_collisions));
        tuned_collisions.push_back(
            double(run(s, rc, &tuned.tuned, &flc2).metrics.num_collisions));
    }
    CHECK(median10(tuned_collisions) <= median10(untuned_collisions));
}

TEST_CASE("tune_flc training is reproducible for a fixed seed") {
    const auto flc1 = fis::build_flc1();
    const auto flc2 = fis::build_flc2();
    SimConfig sim_cfg;
    sim_cfg.mode = PlannerMode::OrcaFl;
    sim_cfg.max_steps = 40;
    fql::FQLConfig cfg;
    cfg.episodes = 2;
    cfg.horizon = 40;
    cfg.gated_replay = false;
    cfg.seed = 11;
    const auto a = tune_flc(tiny_pair(), TunedController::Flc1, flc1, flc2, sim_cfg, cfg);
    const auto b = tune_flc(tiny_pair(), TunedController::Flc1, flc1, flc2, sim_cfg, cfg);
    CHECK(a.table.q == b.table.q);
    CHECK(a.episode_returns == b.episode_returns);
}
