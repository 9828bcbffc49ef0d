#include <benchmark/benchmark.h>

#include <random>

#include "orcafl/controllers.hpp"
#include "orcafl/orca.hpp"
#include "orcafl/scenario.hpp"
#include "orcafl/sim.hpp"

using namespace orcafl;

namespace {

std::vector<HalfPlane> random_planes(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-4.0, 4.0);
    std::vector<HalfPlane> planes;
    for (std::size_t i = 0; i < count; ++i) {
        Vec2 n = normalized({coord(rng), coord(rng)});
        if (norm(n) == 0.0) {
            n = {1, 0};
        }
        planes.push_back({{coord(rng), coord(rng)}, n});
    }
    return planes;
}

void BM_TrimfEval(benchmark::State& state) {
    const fis::TriangularMF mf{-33.0, 0.0, 33.0};
    double x = -50.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fis::trimf_eval(x, mf));
        x = x > 50.0 ? -50.0 : x + 0.1;
    }
}
BENCHMARK(BM_TrimfEval);

void BM_FisEvaluate(benchmark::State& state) {
    const auto flc1 = fis::build_flc1();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(0, 100), v(0, 200), a(-500, 500);
    for (auto _ : state) {
        const std::vector<double> in{d(rng), v(rng), a(rng)};
        benchmark::DoNotOptimize(flc1.evaluate(in));
    }
}
BENCHMARK(BM_FisEvaluate);

void BM_ComputeUN(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> coord(-12.0, 12.0);
    for (auto _ : state) {
        const Vec2 rel{10.0 + coord(rng) * 0.1, coord(rng)};
        benchmark::DoNotOptimize(compute_u_n({coord(rng), coord(rng)}, rel, 2.0, 2.0));
    }
}
BENCHMARK(BM_ComputeUN);

void BM_SolveVelocity(benchmark::State& state) {
    const auto planes = random_planes(std::size_t(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_velocity({3.0, 1.0}, planes, 10.0));
    }
}
BENCHMARK(BM_SolveVelocity)->Arg(2)->Arg(8)->Arg(26);

void BM_PlanStep(benchmark::State& state) {
    const bool fl = state.range(0) == 1;
    const auto flc1 = fis::build_flc1();
    const auto flc2 = fis::build_flc2();
    AgentState self;
    self.id = 0;
    self.position = {0, 0};
    self.velocity = {5, 0};
    self.goal = {50, 0};
    std::vector<AgentState> others;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-14.0, 14.0);
    for (int i = 1; i <= 10; ++i) {
        AgentState nb;
        nb.id = i;
        nb.position = {coord(rng), coord(rng)};
        if (norm(nb.position) < 3.0) {
            nb.position = normalized(nb.position) * 3.0;
        }
        nb.velocity = {coord(rng) * 0.3, coord(rng) * 0.3};
        nb.goal = -nb.position;
        others.push_back(nb);
    }
    std::vector<NeighborView> views;
    for (const auto& o : others) {
        views.push_back({&o, 5.0, 2.0});
    }
    PlannerConfig cfg;
    cfg.mode = fl ? PlannerMode::OrcaFl : PlannerMode::Orca;
    for (auto _ : state) {
        benchmark::DoNotOptimize(plan_step(self, views, cfg, &flc1, &flc2));
    }
}
BENCHMARK(BM_PlanStep)->Arg(0)->Arg(1);

void BM_SimStepCircle16(benchmark::State& state) {
    const bool fl = state.range(0) == 1;
    const auto flc1 = fis::build_flc1();
    const auto flc2 = fis::build_flc2();
    const Scenario scenario = build_circle(16);
    SimConfig cfg;
    cfg.mode = fl ? PlannerMode::OrcaFl : PlannerMode::Orca;
    World world = make_world(scenario);
    int steps = 0;
    for (auto _ : state) {
        step(world, cfg, &flc1, &flc2);
        if (++steps >= 60) {  // stay in the interacting phase
            state.PauseTiming();
            world = make_world(scenario);
            steps = 0;
            state.ResumeTiming();
        }
    }
}
BENCHMARK(BM_SimStepCircle16)->Arg(0)->Arg(1);

void BM_VoContains(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            vo_contains({coord(rng), coord(rng)}, {12.0, coord(rng) * 0.2}, 2.0, 2.0));
    }
}
BENCHMARK(BM_VoContains);

}  // namespace

BENCHMARK_MAIN();
