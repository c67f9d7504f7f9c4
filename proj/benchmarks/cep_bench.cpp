#include <benchmark/benchmark.h>

#include "cep/executor.hpp"
#include "cep/inner_solver.hpp"
#include "cep/lp/simplex.hpp"
#include "cep/oracle.hpp"
#include "cep/recovery.hpp"
#include "cep/subproblem.hpp"
#include "cep/synthetic.hpp"

namespace {

cep::SyntheticOptions sized(int zones, int blocks) {
  cep::SyntheticOptions o;
  o.zones = zones;
  o.scenarios = 3;
  o.blocks = blocks;
  return o;
}

void BM_SecondStageCold(benchmark::State& state) {
  const auto [inst, sc] = cep::generate_instance(7, sized(state.range(0), state.range(1)));
  const cep::lp::Problem lp = cep::build_second_stage(
      cep::ExpansionPlan::zero(inst), sc[0],
      cep::DualPriceVector(inst.num_zones(), 500.0), inst);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cep::lp::solve(lp).objective);
  }
  state.counters["columns"] = lp.num_variables();
}
BENCHMARK(BM_SecondStageCold)->Args({2, 24})->Args({4, 48})->Args({4, 168})
    ->Unit(benchmark::kMillisecond);

void BM_SecondStageWarm(benchmark::State& state) {
  const auto [inst, sc] = cep::generate_instance(7, sized(state.range(0), state.range(1)));
  cep::ScenarioModel model(inst, sc[0]);
  model.set_prices(cep::DualPriceVector(inst.num_zones(), 500.0));
  cep::ExpansionPlan plan = cep::ExpansionPlan::zero(inst);
  model.set_plan(plan);
  cep::lp::SimplexSolver solver;
  const cep::lp::Basis basis = model.solve(solver).basis;
  plan.amount[2] = 0.5 * inst.thermal[2].cap_upper;
  model.set_plan(plan);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.solve(solver, &basis).value);
  }
}
BENCHMARK(BM_SecondStageWarm)->Args({2, 24})->Args({4, 48})->Args({4, 168})
    ->Unit(benchmark::kMillisecond);

void BM_DualFunction(benchmark::State& state) {
  const auto [inst, sc] = cep::generate_instance(7, sized(state.range(0), state.range(1)));
  cep::Executor ex(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cep::solve_dual_function(cep::DualPriceVector(inst.num_zones(), 120.0),
                                 inst, sc, {}, ex)
            .value);
  }
}
BENCHMARK(BM_DualFunction)->Args({2, 24})->Args({4, 48})->Unit(benchmark::kMillisecond);

void BM_ExtendedForm(benchmark::State& state) {
  const auto [inst, sc] = cep::generate_instance(7, sized(state.range(0), state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cep::solve_extended_form(inst, sc).cost);
  }
}
BENCHMARK(BM_ExtendedForm)->Args({2, 24})->Args({4, 48})->Unit(benchmark::kMillisecond);

void BM_RecoverNode(benchmark::State& state) {
  const int blocks = static_cast<int>(state.range(0));
  cep::ScenarioSet sc(4);
  cep::NodeSeries ls(4, std::vector<double>(blocks));
  for (int w = 0; w < 4; ++w) {
    sc[w].probability = 0.25;
    for (int t = 0; t < blocks; ++t) ls[w][t] = (t * 37 + w * 11) % 23;
  }
  const cep::TimeGrid grid = cep::TimeGrid::uniform(blocks, 1.0);
  const double limit = 0.05 * cep::expected_energy(ls, sc, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cep::recover_node(ls, limit, sc, grid).added);
  }
}
BENCHMARK(BM_RecoverNode)->Arg(24)->Arg(8760);

}  // namespace
BENCHMARK_MAIN();
