#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cep/executor.hpp"
#include "cep/inner_solver.hpp"
#include "cep/oracle.hpp"
#include "fixtures.hpp"

namespace cep {
namespace {

using testing::candidate_unit;
using testing::existing_unit;

InnerConfig precise() {
  InnerConfig c;
  c.step_rule = StepRule::kCutModel;
  c.inner_tol = 0.0;
  c.gap_tol = 1e-10;
  c.max_inner_iters = 500;
  return c;
}

TEST(InnerSolverTest, PolyakArithmetic) {
  double alpha = -1;
  EXPECT_TRUE(polyak_step(110, 100, {2, 1}, alpha));
  EXPECT_DOUBLE_EQ(alpha, 2.0);
  EXPECT_FALSE(polyak_step(90, 100, {2, 1}, alpha));
  EXPECT_EQ(alpha, 0.0);
  EXPECT_FALSE(polyak_step(110, 100, {0, 0}, alpha));
  EXPECT_EQ(alpha, 0.0);
}

TEST(InnerSolverTest, ProjectionClamps) {
  auto [inst, sc] = testing::empty_zone(1, 1.0);
  inst.thermal.push_back(candidate_unit("c", "z", 1, 0, 1, 200));
  ExpansionPlan plan{{1.0 - 5.0}};
  project(plan, inst);
  EXPECT_EQ(plan.amount[0], 0.0);
  plan.amount[0] = 1.0 + 300.0;
  project(plan, inst);
  EXPECT_EQ(plan.amount[0], 200.0);
}

TEST(InnerSolverTest, FirstStageCoefficientSigns) {
  auto [inst, sc] = testing::load_toy2();
  const auto c = first_stage_coefficients(inst);
  for (std::size_t g = 0; g < inst.thermal.size(); ++g) {
    const auto& u = inst.thermal[g];
    EXPECT_EQ(c[g], u.is_candidate() ? u.investment_cost + u.fom : -u.fom);
  }
}

TEST(InnerSolverTest, InnerStepMatchesFormula) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(1);
  DualFunctionSolver solver(inst, sc, {}, ex);
  InnerState s;
  s.plan = ExpansionPlan::zero(inst);
  const DualPriceVector lambda{800, 800};
  s.target = solver.estimate_target(lambda);
  const InnerState next = solver.inner_step(s, lambda);
  double w = first_stage_cost(s.plan, inst);
  std::vector<double> q = first_stage_coefficients(inst);
  for (const Scenario& scen : sc) {
    const SubproblemResult r = evaluate(s.plan, scen, lambda, inst);
    w += scen.probability * r.value;
    for (std::size_t g = 0; g < q.size(); ++g) q[g] += scen.probability * r.mu[g];
  }
  EXPECT_NEAR(next.w, w, 1e-9 * std::abs(w));
  double n2 = 0;
  for (double v : q) n2 += v * v;
  EXPECT_NEAR(next.alpha, (w - s.target) / n2, 1e-9 * next.alpha);
  for (std::size_t g = 0; g < q.size(); ++g) {
    const double want = std::clamp(-next.alpha * q[g], 0.0, inst.thermal[g].cap_upper);
    EXPECT_NEAR(next.plan.amount[g], want, 1e-9);
  }
}

TEST(InnerSolverTest, TargetIsScenarioAverageOfWaitAndSee) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(2);
  const DualPriceVector lambda{50, 50};
  const double target = estimate_target(lambda, inst, sc, ex);
  double want = 0;
  for (const Scenario& s : sc) {
    const OracleSolution o = solve_relaxed_extended_form(inst, {[&] {
      Scenario one = s;
      one.probability = 1.0;
      return one;
    }()}, lambda);
    ASSERT_EQ(o.status, lp::Status::kOptimal);
    want += s.probability * o.cost;
  }
  EXPECT_NEAR(target, want, 1e-7 * std::abs(want));
}

TEST(InnerSolverTest, SingleScenarioReachesWaitAndSee) {
  auto [inst, sc] = testing::load_toy2();
  ScenarioSet one{sc[0]};
  one[0].probability = 1.0;
  Executor ex(1);
  const DualPriceVector lambda{500, 500};
  const double ws = estimate_target(lambda, inst, one, ex);
  InnerConfig cfg;
  cfg.max_inner_iters = 300;
  cfg.inner_tol = 1e-6;
  const DualFunctionResult r = solve_dual_function(lambda, inst, one, cfg, ex);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.w_best, ws, cfg.gap_tol * std::abs(ws) * 1.01);
  EXPECT_GE(r.w_best, ws - 1e-7 * std::abs(ws));
}

TEST(InnerSolverTest, MatchesRelaxedOracleAtHighPrice) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(1);
  const DualPriceVector lambda{15000, 15000};
  const OracleSolution o = solve_relaxed_extended_form(inst, sc, lambda);
  ASSERT_EQ(o.status, lp::Status::kOptimal);
  const DualFunctionResult r = solve_dual_function(lambda, inst, sc, {}, ex);
  EXPECT_LE(std::abs(r.w_best - o.cost), 0.005 * std::abs(o.cost));
  EXPECT_LE(r.w_lower, o.cost * (1 + 1e-7));
  EXPECT_TRUE(r.plan.within_bounds(inst));
}

TEST(InnerSolverTest, PreciseModeIsExact) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(1);
  for (double l : {0.0, 50.0, 900.0, 15000.0}) {
    const DualPriceVector lambda{l, l * 0.7};
    const OracleSolution o = solve_relaxed_extended_form(inst, sc, lambda);
    ASSERT_EQ(o.status, lp::Status::kOptimal);
    const DualFunctionResult r = solve_dual_function(lambda, inst, sc, precise(), ex);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.w_best, o.cost, 1e-7 * std::abs(o.cost)) << l;
    EXPECT_NEAR(r.value - r.lower_bound, 0.0, 1e-6 * std::abs(o.cost));
  }
}

TEST(InnerSolverTest, ZeroPriceBuildsNothing) {
  auto [inst, sc] = testing::empty_zone(4, 1.0);
  inst.thermal.push_back(candidate_unit("peaker", "z", 10, 5, 80, 100));
  sc[0].demand[0] = {20, 40, 60, 30};
  Executor ex(1);
  const DualFunctionResult r = solve_dual_function({0.0}, inst, sc, precise(), ex);
  EXPECT_NEAR(r.plan.amount[0], 0.0, 1e-9);
  EXPECT_NEAR(r.value, 0.0, 1e-9);
  EXPECT_NEAR(r.eens[0], 150.0, 1e-9);
}

TEST(InnerSolverTest, HighPriceShedsOnlyWhatBoundsForce) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(1);
  const DualPriceVector lambda{20000, 20000};
  const OracleSolution o = solve_relaxed_extended_form(inst, sc, lambda);
  const DualFunctionResult r = solve_dual_function(lambda, inst, sc, precise(), ex);
  for (int n = 0; n < inst.num_zones(); ++n) {
    EXPECT_NEAR(r.eens[n], o.eens[n], 1e-6 + 1e-6 * o.eens[n]);
  }
}

TEST(InnerSolverTest, WaitAndSeeBelowDualFunction) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(1);
  DualFunctionSolver solver(inst, sc, precise(), ex);
  for (double l : {0.0, 50.0, 3000.0}) {
    const DualPriceVector lambda{l, 2 * l};
    const double ws = solver.estimate_target(lambda);
    const DualFunctionResult r = solver.solve(lambda);
    EXPECT_LE(ws, r.w_best * (1 + 1e-9));
  }
}

TEST(InnerSolverTest, DualFunctionIsConcave) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(1);
  DualFunctionSolver solver(inst, sc, precise(), ex);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 4000);
  for (int k = 0; k < 4; ++k) {
    const DualPriceVector a{u(rng), u(rng)};
    const DualPriceVector b{u(rng), u(rng)};
    const DualPriceVector m{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
    const double ga = solver.solve(a).value;
    const double gb = solver.solve(b).value;
    const double gm = solver.solve(m).value;
    EXPECT_GE(gm, (ga + gb) / 2 - 1e-6 * std::abs(gm));
  }
}

TEST(InnerSolverTest, BestEnvelopeNonincreasing) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(1);
  const DualFunctionResult r = solve_dual_function({3000, 3000}, inst, sc, {}, ex);
  double best = INFINITY;
  for (const InnerTraceRow& row : r.trace) best = std::min(best, row.w);
  EXPECT_DOUBLE_EQ(best, r.w_best);
  double lower = -INFINITY;
  for (const InnerTraceRow& row : r.trace) {
    EXPECT_GE(row.lower, lower);
    lower = row.lower;
  }
}

TEST(InnerSolverTest, WorkerCountDoesNotChangeResult) {
  auto [inst, sc] = testing::load_toy2();
  Executor one(1), four(4);
  const DualFunctionResult a = solve_dual_function({700, 1200}, inst, sc, {}, one);
  const DualFunctionResult b = solve_dual_function({700, 1200}, inst, sc, {}, four);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.plan, b.plan);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(InnerSolverTest, RejectsNegativePrices) {
  auto [inst, sc] = testing::load_toy2();
  Executor ex(1);
  EXPECT_THROW(solve_dual_function({-1, 0}, inst, sc, {}, ex), std::invalid_argument);
}

}  // namespace
}  // namespace cep
