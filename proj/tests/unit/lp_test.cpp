#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cep/lp/lp_format.hpp"
#include "cep/lp/simplex.hpp"
#include "dense_simplex.hpp"
#include "random_lp.hpp"

namespace cep::lp {
namespace {

TEST(SimplexTest, SingleVariableLowerRow) {
  Problem p;
  const int x = p.add_variable("x", 0.0, 10.0, 1.0);
  p.add_constraint("lo", {{x, 1.0}}, Sense::kGreaterEqual, 3.0);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 3.0, 1e-12);
  EXPECT_NEAR(s.dual[0], 1.0, 1e-12);
}

TEST(SimplexTest, Unbounded) {
  Problem p;
  const int x = p.add_variable("x", 0.0, kInfinity, -1.0);
  p.add_constraint("lo", {{x, 1.0}}, Sense::kGreaterEqual, 0.0);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::kUnbounded);
  ASSERT_EQ(s.ray.size(), 1u);
  EXPECT_GT(s.ray[0], 0.0);
}

TEST(SimplexTest, UnboundedWithoutRows) {
  Problem p;
  p.add_variable("x", -kInfinity, 0.0, 1.0);
  EXPECT_EQ(solve(p).status, Status::kUnbounded);
}

TEST(SimplexTest, Infeasible) {
  Problem p;
  const int x = p.add_variable("x", 0.0, 1.0, 0.0);
  const int y = p.add_variable("y", 0.0, 1.0, 0.0);
  p.add_constraint("sum", {{x, 1.0}, {y, 1.0}}, Sense::kGreaterEqual, 3.0);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::kInfeasible);
  EXPECT_GT(farkas_margin(p, s.ray), 0.0);
}

TEST(SimplexTest, TransportationDuals) {
  // Two supplies, two demands; duals equal the marginal delivered cost.
  Problem p;
  const double cost[2][2] = {{4, 6}, {5, 3}};
  int x[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) x[i][j] = p.add_variable("", 0, kInfinity, cost[i][j]);
  }
  p.add_constraint("s0", {{x[0][0], 1}, {x[0][1], 1}}, Sense::kLessEqual, 30);
  p.add_constraint("s1", {{x[1][0], 1}, {x[1][1], 1}}, Sense::kLessEqual, 30);
  p.add_constraint("d0", {{x[0][0], 1}, {x[1][0], 1}}, Sense::kGreaterEqual, 20);
  p.add_constraint("d1", {{x[0][1], 1}, {x[1][1], 1}}, Sense::kGreaterEqual, 25);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 4 * 20 + 3 * 25, 1e-9);
  EXPECT_NEAR(s.dual[2], 4.0, 1e-9);
  EXPECT_NEAR(s.dual[3], 3.0, 1e-9);
  EXPECT_NEAR(dual_objective(p, s), s.objective, 1e-9);
}

TEST(SimplexTest, WarmStartReproducesOptimum) {
  Problem p;
  const int a = p.add_variable("a", 0, 5, -2);
  const int b = p.add_variable("b", 0, 5, -3);
  p.add_constraint("c", {{a, 1}, {b, 2}}, Sense::kLessEqual, 8);
  SimplexSolver solver;
  const Solution first = solver.solve(p);
  ASSERT_EQ(first.status, Status::kOptimal);
  p.set_rhs(0, 9);
  const Solution cold = solver.solve(p);
  const Solution warm = solver.solve(p, &first.basis);
  ASSERT_EQ(warm.status, Status::kOptimal);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-12);
  EXPECT_LE(warm.iterations, cold.iterations);
}

TEST(SimplexTest, RhsSensitivityMatchesDual) {
  Problem p;
  const int a = p.add_variable("a", 0, kInfinity, 2);
  const int b = p.add_variable("b", 0, kInfinity, 3);
  p.add_constraint("c1", {{a, 1}, {b, 1}}, Sense::kGreaterEqual, 4);
  p.add_constraint("c2", {{a, 1}, {b, 3}}, Sense::kGreaterEqual, 6);
  const Solution s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  const double eps = 1e-3;
  for (int i = 0; i < 2; ++i) {
    Problem q = p;
    q.set_rhs(i, p.constraint(i).rhs + eps);
    const Solution t = solve(q);
    EXPECT_NEAR((t.objective - s.objective) / eps, s.dual[i], 1e-6);
  }
}

TEST(SimplexTest, Deterministic) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  Problem p;
  for (int j = 0; j < 20; ++j) p.add_variable("", -1, 1, u(rng));
  for (int i = 0; i < 15; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < 20; ++j) terms.push_back({j, u(rng)});
    p.add_constraint("", terms, Sense::kLessEqual, std::abs(u(rng)));
  }
  const Solution a = solve(p);
  const Solution b = solve(p);
  ASSERT_EQ(a.status, Status::kOptimal);
  EXPECT_EQ(a.primal, b.primal);
  EXPECT_EQ(a.dual, b.dual);
}

TEST(SimplexTest, AgreesWithDenseOracleOnRandomProblems) {
  std::mt19937_64 rng(12345);
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Problem p = testing::random_problem(rng);
    const Solution s = solve(p);
    const testing::DenseResult d = testing::dense_simplex(p);
    SCOPED_TRACE(to_lp_format(p));
    switch (d.status) {
      case testing::DenseStatus::kOptimal:
        ++optimal;
        ASSERT_EQ(s.status, Status::kOptimal);
        EXPECT_NEAR(s.objective, d.objective, 1e-7 * (1 + std::abs(d.objective)));
        EXPECT_LE(p.max_violation(s.primal), 1e-7);
        EXPECT_LE(dual_infeasibility(p, s), 1e-7);
        EXPECT_NEAR(dual_objective(p, s), s.objective,
                    1e-7 * (1 + std::abs(s.objective)));
        break;
      case testing::DenseStatus::kInfeasible:
        ++infeasible;
        ASSERT_EQ(s.status, Status::kInfeasible);
        EXPECT_GT(farkas_margin(p, s.ray), 0.0);
        break;
      case testing::DenseStatus::kUnbounded:
        ++unbounded;
        ASSERT_EQ(s.status, Status::kUnbounded);
        break;
    }
  }
  EXPECT_GT(optimal, 30);
  EXPECT_GT(infeasible, 5);
  EXPECT_GT(unbounded, 5);
}

TEST(LpFormatTest, WritesSectionsAndBounds) {
  Problem p;
  const int x = p.add_variable("x", 0, 10, 1);
  const int y = p.add_variable("y", -kInfinity, kInfinity, 0);
  p.add_constraint("r", {{x, 1}, {y, -2}}, Sense::kGreaterEqual, 3);
  const std::string text = to_lp_format(p);
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("r: + 1 x - 2 y >= 3"), std::string::npos);
  EXPECT_NE(text.find("y free"), std::string::npos);
  EXPECT_NE(text.find("0 <= x <= 10"), std::string::npos);
}

}  // namespace
}  // namespace cep::lp
