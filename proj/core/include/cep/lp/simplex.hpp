#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cep/lp/problem.hpp"

namespace cep::lp {

enum class Status {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kNumericFailure,
  kIterationLimit,
};

std::string_view to_string(Status status);

struct Tolerances {
  // Absolute primal feasibility on bounds and row activity.
  double feasibility = 1e-7;
  // Reduced-cost tolerance, applied after the objective is scaled to unit
  // magnitude.
  double optimality = 1e-9;
  // Relative tolerance for |primal - dual| objective at optimality.
  double gap = 1e-7;
  // Smallest admissible pivot element.
  double pivot = 1e-9;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int stall_threshold = 50;
  // Eta updates kept before the basis is refactorized.
  int refactor_interval = 64;
  int max_refactor_retries = 3;
  // 0 selects 50 * (rows + columns) + 10000.
  std::int64_t max_iterations = 0;
};

// Position of each column with respect to the basis. Columns are the
// structural variables followed by one logical (slack) column per row, so a
// basis over an m-row, n-column problem has n + m entries, m of them kBasic.
enum class BasisStatus : std::uint8_t {
  kBasic,
  kAtLower,
  kAtUpper,
  kFreeZero,
};

struct Basis {
  std::vector<BasisStatus> status;
  bool empty() const { return status.empty(); }
};

struct Solution {
  Status status = Status::kNumericFailure;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> row_activity;
  // Derivative of the optimal objective with respect to each row's rhs.
  std::vector<double> dual;
  // c_j - a_j'dual; for a nonbasic variable this is the derivative of the
  // optimal objective with respect to the bound it sits at.
  std::vector<double> reduced_cost;
  Basis basis;
  // kInfeasible: row multipliers y with y'b strictly above the maximum of
  // y'(Ax + s) over the variable and slack boxes.
  // kUnbounded: a primal direction over the structural variables along which
  // the objective decreases without limit.
  std::vector<double> ray;
  std::int64_t iterations = 0;
};

// Bounded-variable primal revised simplex.
//
// Phase 1 minimizes the sum of bound infeasibilities of the basic variables
// (composite method), so any nonsingular starting basis is admissible; this is
// what makes warm starts from a previous solve's basis cheap. The basis is
// held as a sparse LU factorization plus a product-form eta file.
//
// Pricing is Dantzig's rule with ties broken by lowest column index; after
// `stall_threshold` consecutive degenerate pivots the solver switches to
// Bland's rule until the objective moves again. The pivot sequence is a pure
// function of the input, so identical problems give identical solutions.
//
// A solver instance holds mutable factorization state while solving and must
// not be shared between threads.
class SimplexSolver {
 public:
  explicit SimplexSolver(Tolerances tolerances = {});
  ~SimplexSolver();
  SimplexSolver(const SimplexSolver&) = delete;
  SimplexSolver& operator=(const SimplexSolver&) = delete;

  // `warm_start` is used when it has the right size and its basic columns
  // form a nonsingular matrix; otherwise the all-slack basis is used.
  Solution solve(const Problem& problem, const Basis* warm_start = nullptr);

  const Tolerances& tolerances() const { return tolerances_; }

 private:
  Tolerances tolerances_;
};

// Convenience wrapper around a temporary solver.
Solution solve(const Problem& problem, const Tolerances& tolerances = {});

// Objective of the bounded-variable LP dual implied by (dual, reduced_cost):
// b'y + sum_j (d_j^+ l_j - d_j^- u_j). Infinite bounds paired with a
// reduced cost of the wrong sign make this -inf.
double dual_objective(const Problem& problem, const Solution& solution,
                      double zero_tolerance = 1e-9);

// Largest violation of dual feasibility: reduced costs must be >= 0 where only
// the lower bound is finite, <= 0 where only the upper bound is finite, and 0
// for free variables. Same for the slack of each row.
double dual_infeasibility(const Problem& problem, const Solution& solution);

// Returns y'b - max_{box} y'(Ax + s) for y = ray / max|ray|; a positive value
// certifies infeasibility.
double farkas_margin(const Problem& problem, const std::vector<double>& ray);

}  // namespace cep::lp
