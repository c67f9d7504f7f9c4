#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "cep/executor.hpp"
#include "cep/lp/simplex.hpp"
#include "cep/model.hpp"
#include "cep/subproblem.hpp"

namespace cep {

enum class StepRule {
  // Projected subgradient with the Polyak step toward the target.
  kPolyak,
  // Next plan = minimizer of the cut model (used for high-accuracy
  // evaluations of the dual function).
  kCutModel,
};

struct InnerConfig {
  // Stop when |W^i - W^{i-1}| / max(1, |W^{i-1}|) < inner_tol.
  double inner_tol = 1e-3;
  int max_inner_iters = 100;
  // Stop when (W_best - certified lower bound) / max(1, |W_best|) <= gap_tol.
  double gap_tol = 1e-4;
  StepRule step_rule = StepRule::kPolyak;
  // Raise the wait-and-see target to the cut-model lower bound when higher.
  bool cut_target = true;
  // Keep cuts across lambda changes (shifted so they stay valid).
  bool keep_cuts = true;
  std::size_t max_cuts = 4000;
  // Reuse the wait-and-see target while every lambda_n stays within this
  // relative distance of the lambda it was computed at; negative disables.
  double target_reuse_threshold = 0.05;
  ModelOptions model;
  lp::Tolerances lp_tolerances;
};

struct InnerState {
  int i = 0;
  ExpansionPlan plan;
  double w = 0.0;          // W^i at `plan`
  double target = 0.0;     // W^*
  std::vector<double> q;   // per thermal unit: q^nu or q
  double q_norm = 0.0;
  double alpha = 0.0;
  bool converged = false;
  std::vector<double> history;
};

struct InnerTraceRow {
  int i = 0;
  double w = 0.0;
  double q_norm = 0.0;
  double alpha = 0.0;
  double target = 0.0;
  double lower = 0.0;
};

struct DualFunctionResult {
  // g(lambda) as computed: W_best - sum_n lambda_n EENS_n.
  double value = 0.0;
  // Certified lower bound on g(lambda).
  double lower_bound = 0.0;
  double w_best = 0.0;
  double w_lower = 0.0;
  double target = 0.0;
  ExpansionPlan plan;
  // Second-stage solutions at `plan`, one per scenario.
  std::vector<SubproblemResult> scenarios;
  Shedding shedding;
  std::vector<double> eens;
  int iterations = 0;
  bool converged = false;
  std::vector<InnerTraceRow> trace;
};

// Polyak step (w - target) / |q|^2. Returns false (and alpha = 0) when the
// step is undefined or would be negative, which the caller treats as
// convergence.
bool polyak_step(double w, double target, const std::vector<double>& q,
                 double& alpha);

// Clamps every entry to [0, cap_upper].
void project(ExpansionPlan& plan, const SystemInstance& instance);

// Per-unit first-stage cost coefficients: IC + FOM for candidates, -FOM for
// existing units.
std::vector<double> first_stage_coefficients(const SystemInstance& instance);

// Evaluates the dual function repeatedly for a sequence of lambdas, keeping
// scenario LPs, simplex bases, cuts and the previous plan between calls.
class DualFunctionSolver {
 public:
  DualFunctionSolver(const SystemInstance& instance,
                     const ScenarioSet& scenarios, InnerConfig config,
                     Executor& executor);
  ~DualFunctionSolver();

  // E_w[f^WS_w] at lambda, computed fresh.
  double estimate_target(const DualPriceVector& lambda);

  // One iteration of the inner algorithm at lambda: evaluates every scenario
  // at state.plan, sets W^i and the subgradient, and moves the plan.
  InnerState inner_step(const InnerState& state, const DualPriceVector& lambda);

  DualFunctionResult solve(const DualPriceVector& lambda);

  // Starting plan for the next solve().
  void set_start_plan(const ExpansionPlan& plan);
  const InnerConfig& config() const { return config_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  InnerConfig config_;
};

// One-shot evaluation from the zero plan.
DualFunctionResult solve_dual_function(const DualPriceVector& lambda,
                                       const SystemInstance& instance,
                                       const ScenarioSet& scenarios,
                                       const InnerConfig& config,
                                       Executor& executor);

double estimate_target(const DualPriceVector& lambda,
                       const SystemInstance& instance,
                       const ScenarioSet& scenarios, Executor& executor,
                       const ModelOptions& model = {});

}  // namespace cep
