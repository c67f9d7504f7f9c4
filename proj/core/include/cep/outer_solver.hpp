#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cep/executor.hpp"
#include "cep/inner_solver.hpp"
#include "cep/model.hpp"
#include "cep/recovery.hpp"

namespace cep {

struct OuterConfig {
  // Starting prices; empty means `default_lambda0` in every zone.
  DualPriceVector lambda0;
  double default_lambda0 = 50.0;
  double gap_target = 0.02;
  int max_outer_iters = 50;
  // Stop when |rho| falls to this, MWh.
  double rho_tol = 1e-9;
  // One iteration at lambda0 without price updates.
  bool fixed_lambda = false;
  // Allowed relative excess of the lower bound over the best upper bound.
  double sandwich_tol = 1e-6;
  // EENS slack accepted by the ex-post evaluation, MWh.
  double eens_tol = 1e-6;
  // Ex-post price search: at most this many re-dispatches of the final plan,
  // multiplying the price of zones above their limit by the growth factor.
  int expost_price_steps = 30;
  double expost_price_growth = 1.25;
  InnerConfig inner;
  RecoveryOptions recovery;
};

// Everything known about one outer iteration, passed to the observer.
struct OuterIteration {
  int k = 0;
  DualPriceVector lambda;
  std::vector<double> rho;
  const DualFunctionResult* dual = nullptr;
  const RecoveryResult* recovery = nullptr;
  // Upper bound contributed by this iteration.
  double upper = 0.0;
  double best_upper = 0.0;
  double best_lower = 0.0;
  double gap = 0.0;
  double alpha = 0.0;
};

using OuterObserver = std::function<void(const OuterIteration&)>;

struct OuterResult {
  ExpansionPlan final_plan;
  DualPriceVector lambda_final;
  std::vector<BoundsRecord> trace;
  std::vector<std::vector<ZoneRecovery>> recovery_log;  // per iteration
  double best_upper = 0.0;
  double best_lower = 0.0;
  double gap = 0.0;
  // Cost of the final plan after re-dispatching at lambda_final when that
  // meets every EENS limit, else the best upper bound.
  double true_cost = 0.0;
  double true_gap = 0.0;
  double first_stage = 0.0;
  CostBreakdown expected_operating;  // of the operating point behind true_cost
  std::vector<double> eens;          // same point, per zone
  int iterations = 0;
  bool converged = false;
};

// E_w[sum_t dT_t ls_{t,n,w}] - EENS_n per zone.
std::vector<double> rho(const Shedding& shedding, const ScenarioSet& scenarios,
                        const TimeGrid& grid,
                        const std::vector<double>& eens_limits);

// max(0, lambda + alpha rho) with alpha = (target - value) / |rho|^2.
// Returns nullopt when rho = 0. `alpha` receives the step.
std::optional<DualPriceVector> lambda_update(const DualPriceVector& lambda,
                                             const std::vector<double>& rho,
                                             double target, double value,
                                             double* alpha = nullptr);

OuterResult run(const SystemInstance& instance, const ScenarioSet& scenarios,
                const OuterConfig& config, Executor& executor,
                const OuterObserver& observer = {});

}  // namespace cep
