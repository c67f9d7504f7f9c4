#include "cep/outer_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace cep {

std::vector<double> rho(const Shedding& shedding, const ScenarioSet& scenarios,
                        const TimeGrid& grid,
                        const std::vector<double>& eens_limits) {
  std::vector<double> r = eens_by_zone(shedding, scenarios, grid);
  for (std::size_t n = 0; n < r.size(); ++n) r[n] -= eens_limits[n];
  return r;
}

std::optional<DualPriceVector> lambda_update(const DualPriceVector& lambda,
                                             const std::vector<double>& rho,
                                             double target, double value,
                                             double* alpha) {
  double norm2 = 0.0;
  for (double r : rho) norm2 += r * r;
  if (alpha) *alpha = 0.0;
  if (norm2 == 0.0) return std::nullopt;
  const double a = (target - value) / norm2;
  if (alpha) *alpha = a;
  DualPriceVector next(lambda.size());
  for (std::size_t n = 0; n < lambda.size(); ++n) {
    next[n] = std::max(0.0, lambda[n] + a * rho[n]);
  }
  return next;
}

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct ExPost {
  bool feasible = false;
  double cost = 0.0;
  CostBreakdown operating;
  std::vector<double> eens;
};

ExPost evaluate_plan(const ExpansionPlan& plan, const DualPriceVector& lambda,
                     const SystemInstance& instance,
                     const ScenarioSet& scenarios, const OuterConfig& config,
                     Executor& executor) {
  std::vector<SubproblemResult> results(scenarios.size());
  executor.parallel_for(static_cast<int>(scenarios.size()), [&](int w) {
    results[w] = evaluate(plan, scenarios[w], lambda, instance,
                          config.inner.model);
  });
  ExPost out;
  Shedding ls;
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    if (results[w].status != lp::Status::kOptimal) return out;
    const double p = scenarios[w].probability;
    out.operating.generation += p * results[w].costs.generation;
    out.operating.wheeling += p * results[w].costs.wheeling;
    out.operating.spillage += p * results[w].costs.spillage;
    ls.push_back(results[w].shedding);
  }
  out.eens = eens_by_zone(ls, scenarios, instance.time_grid);
  out.feasible = true;
  for (int n = 0; n < instance.num_zones(); ++n) {
    if (out.eens[n] > instance.zones[n].eens_limit + config.eens_tol) {
      out.feasible = false;
    }
  }
  out.cost = first_stage_cost(plan, instance) + out.operating.operating();
  return out;
}

}  // namespace

OuterResult run(const SystemInstance& instance, const ScenarioSet& scenarios,
                const OuterConfig& config, Executor& executor,
                const OuterObserver& observer) {
  const int zones = instance.num_zones();
  DualPriceVector lambda = config.lambda0;
  if (lambda.empty()) lambda.assign(zones, config.default_lambda0);
  if (static_cast<int>(lambda.size()) != zones) {
    throw std::invalid_argument("lambda0 has " + std::to_string(lambda.size()) +
                                " entries for " + std::to_string(zones) +
                                " zones");
  }
  const std::vector<double> limits = instance.eens_limits();
  DualFunctionSolver inner(instance, scenarios, config.inner, executor);
  RecoveryOptions recovery = config.recovery;
  recovery.model = config.inner.model;

  OuterResult out;
  out.best_upper = std::numeric_limits<double>::infinity();
  out.best_lower = -std::numeric_limits<double>::infinity();
  CostBreakdown best_operating;
  std::vector<double> best_eens;
  const int max_iters = config.fixed_lambda ? 1 : config.max_outer_iters;
  for (int k = 0; k < max_iters; ++k) {
    const DualFunctionResult g = inner.solve(lambda);
    const RecoveryResult rec =
        recover_all(g, instance, scenarios, recovery);
    if (!rec.feasible) throw RecoveryError(rec.diagnostic);
    const double upper = rec.upper_bound;
    if (upper < out.best_upper) {
      out.best_upper = upper;
      out.final_plan = rec.plan;
      best_operating = rec.operating;
      best_eens = rec.eens;
    }
    if (g.lower_bound > out.best_lower) {
      out.best_lower = g.lower_bound;
      out.lambda_final = lambda;
    }
    if (g.lower_bound > out.best_upper * (1 + config.sandwich_tol) +
                            config.sandwich_tol) {
      throw std::logic_error("lower bound " + std::to_string(g.lower_bound) +
                             " exceeds upper bound " +
                             std::to_string(out.best_upper) +
                             " at outer iteration " + std::to_string(k));
    }
    const std::vector<double> r = rho(g.shedding, scenarios, instance.time_grid, limits);
    out.gap = (out.best_upper - out.best_lower) /
              std::max(std::abs(out.best_upper), 1e-12);

    double alpha = 0.0;
    std::optional<DualPriceVector> next;
    const double r_norm = norm(r);
    bool done = out.gap <= config.gap_target || r_norm <= config.rho_tol ||
                k + 1 >= max_iters;
    if (!done) {
      const double value =
          g.value < out.best_upper ? g.value : g.lower_bound;
      next = lambda_update(lambda, r, out.best_upper, value, &alpha);
      if (!next) done = true;
    }

    out.trace.push_back({k, g.lower_bound, out.best_upper, out.gap, alpha,
                         r_norm, lambda});
    out.recovery_log.push_back(rec.zones);
    out.iterations = k + 1;
    spdlog::info("outer k={} g={:.10g} ub={:.10g} gap={:.4g} |rho|={:.4g} alpha={:.4g}",
                 k, g.lower_bound, out.best_upper, out.gap, r_norm, alpha);
    if (observer) {
      observer({k, lambda, r, &g, &rec, upper, out.best_upper, out.best_lower,
                out.gap, alpha});
    }
    if (done) {
      out.converged = out.gap <= config.gap_target || r_norm <= config.rho_tol;
      break;
    }
    lambda = std::move(*next);
  }

  out.first_stage = first_stage_cost(out.final_plan, instance);
  out.true_cost = out.best_upper;
  out.expected_operating = best_operating;
  out.eens = best_eens;
  // Ex-post: re-dispatch the final plan at lambda_final, raising the price of
  // zones that exceed their limit until every limit holds.
  DualPriceVector price = out.lambda_final;
  for (int step = 0; step <= config.expost_price_steps; ++step) {
    const ExPost ex = evaluate_plan(out.final_plan, price, instance, scenarios,
                                    config, executor);
    if (ex.feasible) {
      if (ex.cost < out.true_cost) {
        out.true_cost = ex.cost;
        out.expected_operating = ex.operating;
        out.eens = ex.eens;
      }
      break;
    }
    if (ex.eens.empty()) break;
    for (int n = 0; n < zones; ++n) {
      if (ex.eens[n] > limits[n] + config.eens_tol) {
        price[n] = std::max(price[n] * config.expost_price_growth, price[n] + 1.0);
      }
    }
  }
  out.true_gap = (out.true_cost - out.best_lower) /
                 std::max(std::abs(out.true_cost), 1e-12);
  return out;
}

}  // namespace cep
