#include "cep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cep {
namespace {

std::size_t count_columns(const SystemInstance& inst, const ScenarioSet& sc) {
  // Rough upper estimate, good enough for the size guard.
  std::size_t per_block = inst.thermal.size() + 2 * inst.lines.size() +
                          3 * inst.batteries.size() + 5 * inst.hydro.size() +
                          2 * inst.zones.size();
  return inst.thermal.size() +
         sc.size() * static_cast<std::size_t>(inst.num_blocks()) * per_block;
}

OracleSolution solve(const SystemInstance& instance,
                     const ScenarioSet& scenarios,
                     const DualPriceVector& lambda, bool with_eens,
                     const OracleOptions& options) {
  const std::size_t estimate = count_columns(instance, scenarios);
  if (estimate > options.max_variables) {
    throw OracleSizeError("extended form needs about " +
                          std::to_string(estimate) + " columns, cap is " +
                          std::to_string(options.max_variables));
  }
  const ExtendedForm ef =
      build_extended_form(instance, scenarios, lambda, with_eens, options.model);
  lp::SimplexSolver solver(options.tolerances);
  const lp::Solution sol = solver.solve(ef.problem);

  OracleSolution out;
  out.status = sol.status;
  if (sol.status == lp::Status::kInfeasible) {
    int worst = -1;
    double weight = 0.0;
    for (std::size_t n = 0; n < ef.eens_rows.size(); ++n) {
      const double y = std::abs(sol.ray[ef.eens_rows[n]]);
      if (y > weight) {
        weight = y;
        worst = static_cast<int>(n);
      }
    }
    out.diagnostic =
        worst >= 0 ? "EENS limit of zone '" + instance.zones[worst].id +
                         "' is unattainable"
                   : "extended form is infeasible";
    return out;
  }
  if (sol.status != lp::Status::kOptimal) {
    out.diagnostic = "extended form ended with status " +
                     std::string(lp::to_string(sol.status));
    return out;
  }
  out.cost = sol.objective;
  out.plan = ExpansionPlan::zero(instance);
  for (std::size_t g = 0; g < ef.first_stage.size(); ++g) {
    out.plan.amount[g] = sol.primal[ef.first_stage[g]];
  }
  out.first_stage = first_stage_cost(out.plan, instance);
  for (const BlockLayout& block : ef.blocks) {
    out.shedding.push_back(block_shedding(block, sol.primal));
    out.scenario_costs.push_back(
        block_costs(block, sol.primal, lambda, instance));
  }
  out.eens = eens_by_zone(out.shedding, scenarios, instance.time_grid);
  for (int row : ef.eens_rows) {
    out.lambda.push_back(std::max(0.0, -sol.dual[row]));
  }
  return out;
}

}  // namespace

OracleSolution solve_extended_form(const SystemInstance& instance,
                                   const ScenarioSet& scenarios,
                                   const OracleOptions& options) {
  return solve(instance, scenarios,
               DualPriceVector(instance.zones.size(), 0.0), true, options);
}

OracleSolution solve_relaxed_extended_form(const SystemInstance& instance,
                                           const ScenarioSet& scenarios,
                                           const DualPriceVector& lambda,
                                           const OracleOptions& options) {
  return solve(instance, scenarios, lambda, false, options);
}

}  // namespace cep
