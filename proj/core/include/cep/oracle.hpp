#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cep/lp/simplex.hpp"
#include "cep/model.hpp"
#include "cep/subproblem.hpp"

namespace cep {

struct OracleOptions {
  // Refuse extended forms with more columns than this.
  std::size_t max_variables = 200000;
  ModelOptions model;
  lp::Tolerances tolerances;
};

struct OracleSolution {
  lp::Status status = lp::Status::kNumericFailure;
  // Optimal objective; for the relaxed form this is the CEP-EENS-R value,
  // i.e. without the constant -sum_n lambda_n EENS_n.
  double cost = 0.0;
  double first_stage = 0.0;
  ExpansionPlan plan;
  // Shadow prices of the EENS rows (>= 0); empty for the relaxed form.
  std::vector<double> lambda;
  std::vector<double> eens;
  Shedding shedding;
  std::vector<CostBreakdown> scenario_costs;
  // Set when the problem is infeasible: names the zone with the largest
  // certificate weight.
  std::string diagnostic;
};

// Thrown when the extended form exceeds OracleOptions::max_variables.
class OracleSizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

OracleSolution solve_extended_form(const SystemInstance& instance,
                                   const ScenarioSet& scenarios,
                                   const OracleOptions& options = {});

// CEP-EENS-R at fixed lambda: all scenarios and the first stage in one LP,
// shedding priced at lambda, no EENS rows.
OracleSolution solve_relaxed_extended_form(const SystemInstance& instance,
                                           const ScenarioSet& scenarios,
                                           const DualPriceVector& lambda,
                                           const OracleOptions& options = {});

}  // namespace cep
