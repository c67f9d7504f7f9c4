#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cep/inner_solver.hpp"
#include "cep/model.hpp"
#include "cep/subproblem.hpp"

namespace cep {

struct RecoveryOptions {
  // Recompute LOLE after every step; false keeps the first value.
  bool recompute_lole = true;
  // Blocks with less shedding than this count as shedding-free for LOLE.
  double eps_ls = 1e-6;
  // Stop once the remaining deficit is at most this, MWh.
  double eps_deficit = 1e-6;
  int max_steps = 100000;
  // Must match the options the repaired dispatch was built with.
  ModelOptions model;
};

// Shedding of one zone, [scenario][t].
using NodeSeries = std::vector<std::vector<double>>;

struct NodeRecovery {
  // Capacity added, MW.
  double added = 0.0;
  NodeSeries ls;
  // Deficit left when the capacity cap was reached, MWh.
  double deficit = 0.0;
  int steps = 0;
};

double expected_energy(const NodeSeries& ls, const ScenarioSet& scenarios,
                       const TimeGrid& grid);

// Expected hours with shedding above eps.
double expected_shedding_hours(const NodeSeries& ls,
                               const ScenarioSet& scenarios,
                               const TimeGrid& grid, double eps);

// Adds flat capacity to one zone until its expected shedding drops to
// `limit`: each step adds Deficit / LOLE and shaves that much off every block.
// At most `cap` MW is added.
NodeRecovery recover_node(const NodeSeries& ls_hat, double limit,
                          const ScenarioSet& scenarios, const TimeGrid& grid,
                          const RecoveryOptions& options = {},
                          double cap = std::numeric_limits<double>::infinity());

struct CapacityChange {
  int unit = 0;
  double amount = 0.0;  // MW
};

struct ZoneRecovery {
  int zone = 0;
  double violation = 0.0;  // MWh above the limit before recovery
  // Expected MWh of shedding covered by idle capacity already in the zone.
  double redispatched = 0.0;
  std::vector<CapacityChange> restored;  // retirements undone
  std::vector<CapacityChange> added;     // new candidate capacity
  double residual = 0.0;  // MWh still above the limit
};

struct RecoveryResult {
  bool feasible = true;
  ExpansionPlan plan;
  Shedding shedding;
  // Generation added on top of the dispatch being repaired, [scenario][unit][t].
  std::vector<std::vector<std::vector<double>>> extra;
  std::vector<ZoneRecovery> zones;
  std::vector<double> eens;
  double upper_bound = 0.0;
  // Expected operating cost of the repaired point, added generation included.
  CostBreakdown operating;
  std::string diagnostic;
};

// Thrown when a zone cannot be brought within its limit.
class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Repairs every zone whose EENS exceeds its limit: runs idle capacity of the
// zone's units where it sheds (cheapest marginal cost first), then restores
// retired capacity (cheapest FOM first), then builds candidates (highest
// marginal cost first).
// Never throws for exhausted bounds; check `feasible`.
RecoveryResult recover_all(const DualFunctionResult& solution,
                           const SystemInstance& instance,
                           const ScenarioSet& scenarios,
                           const RecoveryOptions& options = {});

// Cost of the repaired point: first stage of the recovered plan plus the
// expected generation, wheeling and spillage of the repaired dispatch and the
// marginal cost of the added generation. Shedding is not charged.
double upper_bound(const RecoveryResult& recovery,
                   const DualFunctionResult& solution,
                   const SystemInstance& instance,
                   const ScenarioSet& scenarios);

// Largest constraint violation of the repaired operating points, checked
// against freshly built second-stage LPs with the recovered plan fixed.
double verify_recovery(const RecoveryResult& recovery,
                       const DualFunctionResult& solution,
                       const SystemInstance& instance,
                       const ScenarioSet& scenarios,
                       const ModelOptions& model = {});

}  // namespace cep
