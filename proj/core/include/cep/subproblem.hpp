#pragma once

#include <span>
#include <string>
#include <vector>

#include "cep/lp/problem.hpp"
#include "cep/lp/simplex.hpp"
#include "cep/model.hpp"

namespace cep {

struct ModelOptions {
  // Open-loop pumped storage: the second balance tracks the tail reservoir
  // (true) or, read literally, the head reservoir a second time (false).
  bool open_loop_tail_reading = true;
  // Open-loop spillage bounded by the pump capacity.
  bool open_loop_spill_bound = true;
  // Initial storage level as a fraction of capacity; the last block must end
  // at or above it.
  double initial_storage_fraction = 0.5;
};

enum class CostClass : unsigned char {
  kNone,
  kGeneration,
  kWheeling,
  kSpillage,
};

struct CostBreakdown {
  double generation = 0.0;
  double wheeling = 0.0;
  double spillage = 0.0;
  // sum_n lambda_n sum_t dT_t ls_{t,n}.
  double shedding = 0.0;

  double operating() const { return generation + wheeling + spillage; }
  double total() const { return operating() + shedding; }
};

struct HydroColumns {
  std::vector<int> turbine;  // q
  std::vector<int> spill;    // s
  std::vector<int> pump;     // d
  std::vector<int> head;     // v (reservoir) or v^H
  std::vector<int> tail;     // v^T
  std::vector<int> balance_rows;
  std::vector<int> tail_rows;
};

struct BatteryColumns {
  std::vector<int> level;      // bv
  std::vector<int> charge;     // bc
  std::vector<int> discharge;  // bd
  std::vector<int> rows;
};

// Where one scenario's operational variables and rows live inside an LP.
struct BlockLayout {
  std::vector<std::vector<int>> generation;    // [unit][t]
  std::vector<std::vector<int>> capacity_row;  // [unit][t]
  std::vector<std::vector<int>> shed;          // [zone][t]
  std::vector<std::vector<int>> curtail;       // [zone][t]
  std::vector<std::vector<int>> flow_forward;  // [line][t], from -> to
  std::vector<std::vector<int>> flow_backward;  // [line][t], to -> from
  std::vector<BatteryColumns> batteries;
  std::vector<HydroColumns> hydro;
  std::vector<std::vector<int>> balance_row;  // [zone][t]

  // Unweighted cost of every block column (shedding excluded) and its class,
  // indexed by column - first_var.
  int first_var = 0;
  int end_var = 0;
  std::vector<double> unit_cost;
  std::vector<CostClass> cost_class;
};

struct BlockOptions {
  // Multiplies every cost of the block (scenario probability in the
  // extended form).
  double weight = 1.0;
  // When non-empty, one first-stage column per thermal unit; capacity rows
  // then reference it instead of taking the plan as a constant.
  std::vector<int> first_stage;
  std::string prefix;
};

// Appends one scenario's operational block. `plan` is ignored when
// options.first_stage is set.
BlockLayout append_scenario_block(lp::Problem& lp,
                                  const SystemInstance& instance,
                                  const Scenario& scenario,
                                  const ExpansionPlan& plan,
                                  const DualPriceVector& lambda,
                                  const BlockOptions& options,
                                  const ModelOptions& model = {});

lp::Problem build_second_stage(const ExpansionPlan& plan,
                               const Scenario& scenario,
                               const DualPriceVector& lambda,
                               const SystemInstance& instance,
                               const ModelOptions& model = {});

// Operating cost split of a block's primal point at prices lambda.
CostBreakdown block_costs(const BlockLayout& layout,
                          std::span<const double> primal,
                          const DualPriceVector& lambda,
                          const SystemInstance& instance);

ZoneSeries block_shedding(const BlockLayout& layout,
                          std::span<const double> primal);

struct SubproblemResult {
  lp::Status status = lp::Status::kNumericFailure;
  // V(x^nu, x, w).
  double value = 0.0;
  // Per thermal unit, sum_t of the capacity-row sensitivities: dV/dx^nu
  // (mu_new, <= 0) for candidates, dV/dx (mu_exist, >= 0) for existing units.
  std::vector<double> mu;
  ZoneSeries shedding;
  CostBreakdown costs;
  std::vector<double> primal;
  lp::Basis basis;
  std::int64_t iterations = 0;
};

// The second-stage LP of one scenario, kept assembled so that the plan and
// prices can be changed in place between solves.
class ScenarioModel {
 public:
  ScenarioModel(const SystemInstance& instance, const Scenario& scenario,
                const ModelOptions& model = {});

  void set_plan(const ExpansionPlan& plan);
  void set_prices(const DualPriceVector& lambda);

  SubproblemResult solve(lp::SimplexSolver& solver,
                         const lp::Basis* warm_start = nullptr) const;

  const lp::Problem& problem() const { return problem_; }
  const BlockLayout& layout() const { return layout_; }
  const DualPriceVector& prices() const { return lambda_; }

 private:
  const SystemInstance* instance_;
  lp::Problem problem_;
  BlockLayout layout_;
  ExpansionPlan plan_;
  DualPriceVector lambda_;
};

SubproblemResult evaluate(const ExpansionPlan& plan, const Scenario& scenario,
                          const DualPriceVector& lambda,
                          const SystemInstance& instance,
                          const ModelOptions& model = {});

// Extended form over a set of scenarios: first-stage columns, one block per
// scenario weighted by its probability, and optionally one EENS row per zone.
struct ExtendedForm {
  lp::Problem problem;
  std::vector<int> first_stage;  // per thermal unit
  std::vector<BlockLayout> blocks;
  std::vector<int> eens_rows;  // per zone, empty without EENS rows
};

ExtendedForm build_extended_form(const SystemInstance& instance,
                                 const ScenarioSet& scenarios,
                                 const DualPriceVector& lambda,
                                 bool with_eens_rows,
                                 const ModelOptions& model = {});

struct WaitAndSeeResult {
  lp::Status status = lp::Status::kNumericFailure;
  double value = 0.0;
  ExpansionPlan plan;
  lp::Basis basis;
};

// Single-scenario CEP-EENS-R optimum with the first stage free.
WaitAndSeeResult solve_wait_and_see(const Scenario& scenario,
                                    const DualPriceVector& lambda,
                                    const SystemInstance& instance,
                                    lp::SimplexSolver& solver,
                                    const lp::Basis* warm_start = nullptr,
                                    const ModelOptions& model = {});

double wait_and_see_value(const Scenario& scenario,
                          const DualPriceVector& lambda,
                          const SystemInstance& instance,
                          const ModelOptions& model = {});

}  // namespace cep
