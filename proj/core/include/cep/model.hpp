#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cep {

// Per-zone time series, indexed [zone][t].
using ZoneSeries = std::vector<std::vector<double>>;

struct TimeGrid {
  // Hours per block.
  std::vector<double> block_duration;

  int block_count() const { return static_cast<int>(block_duration.size()); }
  double total_hours() const;
  static TimeGrid uniform(int blocks, double hours);
};

struct Zone {
  std::string id;
  // MWh.
  double eens_limit = 0.0;
};

enum class UnitKind { kExisting, kCandidate };

struct ThermalUnit {
  std::string name;
  std::string zone;
  UnitKind kind = UnitKind::kExisting;
  double investment_cost = 0.0;  // EUR/MW-yr, candidates only
  double fom = 0.0;              // EUR/MW-yr
  double marginal_cost = 0.0;    // EUR/MWh
  // X^nu for candidates (investment limit), X for existing units (retirement
  // limit). MW.
  double cap_upper = 0.0;
  // Existing units only, one entry per block. MW.
  std::vector<double> p_max;
  std::vector<double> p_min;

  bool is_candidate() const { return kind == UnitKind::kCandidate; }
};

// f > 0 is a flow from `from_zone` into `to_zone`; l_min <= f <= l_max.
struct Line {
  std::string name;
  std::string from_zone;
  std::string to_zone;
  double l_max = 0.0;
  double l_min = 0.0;
  double wheeling_cost = 0.0;  // EUR/MWh
};

struct Battery {
  std::string zone;
  double energy_capacity = 0.0;     // BV, MWh
  double charge_capacity = 0.0;     // BC, MW
  double discharge_capacity = 0.0;  // BD, MW (an upper bound on discharge)
  double charge_efficiency = 1.0;   // BCE
  double discharge_efficiency = 1.0;  // BDE
};

enum class HydroTech { kRunOfRiver, kReservoir, kOpenLoop, kClosedLoop };

inline constexpr int kHydroTechCount = 4;

char hydro_tech_code(HydroTech tech);
std::optional<HydroTech> parse_hydro_tech(char code);

struct HydroUnit {
  std::string zone;
  HydroTech technology = HydroTech::kRunOfRiver;
  double volume = 0.0;            // V, MWh
  double turbine_capacity = 0.0;  // Q, MW
  double pump_capacity = 0.0;     // D, MW
  double pump_efficiency = 1.0;   // PE
  double spill_cost = 0.0;        // SC, EUR/MWh
};

struct SystemInstance {
  TimeGrid time_grid;
  std::vector<Zone> zones;
  std::vector<ThermalUnit> thermal;
  std::vector<Line> lines;
  std::vector<Battery> batteries;
  std::vector<HydroUnit> hydro;

  int num_zones() const { return static_cast<int>(zones.size()); }
  int num_blocks() const { return time_grid.block_count(); }
  // -1 when unknown.
  int zone_index(const std::string& id) const;
  std::vector<double> eens_limits() const;
};

struct Scenario {
  std::string id;
  double probability = 0.0;
  ZoneSeries demand;
  ZoneSeries pv;
  ZoneSeries wind;
  // [zone][technology][t], MW. Technologies without inflow stay zero.
  std::vector<std::vector<std::vector<double>>> inflow;

  double inflow_at(int zone, HydroTech tech, int t) const;
};

using ScenarioSet = std::vector<Scenario>;

// Scenario with every series zero-filled to the instance dimensions.
Scenario make_empty_scenario(const SystemInstance& instance, std::string id,
                             double probability);

// One entry per thermal unit: MW invested for a candidate (x^nu), MW retired
// for an existing unit (x).
struct ExpansionPlan {
  std::vector<double> amount;

  static ExpansionPlan zero(const SystemInstance& instance);
  bool within_bounds(const SystemInstance& instance, double tol = 0.0) const;
  friend bool operator==(const ExpansionPlan&, const ExpansionPlan&) = default;
};

// lambda_n per zone, EUR/MWh.
using DualPriceVector = std::vector<double>;

// Shedding per scenario, [scenario][zone][t], MW.
using Shedding = std::vector<ZoneSeries>;

struct BoundsRecord {
  int k = 0;
  double lower = 0.0;
  double best_upper = 0.0;
  double gap = 0.0;
  double alpha = 0.0;
  double rho_norm = 0.0;
  DualPriceVector lambda;
};

struct ValidationReport {
  std::vector<std::string> findings;
  bool ok() const { return findings.empty(); }
};

ValidationReport validate_instance(const SystemInstance& instance,
                                   const ScenarioSet& scenarios);

// Throws std::invalid_argument listing every finding when the report is not
// empty.
void require_valid(const SystemInstance& instance, const ScenarioSet& scenarios);

double first_stage_cost(const ExpansionPlan& plan,
                        const SystemInstance& instance);

// Expected unserved energy per zone, E_w[sum_t dT_t ls_{t,n,w}], MWh.
std::vector<double> eens_by_zone(const Shedding& ls,
                                 const ScenarioSet& scenarios,
                                 const TimeGrid& grid);

// Largest expected unserved energy a zone can have: E_w[sum_t dT_t D_{t,n,w}].
std::vector<double> max_eens_by_zone(const ScenarioSet& scenarios,
                                     const TimeGrid& grid);

// min over scenarios of the zone's total energy demand, MWh.
std::vector<double> min_annual_demand(const ScenarioSet& scenarios,
                                      const TimeGrid& grid);

}  // namespace cep
