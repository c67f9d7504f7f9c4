#include "cep/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cep {

double TimeGrid::total_hours() const {
  return std::accumulate(block_duration.begin(), block_duration.end(), 0.0);
}

TimeGrid TimeGrid::uniform(int blocks, double hours) {
  return TimeGrid{std::vector<double>(static_cast<std::size_t>(blocks), hours)};
}

char hydro_tech_code(HydroTech tech) {
  switch (tech) {
    case HydroTech::kRunOfRiver:
      return 'R';
    case HydroTech::kReservoir:
      return 'S';
    case HydroTech::kOpenLoop:
      return 'O';
    case HydroTech::kClosedLoop:
      return 'C';
  }
  return '?';
}

std::optional<HydroTech> parse_hydro_tech(char code) {
  switch (code) {
    case 'R':
      return HydroTech::kRunOfRiver;
    case 'S':
      return HydroTech::kReservoir;
    case 'O':
      return HydroTech::kOpenLoop;
    case 'C':
      return HydroTech::kClosedLoop;
    default:
      return std::nullopt;
  }
}

int SystemInstance::zone_index(const std::string& id) const {
  for (std::size_t n = 0; n < zones.size(); ++n) {
    if (zones[n].id == id) return static_cast<int>(n);
  }
  return -1;
}

std::vector<double> SystemInstance::eens_limits() const {
  std::vector<double> limits;
  limits.reserve(zones.size());
  for (const Zone& z : zones) limits.push_back(z.eens_limit);
  return limits;
}

double Scenario::inflow_at(int zone, HydroTech tech, int t) const {
  return inflow[zone][static_cast<int>(tech)][t];
}

Scenario make_empty_scenario(const SystemInstance& instance, std::string id,
                             double probability) {
  const auto zones = static_cast<std::size_t>(instance.num_zones());
  const auto blocks = static_cast<std::size_t>(instance.num_blocks());
  Scenario s;
  s.id = std::move(id);
  s.probability = probability;
  s.demand.assign(zones, std::vector<double>(blocks, 0.0));
  s.pv = s.demand;
  s.wind = s.demand;
  s.inflow.assign(zones, std::vector<std::vector<double>>(
                             kHydroTechCount, std::vector<double>(blocks, 0.0)));
  return s;
}

ExpansionPlan ExpansionPlan::zero(const SystemInstance& instance) {
  return ExpansionPlan{std::vector<double>(instance.thermal.size(), 0.0)};
}

bool ExpansionPlan::within_bounds(const SystemInstance& instance,
                                  double tol) const {
  if (amount.size() != instance.thermal.size()) return false;
  for (std::size_t g = 0; g < amount.size(); ++g) {
    if (!(amount[g] >= -tol && amount[g] <= instance.thermal[g].cap_upper + tol)) {
      return false;
    }
  }
  return true;
}

namespace {

class Reporter {
 public:
  explicit Reporter(ValidationReport& report) : report_(report) {}

  template <typename... Args>
  void add(const Args&... args) {
    std::ostringstream out;
    (out << ... << args);
    report_.findings.push_back(out.str());
  }

  template <typename... Args>
  void check(bool ok, const Args&... args) {
    if (!ok) add(args...);
  }

 private:
  ValidationReport& report_;
};

bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool fraction(double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; }

void check_series(Reporter& r, const ZoneSeries& series, const char* kind,
                  const std::string& scenario, const SystemInstance& inst) {
  if (series.size() != inst.zones.size()) {
    r.add("scenario '", scenario, "': ", kind, " has ", series.size(),
          " zones, expected ", inst.zones.size());
    return;
  }
  for (std::size_t n = 0; n < series.size(); ++n) {
    if (series[n].size() != static_cast<std::size_t>(inst.num_blocks())) {
      r.add("scenario '", scenario, "': ", kind, " of zone '", inst.zones[n].id,
            "' has ", series[n].size(), " blocks, expected ",
            inst.num_blocks());
      continue;
    }
    for (std::size_t t = 0; t < series[n].size(); ++t) {
      if (!nonneg(series[n][t])) {
        r.add("scenario '", scenario, "': ", kind, " of zone '",
              inst.zones[n].id, "' block ", t, " must be finite and >= 0");
        break;
      }
    }
  }
}

}  // namespace

ValidationReport validate_instance(const SystemInstance& inst,
                                   const ScenarioSet& scenarios) {
  ValidationReport report;
  Reporter r(report);
  const int blocks = inst.num_blocks();

  r.check(blocks >= 1, "time grid: block_count must be >= 1");
  for (int t = 0; t < blocks; ++t) {
    const double dt = inst.time_grid.block_duration[t];
    r.check(std::isfinite(dt) && dt > 0, "time grid: block ", t,
            " duration must be > 0");
  }

  std::set<std::string> ids;
  for (const Zone& z : inst.zones) {
    r.check(!z.id.empty(), "zone: empty id");
    r.check(ids.insert(z.id).second, "zone '", z.id, "': duplicate id");
    r.check(nonneg(z.eens_limit), "zone '", z.id,
            "': eens_limit must be finite and >= 0");
  }
  r.check(!inst.zones.empty(), "instance has no zones");
  auto known = [&](const std::string& id) { return ids.count(id) > 0; };

  std::set<std::string> names;
  for (const ThermalUnit& u : inst.thermal) {
    const std::string& nm = u.name;
    r.check(!nm.empty() && names.insert(nm).second, "thermal unit '", nm,
            "': name must be unique and non-empty");
    r.check(known(u.zone), "thermal unit '", nm, "': unknown zone '", u.zone,
            "'");
    r.check(nonneg(u.investment_cost) && nonneg(u.fom) &&
                nonneg(u.marginal_cost),
            "thermal unit '", nm, "': IC, FOM and MC must be >= 0");
    r.check(nonneg(u.cap_upper), "thermal unit '", nm,
            "': cap_upper must be finite and >= 0");
    if (u.is_candidate()) continue;
    if (u.p_max.size() != static_cast<std::size_t>(blocks) ||
        u.p_min.size() != static_cast<std::size_t>(blocks)) {
      r.add("thermal unit '", nm, "': p_max/p_min need ", blocks, " blocks");
      continue;
    }
    double headroom = std::numeric_limits<double>::infinity();
    for (int t = 0; t < blocks; ++t) {
      if (!(nonneg(u.p_min[t]) && std::isfinite(u.p_max[t]) &&
            u.p_min[t] <= u.p_max[t])) {
        r.add("thermal unit '", nm, "' block ", t,
              ": violates 0 <= p_min <= p_max (p_min=", u.p_min[t],
              ", p_max=", u.p_max[t], ")");
      }
      headroom = std::min(headroom, u.p_max[t] - u.p_min[t]);
    }
    r.check(!(u.cap_upper > headroom), "thermal unit '", nm,
            "': retirement limit ", u.cap_upper,
            " exceeds min_t(p_max - p_min) = ", headroom);
  }

  for (const Line& l : inst.lines) {
    r.check(known(l.from_zone) && known(l.to_zone), "line '", l.name,
            "': unknown endpoint zone");
    r.check(l.from_zone != l.to_zone, "line '", l.name,
            "': endpoints must differ");
    r.check(std::isfinite(l.l_min) && std::isfinite(l.l_max) &&
                l.l_min <= 0.0 && l.l_max >= 0.0,
            "line '", l.name, "': requires l_min <= 0 <= l_max");
    r.check(nonneg(l.wheeling_cost), "line '", l.name,
            "': wheeling_cost must be >= 0");
  }

  std::set<std::string> battery_zones;
  for (const Battery& b : inst.batteries) {
    r.check(known(b.zone), "battery: unknown zone '", b.zone, "'");
    r.check(battery_zones.insert(b.zone).second, "zone '", b.zone,
            "': more than one battery");
    r.check(nonneg(b.energy_capacity) && nonneg(b.charge_capacity) &&
                nonneg(b.discharge_capacity),
            "battery in zone '", b.zone, "': BV, BC, BD must be >= 0");
    r.check(fraction(b.charge_efficiency) && fraction(b.discharge_efficiency),
            "battery in zone '", b.zone, "': efficiencies must be in (0, 1]");
  }

  std::set<std::pair<std::string, char>> hydro_keys;
  for (const HydroUnit& h : inst.hydro) {
    const char code = hydro_tech_code(h.technology);
    r.check(known(h.zone), "hydro unit ", code, ": unknown zone '", h.zone, "'");
    r.check(hydro_keys.insert({h.zone, code}).second, "zone '", h.zone,
            "': more than one hydro unit of technology ", code);
    r.check(nonneg(h.volume) && nonneg(h.turbine_capacity) &&
                nonneg(h.pump_capacity) && nonneg(h.spill_cost),
            "hydro unit ", code, " in zone '", h.zone,
            "': V, Q, D, SC must be >= 0");
    r.check(fraction(h.pump_efficiency), "hydro unit ", code, " in zone '",
            h.zone, "': pump efficiency must be in (0, 1]");
  }

  r.check(!scenarios.empty(), "scenario set is empty");
  double total_probability = 0.0;
  std::set<std::string> scenario_ids;
  for (const Scenario& s : scenarios) {
    r.check(scenario_ids.insert(s.id).second, "scenario '", s.id,
            "': duplicate id");
    r.check(std::isfinite(s.probability) && s.probability > 0.0 &&
                s.probability <= 1.0,
            "scenario '", s.id, "': probability must be in (0, 1]");
    total_probability += s.probability;
    check_series(r, s.demand, "demand", s.id, inst);
    check_series(r, s.pv, "pv", s.id, inst);
    check_series(r, s.wind, "wind", s.id, inst);
    if (s.inflow.size() != inst.zones.size()) {
      r.add("scenario '", s.id, "': inflow has ", s.inflow.size(),
            " zones, expected ", inst.zones.size());
      continue;
    }
    for (std::size_t n = 0; n < s.inflow.size(); ++n) {
      if (s.inflow[n].size() != static_cast<std::size_t>(kHydroTechCount)) {
        r.add("scenario '", s.id, "': inflow of zone '", inst.zones[n].id,
              "' must cover ", kHydroTechCount, " technologies");
        continue;
      }
      for (int h = 0; h < kHydroTechCount; ++h) {
        const auto& series = s.inflow[n][h];
        const char code = hydro_tech_code(static_cast<HydroTech>(h));
        if (series.size() != static_cast<std::size_t>(blocks)) {
          r.add("scenario '", s.id, "': inflow ", code, " of zone '",
                inst.zones[n].id, "' needs ", blocks, " blocks");
          continue;
        }
        const bool has_unit = hydro_keys.count({inst.zones[n].id, code}) > 0;
        for (int t = 0; t < blocks; ++t) {
          if (!nonneg(series[t])) {
            r.add("scenario '", s.id, "': inflow ", code, " of zone '",
                  inst.zones[n].id, "' block ", t, " must be >= 0");
            break;
          }
          if (series[t] > 0 &&
              (!has_unit || h == static_cast<int>(HydroTech::kClosedLoop))) {
            r.add("scenario '", s.id, "': inflow ", code, " of zone '",
                  inst.zones[n].id, "' has no receiving unit");
            break;
          }
        }
      }
    }
  }
  r.check(scenarios.empty() || std::abs(total_probability - 1.0) <= 1e-9,
          "scenario probabilities sum to ", total_probability, ", not 1");
  if (!report.ok()) return report;

  // Second-stage feasibility: an open-loop head reservoir with bounded spill
  // must be able to pass its inflow, and must-run output must be absorbable.
  for (const HydroUnit& h : inst.hydro) {
    if (h.technology != HydroTech::kOpenLoop) continue;
    const int n = inst.zone_index(h.zone);
    for (const Scenario& s : scenarios) {
      for (int t = 0; t < blocks; ++t) {
        const double a = s.inflow_at(n, HydroTech::kOpenLoop, t);
        if (a > h.turbine_capacity + h.pump_capacity) {
          r.add("scenario '", s.id, "': open-loop inflow in zone '", h.zone,
                "' block ", t, " exceeds turbine plus spill capacity");
          break;
        }
      }
    }
  }
  for (int n = 0; n < inst.num_zones(); ++n) {
    const std::string& id = inst.zones[n].id;
    double absorb = 0.0;
    for (const Line& l : inst.lines) {
      if (l.from_zone == id) absorb += l.l_max;
      if (l.to_zone == id) absorb += -l.l_min;
    }
    for (const Battery& b : inst.batteries) {
      if (b.zone == id) absorb += b.charge_capacity;
    }
    for (const HydroUnit& h : inst.hydro) {
      if (h.zone == id && (h.technology == HydroTech::kOpenLoop ||
                           h.technology == HydroTech::kClosedLoop)) {
        absorb += h.pump_capacity;
      }
    }
    for (int t = 0; t < blocks; ++t) {
      double must_run = 0.0;
      for (const ThermalUnit& u : inst.thermal) {
        if (!u.is_candidate() && u.zone == id) must_run += u.p_min[t];
      }
      if (must_run == 0.0) continue;
      for (const Scenario& s : scenarios) {
        if (must_run > s.demand[n][t] + absorb) {
          r.add("scenario '", s.id, "': must-run output in zone '", id,
                "' block ", t, " exceeds demand plus absorption capacity");
          break;
        }
      }
    }
  }
  return report;
}

void require_valid(const SystemInstance& instance,
                   const ScenarioSet& scenarios) {
  const ValidationReport report = validate_instance(instance, scenarios);
  if (report.ok()) return;
  std::string message = "invalid instance:";
  for (const std::string& f : report.findings) message += "\n  " + f;
  throw std::invalid_argument(message);
}

double first_stage_cost(const ExpansionPlan& plan,
                        const SystemInstance& instance) {
  double cost = 0.0;
  for (std::size_t g = 0; g < instance.thermal.size(); ++g) {
    const ThermalUnit& u = instance.thermal[g];
    if (u.is_candidate()) {
      cost += (u.investment_cost + u.fom) * plan.amount[g];
    } else {
      cost -= u.fom * plan.amount[g];
    }
  }
  return cost;
}

std::vector<double> eens_by_zone(const Shedding& ls,
                                 const ScenarioSet& scenarios,
                                 const TimeGrid& grid) {
  const std::size_t zones = ls.empty() ? 0 : ls.front().size();
  std::vector<double> eens(zones, 0.0);
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    for (std::size_t n = 0; n < zones; ++n) {
      double energy = 0.0;
      for (int t = 0; t < grid.block_count(); ++t) {
        energy += grid.block_duration[t] * ls[w][n][t];
      }
      eens[n] += scenarios[w].probability * energy;
    }
  }
  return eens;
}

std::vector<double> max_eens_by_zone(const ScenarioSet& scenarios,
                                     const TimeGrid& grid) {
  Shedding demand;
  demand.reserve(scenarios.size());
  for (const Scenario& s : scenarios) demand.push_back(s.demand);
  return eens_by_zone(demand, scenarios, grid);
}

std::vector<double> min_annual_demand(const ScenarioSet& scenarios,
                                      const TimeGrid& grid) {
  if (scenarios.empty()) return {};
  std::vector<double> result(scenarios.front().demand.size(),
                             std::numeric_limits<double>::infinity());
  for (const Scenario& s : scenarios) {
    for (std::size_t n = 0; n < result.size(); ++n) {
      double total = 0.0;
      for (int t = 0; t < grid.block_count(); ++t) {
        total += grid.block_duration[t] * s.demand[n][t];
      }
      result[n] = std::min(result[n], total);
    }
  }
  return result;
}

}  // namespace cep
