#include "cep/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace cep {

std::pair<SystemInstance, ScenarioSet> generate_instance(
    std::uint64_t seed, const SyntheticOptions& options) {
  if (options.zones < 1 || options.scenarios < 1 || options.blocks < 1) {
    throw std::invalid_argument("synthetic instance needs positive dimensions");
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const int Z = options.zones;
  const int T = options.blocks;
  const int S = options.scenarios;

  SystemInstance inst;
  inst.time_grid = TimeGrid::uniform(T, 1.0);
  const double scale = inst.time_grid.total_hours() / 8760.0;

  std::vector<double> base(Z), pv_cap(Z), wind_cap(Z);
  for (int n = 0; n < Z; ++n) {
    inst.zones.push_back({"z" + std::to_string(n), 0.0});
    base[n] = uniform(80, 150);
    pv_cap[n] = uniform(0, 30);
    wind_cap[n] = uniform(0, 30);
  }

  auto shape = [&](int t) {
    const double hour = t % 24;
    return 0.75 + 0.25 * std::sin(2 * std::numbers::pi * (hour - 6) / 24);
  };
  auto daylight = [&](int t) {
    const double hour = t % 24;
    return std::max(0.0, std::sin(std::numbers::pi * (hour - 6) / 12));
  };

  ScenarioSet scenarios;
  std::vector<double> peak(Z, 0.0);
  for (int s = 0; s < S; ++s) {
    Scenario sc = make_empty_scenario(inst, "s" + std::to_string(s), 1.0 / S);
    const double level = uniform(0.9, 1.1);
    for (int n = 0; n < Z; ++n) {
      const double sun = uniform(0.5, 1.0);
      for (int t = 0; t < T; ++t) {
        sc.demand[n][t] = base[n] * shape(t) * level * uniform(0.95, 1.05);
        sc.pv[n][t] = pv_cap[n] * daylight(t) * sun;
        sc.wind[n][t] = wind_cap[n] * uniform(0.0, 1.0);
        peak[n] = std::max(peak[n], sc.demand[n][t]);
      }
    }
    scenarios.push_back(std::move(sc));
  }

  for (int n = 0; n < Z; ++n) {
    const std::string& z = inst.zones[n].id;
    const double tilt = Z > 1 ? options.asymmetry * n / (Z - 1) : 0.0;

    ThermalUnit old;
    old.name = z + "_base";
    old.zone = z;
    old.kind = UnitKind::kExisting;
    old.fom = uniform(40000, 60000) * scale;
    old.marginal_cost = uniform(25, 45);
    const double pmax = 0.5 * peak[n];
    old.p_max.assign(T, pmax);
    old.p_min.assign(T, 0.1 * pmax);
    old.cap_upper = 0.4 * pmax;
    inst.thermal.push_back(old);

    ThermalUnit mid;
    mid.name = z + "_ccgt";
    mid.zone = z;
    mid.kind = UnitKind::kCandidate;
    mid.investment_cost = uniform(60000, 80000) * scale;
    mid.fom = uniform(15000, 25000) * scale;
    mid.marginal_cost = uniform(55, 70);
    mid.cap_upper = peak[n];
    inst.thermal.push_back(mid);

    ThermalUnit peaker;
    peaker.name = z + "_ocgt";
    peaker.zone = z;
    peaker.kind = UnitKind::kCandidate;
    peaker.investment_cost = uniform(30000, 45000) * (1 + tilt) * scale;
    peaker.fom = uniform(8000, 12000) * scale;
    peaker.marginal_cost = uniform(140, 220);
    peaker.cap_upper = 1.2 * peak[n];
    inst.thermal.push_back(peaker);

    if (options.batteries) {
      const double power = uniform(5, 15);
      inst.batteries.push_back({z, power * uniform(2, 4), power, power, 0.9, 0.9});
    }
  }

  for (int n = 0; n + 1 < Z; ++n) {
    inst.lines.push_back({inst.zones[n].id + "_" + inst.zones[n + 1].id,
                          inst.zones[n].id, inst.zones[n + 1].id,
                          uniform(20, 40), -uniform(20, 40), uniform(0.5, 2.0)});
  }
  if (Z >= 3) {
    inst.lines.push_back({inst.zones[Z - 1].id + "_" + inst.zones[0].id,
                          inst.zones[Z - 1].id, inst.zones[0].id,
                          uniform(10, 25), -uniform(10, 25), uniform(0.5, 2.0)});
  }

  if (options.hydro) {
    HydroUnit res;
    res.zone = inst.zones[0].id;
    res.technology = HydroTech::kReservoir;
    res.turbine_capacity = uniform(10, 20);
    res.volume = res.turbine_capacity * uniform(6, 12);
    res.spill_cost = uniform(1, 3);
    inst.hydro.push_back(res);
    const double mean_inflow = 0.4 * res.turbine_capacity;
    const int r = static_cast<int>(HydroTech::kReservoir);
    for (Scenario& sc : scenarios) {
      const double wet = uniform(0.6, 1.4);
      for (int t = 0; t < T; ++t) {
        sc.inflow[0][r][t] = mean_inflow * wet * uniform(0.8, 1.2);
      }
    }
  }

  const std::vector<double> min_demand =
      min_annual_demand(scenarios, inst.time_grid);
  for (int n = 0; n < Z; ++n) {
    inst.zones[n].eens_limit = options.eens_fraction * min_demand[n];
  }
  return {std::move(inst), std::move(scenarios)};
}

}  // namespace cep
