#include "fixtures.hpp"

#include "cep/io.hpp"

namespace cep::testing {

std::string data_dir() { return CEP_TEST_DATA_DIR; }

std::pair<SystemInstance, ScenarioSet> load_toy2() {
  SystemInstance inst = read_instance(data_dir() + "/toy2/instance.json");
  ScenarioSet scenarios = read_scenarios(data_dir() + "/toy2/manifest.json", inst);
  return {std::move(inst), std::move(scenarios)};
}

std::pair<SystemInstance, ScenarioSet> empty_zone(int blocks, double hours) {
  SystemInstance inst;
  inst.time_grid = TimeGrid::uniform(blocks, hours);
  inst.zones.push_back({"z", 0.0});
  ScenarioSet scenarios{make_empty_scenario(inst, "s", 1.0)};
  return {std::move(inst), std::move(scenarios)};
}

ThermalUnit existing_unit(const std::string& name, const std::string& zone,
                          int blocks, double p_max, double mc, double fom,
                          double retire_cap) {
  ThermalUnit u;
  u.name = name;
  u.zone = zone;
  u.kind = UnitKind::kExisting;
  u.fom = fom;
  u.marginal_cost = mc;
  u.cap_upper = retire_cap;
  u.p_max.assign(blocks, p_max);
  u.p_min.assign(blocks, 0.0);
  return u;
}

ThermalUnit candidate_unit(const std::string& name, const std::string& zone,
                           double ic, double fom, double mc, double cap) {
  ThermalUnit u;
  u.name = name;
  u.zone = zone;
  u.kind = UnitKind::kCandidate;
  u.investment_cost = ic;
  u.fom = fom;
  u.marginal_cost = mc;
  u.cap_upper = cap;
  return u;
}

}  // namespace cep::testing
