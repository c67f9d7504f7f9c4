#pragma once

#include <string>
#include <utility>

#include "cep/model.hpp"

namespace cep::testing {

std::string data_dir();

// The two-zone, two-scenario fixture under data/toy2.
std::pair<SystemInstance, ScenarioSet> load_toy2();

// One zone, `blocks` blocks of `hours` each, no units; one scenario with
// probability 1 and zero series.
std::pair<SystemInstance, ScenarioSet> empty_zone(int blocks, double hours);

ThermalUnit existing_unit(const std::string& name, const std::string& zone,
                          int blocks, double p_max, double mc,
                          double fom = 0.0, double retire_cap = 0.0);

ThermalUnit candidate_unit(const std::string& name, const std::string& zone,
                           double ic, double fom, double mc, double cap);

}  // namespace cep::testing
