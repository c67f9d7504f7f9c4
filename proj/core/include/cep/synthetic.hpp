#pragma once

#include <cstdint>
#include <utility>

#include "cep/model.hpp"

namespace cep {

struct SyntheticOptions {
  int zones = 2;
  int scenarios = 2;
  int blocks = 24;
  // EENS limit of each zone as a fraction of its minimum total demand.
  double eens_fraction = 0.005;
  bool batteries = true;
  bool hydro = true;
  // Peaker investment cost in the last zone is (1 + asymmetry) times the
  // first zone's, interpolated in between.
  double asymmetry = 0.0;
};

// Random instance with hourly blocks. Annual investment and FOM costs are
// scaled to the horizon, so first-stage and operating costs are comparable.
// Full build-out always covers peak demand.
std::pair<SystemInstance, ScenarioSet> generate_instance(
    std::uint64_t seed, const SyntheticOptions& options = {});

}  // namespace cep
