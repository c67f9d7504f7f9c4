#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cep/model.hpp"

namespace cep {

// Schema or syntax problem in an input file; the message starts with
// "<file>:<line>:" when a line is known.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance document (JSON). `source` only labels error messages. The
// time_grid member is optional; when absent the grid stays empty until a
// scenario manifest supplies it.
SystemInstance parse_instance_json(std::string_view text,
                                   const std::string& source = "<instance>");
std::string emit_instance_json(const SystemInstance& instance);

SystemInstance read_instance(const std::filesystem::path& path);
void write_instance(const std::filesystem::path& path,
                    const SystemInstance& instance);

// Reads a scenario manifest and the CSV series it names. The manifest's time
// grid is installed into `instance` when the instance has none, and must match
// it otherwise. Missing pv/wind/inflow entries default to zero; every
// (scenario, zone, t) demand entry is required.
ScenarioSet read_scenarios(const std::filesystem::path& manifest,
                           SystemInstance& instance);

// Writes manifest.json plus demand.csv, pv.csv, wind.csv and inflow.csv into
// `directory`.
void write_scenarios(const std::filesystem::path& directory,
                     const SystemInstance& instance,
                     const ScenarioSet& scenarios);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace cep
