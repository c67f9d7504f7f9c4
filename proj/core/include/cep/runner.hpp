#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cep/model.hpp"
#include "cep/outer_solver.hpp"

namespace cep {

enum class RunMode { kFull, kFixedLambda, kOracle, kWaitAndSee };
enum class EensCase { kExplicit, kZero, kFraction };

std::optional<RunMode> parse_run_mode(std::string_view text);
std::string_view to_string(RunMode mode);
std::optional<EensCase> parse_eens_case(std::string_view text);
std::string_view to_string(EensCase eens_case);

struct RunConfig {
  std::filesystem::path instance;
  std::filesystem::path scenarios;
  RunMode mode = RunMode::kFull;
  // Starting prices for full mode; empty uses 50 EUR/MWh.
  std::optional<double> lambda0;
  // Prices for fixed-lambda and wait-and-see modes.
  double fixed_lambda = 15000.0;
  double gap_target = 0.02;
  int max_outer_iters = 50;
  int max_inner_iters = 100;
  double inner_tol = 1e-3;
  int workers = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";
  EensCase eens_case = EensCase::kExplicit;
  double eens_fraction = 1e-4;

  // Throws std::invalid_argument naming the first bad field.
  void validate() const;
  OuterConfig outer_config() const;
};

struct RunInputs {
  SystemInstance instance;
  ScenarioSet scenarios;
};

// Sets every zone's EENS limit per the case: kept, zero, or fraction times
// the zone's minimum total demand over scenarios.
void apply_eens_case(SystemInstance& instance, const ScenarioSet& scenarios,
                     EensCase eens_case, double fraction);

// Reads and validates the inputs and materializes the EENS limits.
RunInputs ingest(const RunConfig& config);

// Exit codes of execute().
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitSolver = 4;

// Runs the configured mode and writes bounds_trace.csv, lambda_trace.csv,
// final_plan.json, recovery_log.jsonl and summary.json into config.output.
// Failures are reported as a JSON object on `err` and a nonzero exit code.
int execute(const RunConfig& config, std::ostream& err);
int execute(const RunConfig& config, const RunInputs& inputs,
            std::ostream& err);

}  // namespace cep
