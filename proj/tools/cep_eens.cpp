#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "cep/runner.hpp"

namespace {

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CEP_EENS_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string(env) == "off") {
      spdlog::set_level(level);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  cep::RunConfig config;
  std::string mode = "full";
  std::string eens_case = "explicit";
  double lambda0 = 0.0;

  CLI::App app{"Capacity expansion planning with EENS limits"};
  app.add_option("--instance", config.instance, "Instance JSON file")->required();
  app.add_option("--scenarios", config.scenarios, "Scenario manifest JSON file")->required();
  app.add_option("--mode", mode, "full | fixed-lambda | oracle | wait-and-see")
      ->capture_default_str();
  auto* l0 = app.add_option("--lambda0", lambda0,
                            "Starting price in every zone, EUR/MWh (default 50)");
  app.add_option("--fixed-lambda", config.fixed_lambda,
                 "Price for fixed-lambda and wait-and-see modes, EUR/MWh")
      ->capture_default_str();
  app.add_option("--gap-target", config.gap_target, "Relative gap to stop at")
      ->capture_default_str();
  app.add_option("--max-outer", config.max_outer_iters, "Outer iteration cap")
      ->capture_default_str();
  app.add_option("--max-inner", config.max_inner_iters, "Inner iteration cap")
      ->capture_default_str();
  app.add_option("--inner-tol", config.inner_tol,
                 "Relative change of the inner objective to stop at")
      ->capture_default_str();
  app.add_option("--workers", config.workers, "Scenario worker threads")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "Seed recorded in the summary")
      ->capture_default_str();
  app.add_option("--eens-case", eens_case, "explicit | zero | fraction")
      ->capture_default_str();
  app.add_option("--eens-fraction", config.eens_fraction,
                 "Fraction of the minimum annual demand for --eens-case fraction")
      ->capture_default_str();
  app.add_option("--out", config.output, "Output directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const auto parsed_mode = cep::parse_run_mode(mode);
  if (!parsed_mode) {
    std::cerr << "unknown --mode '" << mode << "'\n";
    return cep::kExitInput;
  }
  const auto parsed_case = cep::parse_eens_case(eens_case);
  if (!parsed_case) {
    std::cerr << "unknown --eens-case '" << eens_case << "'\n";
    return cep::kExitInput;
  }
  config.mode = *parsed_mode;
  config.eens_case = *parsed_case;
  if (l0->count() > 0) config.lambda0 = lambda0;
  return cep::execute(config, std::cerr);
}
