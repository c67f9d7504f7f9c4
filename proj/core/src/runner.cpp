#include "cep/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cep/executor.hpp"
#include "cep/io.hpp"
#include "cep/oracle.hpp"
#include "cep/subproblem.hpp"

namespace cep {

using nlohmann::json;
namespace fs = std::filesystem;

std::optional<RunMode> parse_run_mode(std::string_view text) {
  if (text == "full") return RunMode::kFull;
  if (text == "fixed-lambda") return RunMode::kFixedLambda;
  if (text == "oracle") return RunMode::kOracle;
  if (text == "wait-and-see") return RunMode::kWaitAndSee;
  return std::nullopt;
}

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kFull: return "full";
    case RunMode::kFixedLambda: return "fixed-lambda";
    case RunMode::kOracle: return "oracle";
    case RunMode::kWaitAndSee: return "wait-and-see";
  }
  return "?";
}

std::optional<EensCase> parse_eens_case(std::string_view text) {
  if (text == "explicit") return EensCase::kExplicit;
  if (text == "zero") return EensCase::kZero;
  if (text == "fraction") return EensCase::kFraction;
  return std::nullopt;
}

std::string_view to_string(EensCase eens_case) {
  switch (eens_case) {
    case EensCase::kExplicit: return "explicit";
    case EensCase::kZero: return "zero";
    case EensCase::kFraction: return "fraction";
  }
  return "?";
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (instance.empty()) fail("instance path is required");
  if (scenarios.empty()) fail("scenario manifest path is required");
  if (lambda0 && !(*lambda0 >= 0.0 && std::isfinite(*lambda0))) {
    fail("lambda0 must be finite and >= 0");
  }
  if (!(fixed_lambda >= 0.0 && std::isfinite(fixed_lambda))) {
    fail("fixed lambda must be finite and >= 0");
  }
  if (!(gap_target > 0.0)) fail("gap target must be > 0");
  if (max_outer_iters < 1) fail("max outer iterations must be >= 1");
  if (max_inner_iters < 1) fail("max inner iterations must be >= 1");
  if (!(inner_tol >= 0.0)) fail("inner tolerance must be >= 0");
  if (workers < 1) fail("worker count must be >= 1");
  if (eens_case == EensCase::kFraction && !(eens_fraction >= 0.0)) {
    fail("EENS fraction must be >= 0");
  }
}

OuterConfig RunConfig::outer_config() const {
  OuterConfig c;
  if (mode == RunMode::kFixedLambda) {
    c.fixed_lambda = true;
    c.default_lambda0 = fixed_lambda;
  } else if (lambda0) {
    c.default_lambda0 = *lambda0;
  }
  c.gap_target = gap_target;
  c.max_outer_iters = max_outer_iters;
  c.inner.max_inner_iters = max_inner_iters;
  c.inner.inner_tol = inner_tol;
  return c;
}

void apply_eens_case(SystemInstance& instance, const ScenarioSet& scenarios,
                     EensCase eens_case, double fraction) {
  if (eens_case == EensCase::kExplicit) return;
  const std::vector<double> demand =
      min_annual_demand(scenarios, instance.time_grid);
  for (int n = 0; n < instance.num_zones(); ++n) {
    instance.zones[n].eens_limit =
        eens_case == EensCase::kZero ? 0.0 : fraction * demand[n];
  }
}

RunInputs ingest(const RunConfig& config) {
  RunInputs in;
  in.instance = read_instance(config.instance);
  in.scenarios = read_scenarios(config.scenarios, in.instance);
  apply_eens_case(in.instance, in.scenarios, config.eens_case,
                  config.eens_fraction);
  require_valid(in.instance, in.scenarios);
  return in;
}

namespace {

// Costs are reported rounded to 6 decimals.
double money(double v) { return std::round(v * 1e6) / 1e6; }

json zone_values(const SystemInstance& inst, const std::vector<double>& v,
                 bool round = false) {
  json out = json::object();
  for (int n = 0; n < inst.num_zones() && n < static_cast<int>(v.size()); ++n) {
    out[inst.zones[n].id] = round ? money(v[n]) : v[n];
  }
  return out;
}

json plan_json(const SystemInstance& inst, const ExpansionPlan& plan) {
  json units = json::array();
  json invest = json::object(), retire = json::object();
  for (const Zone& z : inst.zones) {
    invest[z.id] = 0.0;
    retire[z.id] = 0.0;
  }
  for (std::size_t g = 0; g < inst.thermal.size(); ++g) {
    const ThermalUnit& u = inst.thermal[g];
    const double x = plan.amount[g];
    units.push_back({{"name", u.name},
                     {"zone", u.zone},
                     {"kind", u.is_candidate() ? "candidate" : "existing"},
                     {u.is_candidate() ? "invested_mw" : "retired_mw", x}});
    json& bucket = u.is_candidate() ? invest : retire;
    bucket[u.zone] = bucket[u.zone].get<double>() + x;
  }
  return {{"units", units},
          {"investment_mw_by_zone", invest},
          {"retirement_mw_by_zone", retire}};
}

json first_stage_split(const SystemInstance& inst, const ExpansionPlan& plan) {
  double investment = 0.0, retirement = 0.0;
  for (std::size_t g = 0; g < inst.thermal.size(); ++g) {
    const ThermalUnit& u = inst.thermal[g];
    if (u.is_candidate()) {
      investment += (u.investment_cost + u.fom) * plan.amount[g];
    } else {
      retirement += u.fom * plan.amount[g];
    }
  }
  return {{"investment", money(investment)},
          {"retirement_savings", money(retirement)}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string bounds_csv(const std::vector<BoundsRecord>& trace) {
  std::string s = "k,lower,upper,gap,alpha,rho_norm\n";
  for (const BoundsRecord& r : trace) {
    s += std::to_string(r.k) + ',' + format_double(r.lower) + ',' +
         format_double(r.best_upper) + ',' + format_double(r.gap) + ',' +
         format_double(r.alpha) + ',' + format_double(r.rho_norm) + '\n';
  }
  return s;
}

std::string lambda_csv(const SystemInstance& inst,
                       const std::vector<BoundsRecord>& trace) {
  std::string s = "k,zone,lambda\n";
  for (const BoundsRecord& r : trace) {
    for (int n = 0; n < inst.num_zones(); ++n) {
      s += std::to_string(r.k) + ',' + inst.zones[n].id + ',' +
           format_double(r.lambda[n]) + '\n';
    }
  }
  return s;
}

std::string recovery_jsonl(const SystemInstance& inst,
                           const std::vector<std::vector<ZoneRecovery>>& log) {
  std::string s;
  for (std::size_t k = 0; k < log.size(); ++k) {
    for (const ZoneRecovery& z : log[k]) {
      json restored = json::array(), added = json::array();
      for (const CapacityChange& c : z.restored) {
        restored.push_back({{"unit", inst.thermal[c.unit].name}, {"mw", c.amount}});
      }
      for (const CapacityChange& c : z.added) {
        added.push_back({{"unit", inst.thermal[c.unit].name}, {"mw", c.amount}});
      }
      json line = {{"k", k},
                   {"zone", inst.zones[z.zone].id},
                   {"violation_mwh", z.violation},
                   {"redispatched_mwh", z.redispatched},
                   {"restored", restored},
                   {"added", added},
                   {"residual_mwh", z.residual}};
      s += line.dump() + '\n';
    }
  }
  return s;
}

json base_summary(const RunConfig& config, const SystemInstance& inst,
                  const ScenarioSet& scenarios) {
  return {{"mode", to_string(config.mode)},
          {"eens_case", to_string(config.eens_case)},
          {"zones", inst.num_zones()},
          {"scenarios", scenarios.size()},
          {"blocks", inst.num_blocks()},
          {"seed", config.seed},
          {"eens_limit", zone_values(inst, inst.eens_limits())}};
}

void run_decomposition(const RunConfig& config, const RunInputs& in,
                       Executor& executor) {
  const OuterResult r =
      run(in.instance, in.scenarios, config.outer_config(), executor);
  const fs::path& out = config.output;
  write_text(out / "bounds_trace.csv", bounds_csv(r.trace));
  write_text(out / "lambda_trace.csv", lambda_csv(in.instance, r.trace));
  write_text(out / "recovery_log.jsonl", recovery_jsonl(in.instance, r.recovery_log));
  write_text(out / "final_plan.json", plan_json(in.instance, r.final_plan).dump(2) + '\n');

  json s = base_summary(config, in.instance, in.scenarios);
  s["iterations"] = r.iterations;
  s["converged"] = r.converged;
  s["lower_bound"] = money(r.best_lower);
  s["upper_bound"] = money(r.best_upper);
  s["gap"] = r.gap;
  s["true_cost"] = money(r.true_cost);
  s["true_gap"] = r.true_gap;
  s["lambda_final"] = zone_values(in.instance, r.lambda_final);
  s["eens"] = zone_values(in.instance, r.eens);
  json costs = first_stage_split(in.instance, r.final_plan);
  costs["first_stage"] = money(r.first_stage);
  costs["generation"] = money(r.expected_operating.generation);
  costs["wheeling"] = money(r.expected_operating.wheeling);
  costs["spillage"] = money(r.expected_operating.spillage);
  s["costs"] = costs;
  write_text(out / "summary.json", s.dump(2) + '\n');
}

void write_empty_traces(const fs::path& out) {
  write_text(out / "bounds_trace.csv", "k,lower,upper,gap,alpha,rho_norm\n");
  write_text(out / "lambda_trace.csv", "k,zone,lambda\n");
  write_text(out / "recovery_log.jsonl", "");
}

void run_oracle(const RunConfig& config, const RunInputs& in) {
  const OracleSolution o = solve_extended_form(in.instance, in.scenarios);
  if (o.status == lp::Status::kInfeasible) throw RecoveryError(o.diagnostic);
  if (o.status != lp::Status::kOptimal) throw std::runtime_error(o.diagnostic);
  write_empty_traces(config.output);
  write_text(config.output / "final_plan.json",
             plan_json(in.instance, o.plan).dump(2) + '\n');
  json s = base_summary(config, in.instance, in.scenarios);
  s["optimal_cost"] = money(o.cost);
  s["lambda_oracle"] = zone_values(in.instance, o.lambda);
  s["eens"] = zone_values(in.instance, o.eens);
  json costs = first_stage_split(in.instance, o.plan);
  costs["first_stage"] = money(o.first_stage);
  CostBreakdown op;
  for (std::size_t w = 0; w < in.scenarios.size(); ++w) {
    const double p = in.scenarios[w].probability;
    op.generation += p * o.scenario_costs[w].generation;
    op.wheeling += p * o.scenario_costs[w].wheeling;
    op.spillage += p * o.scenario_costs[w].spillage;
  }
  costs["generation"] = money(op.generation);
  costs["wheeling"] = money(op.wheeling);
  costs["spillage"] = money(op.spillage);
  s["costs"] = costs;
  write_text(config.output / "summary.json", s.dump(2) + '\n');
}

void run_wait_and_see(const RunConfig& config, const RunInputs& in,
                      Executor& executor) {
  const DualPriceVector lambda(in.instance.num_zones(), config.fixed_lambda);
  std::vector<WaitAndSeeResult> results(in.scenarios.size());
  executor.parallel_for(static_cast<int>(in.scenarios.size()), [&](int w) {
    lp::SimplexSolver solver;
    results[w] = solve_wait_and_see(in.scenarios[w], lambda, in.instance, solver);
    if (results[w].status != lp::Status::kOptimal) {
      throw std::runtime_error("wait-and-see LP of scenario '" +
                               in.scenarios[w].id + "' ended with status " +
                               std::string(lp::to_string(results[w].status)));
    }
  });
  write_empty_traces(config.output);
  json plans = json::object();
  json values = json::object();
  double expected = 0.0;
  for (std::size_t w = 0; w < in.scenarios.size(); ++w) {
    plans[in.scenarios[w].id] = plan_json(in.instance, results[w].plan);
    values[in.scenarios[w].id] = money(results[w].value);
    expected += in.scenarios[w].probability * results[w].value;
  }
  write_text(config.output / "final_plan.json", json{{"scenarios", plans}}.dump(2) + '\n');
  json s = base_summary(config, in.instance, in.scenarios);
  s["lambda"] = zone_values(in.instance, lambda);
  s["scenario_values"] = values;
  s["expected_value"] = money(expected);
  write_text(config.output / "summary.json", s.dump(2) + '\n');
}

void report(std::ostream& err, const char* kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int execute(const RunConfig& config, const RunInputs& inputs,
            std::ostream& err) {
  try {
    config.validate();
    fs::create_directories(config.output);
    Executor executor(config.workers);
    switch (config.mode) {
      case RunMode::kFull:
      case RunMode::kFixedLambda:
        run_decomposition(config, inputs, executor);
        break;
      case RunMode::kOracle:
        run_oracle(config, inputs);
        break;
      case RunMode::kWaitAndSee:
        run_wait_and_see(config, inputs, executor);
        break;
    }
  } catch (const std::invalid_argument& e) {
    report(err, "config", e.what());
    return kExitInput;
  } catch (const RecoveryError& e) {
    report(err, "infeasible", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    report(err, "solver", e.what());
    return kExitSolver;
  }
  return kExitOk;
}

int execute(const RunConfig& config, std::ostream& err) {
  RunInputs inputs;
  try {
    config.validate();
    inputs = ingest(config);
  } catch (const std::exception& e) {
    report(err, "input", e.what());
    return kExitInput;
  }
  spdlog::info("loaded {} zones, {} scenarios, {} blocks",
               inputs.instance.num_zones(), inputs.scenarios.size(),
               inputs.instance.num_blocks());
  return execute(config, inputs, err);
}

}  // namespace cep
