#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cep/io.hpp"
#include "cep/oracle.hpp"
#include "cep/runner.hpp"
#include "fixtures.hpp"

namespace cep {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cep_runner_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig toy2_config(const std::string& name) {
  RunConfig c;
  c.instance = testing::data_dir() + "/toy2/instance.json";
  c.scenarios = testing::data_dir() + "/toy2/manifest.json";
  c.output = scratch(name);
  return c;
}

TEST(RunnerTest, ParsesModesAndCases) {
  EXPECT_EQ(parse_run_mode("full"), RunMode::kFull);
  EXPECT_EQ(parse_run_mode("fixed-lambda"), RunMode::kFixedLambda);
  EXPECT_EQ(parse_run_mode("oracle"), RunMode::kOracle);
  EXPECT_EQ(parse_run_mode("wait-and-see"), RunMode::kWaitAndSee);
  EXPECT_FALSE(parse_run_mode("fast"));
  EXPECT_EQ(parse_eens_case("fraction"), EensCase::kFraction);
  EXPECT_FALSE(parse_eens_case("high"));
  for (RunMode m : {RunMode::kFull, RunMode::kFixedLambda, RunMode::kOracle,
                    RunMode::kWaitAndSee}) {
    EXPECT_EQ(parse_run_mode(to_string(m)), m);
  }
}

TEST(RunnerTest, FractionOfMinimumDemand) {
  auto [inst, sc] = testing::empty_zone(1, 1000.0);
  sc[0].demand[0] = {100.0};
  apply_eens_case(inst, sc, EensCase::kFraction, 0.0001);
  EXPECT_NEAR(inst.zones[0].eens_limit, 10.0, 1e-12);
  apply_eens_case(inst, sc, EensCase::kZero, 0.0001);
  EXPECT_EQ(inst.zones[0].eens_limit, 0.0);
  inst.zones[0].eens_limit = 7.0;
  apply_eens_case(inst, sc, EensCase::kExplicit, 0.5);
  EXPECT_EQ(inst.zones[0].eens_limit, 7.0);
}

TEST(RunnerTest, MalformedCsvNamesTheRow) {
  const fs::path dir = scratch("bad_csv");
  for (const auto& e : fs::directory_iterator(testing::data_dir() + "/toy2")) {
    fs::copy_file(e.path(), dir / e.path().filename());
  }
  std::string demand = slurp(dir / "demand.csv");
  const auto third = demand.find("dry,north,2,120");
  ASSERT_NE(third, std::string::npos);
  demand.replace(third, 15, "dry,north,2,abc");
  std::ofstream(dir / "demand.csv", std::ios::binary) << demand;

  RunConfig c = toy2_config("bad_csv_out");
  c.instance = dir / "instance.json";
  c.scenarios = dir / "manifest.json";
  std::ostringstream err;
  EXPECT_EQ(execute(c, err), kExitInput);
  EXPECT_NE(err.str().find("demand.csv:4:"), std::string::npos) << err.str();
}

TEST(RunnerTest, RejectsBadConfig) {
  RunConfig c = toy2_config("bad_config");
  c.workers = 0;
  std::ostringstream err;
  EXPECT_EQ(execute(c, err), kExitInput);
  EXPECT_NE(err.str().find("worker"), std::string::npos);
}

TEST(RunnerTest, OracleModeReportsOptimumAndDuals) {
  const RunConfig c = [] {
    RunConfig c = toy2_config("oracle");
    c.mode = RunMode::kOracle;
    return c;
  }();
  std::ostringstream err;
  ASSERT_EQ(execute(c, err), kExitOk) << err.str();
  const auto s = nlohmann::json::parse(slurp(c.output / "summary.json"));
  auto [inst, sc] = testing::load_toy2();
  const OracleSolution o = solve_extended_form(inst, sc);
  EXPECT_NEAR(s["optimal_cost"].get<double>(), o.cost, 1e-6);
  EXPECT_NEAR(s["lambda_oracle"]["north"].get<double>(), o.lambda[0], 1e-9);
  EXPECT_NEAR(s["lambda_oracle"]["south"].get<double>(), o.lambda[1], 1e-9);
  EXPECT_TRUE(fs::exists(c.output / "final_plan.json"));
}

TEST(RunnerTest, FullModeWritesArtifacts) {
  const RunConfig c = toy2_config("full");
  std::ostringstream err;
  ASSERT_EQ(execute(c, err), kExitOk) << err.str();
  for (const char* f : {"bounds_trace.csv", "lambda_trace.csv", "final_plan.json",
                        "recovery_log.jsonl", "summary.json"}) {
    EXPECT_TRUE(fs::exists(c.output / f)) << f;
  }
  EXPECT_EQ(slurp(c.output / "bounds_trace.csv").rfind("k,lower,upper,gap,alpha,rho_norm\n0,", 0), 0u);
  const auto s = nlohmann::json::parse(slurp(c.output / "summary.json"));
  EXPECT_TRUE(s["converged"].get<bool>());
  EXPECT_LE(s["gap"].get<double>(), 0.02);
  std::istringstream lines(slurp(c.output / "recovery_log.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("zone"));
    EXPECT_LE(j["residual_mwh"].get<double>(), 1e-6);
  }
}

TEST(RunnerTest, WorkerCountGivesIdenticalOutputs) {
  RunConfig one = toy2_config("workers1");
  RunConfig eight = toy2_config("workers8");
  eight.workers = 8;
  std::ostringstream err;
  ASSERT_EQ(execute(one, err), kExitOk);
  ASSERT_EQ(execute(eight, err), kExitOk);
  for (const char* f : {"bounds_trace.csv", "lambda_trace.csv", "final_plan.json",
                        "recovery_log.jsonl", "summary.json"}) {
    EXPECT_EQ(slurp(one.output / f), slurp(eight.output / f)) << f;
  }
}

TEST(RunnerTest, FixedLambdaRunsOneIteration) {
  RunConfig c = toy2_config("fixed");
  c.mode = RunMode::kFixedLambda;
  c.fixed_lambda = 15000;
  std::ostringstream err;
  ASSERT_EQ(execute(c, err), kExitOk) << err.str();
  const std::string trace = slurp(c.output / "bounds_trace.csv");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 2);
  const std::string lambdas = slurp(c.output / "lambda_trace.csv");
  EXPECT_NE(lambdas.find("0,north,15000"), std::string::npos);
}

TEST(RunnerTest, WaitAndSeeModeAveragesScenarios) {
  RunConfig c = toy2_config("ws");
  c.mode = RunMode::kWaitAndSee;
  c.fixed_lambda = 50;
  std::ostringstream err;
  ASSERT_EQ(execute(c, err), kExitOk) << err.str();
  const auto s = nlohmann::json::parse(slurp(c.output / "summary.json"));
  const double dry = s["scenario_values"]["dry"].get<double>();
  const double wet = s["scenario_values"]["wet"].get<double>();
  EXPECT_NEAR(s["expected_value"].get<double>(), 0.5 * (dry + wet), 1e-5);
}

TEST(RunnerTest, ZeroCaseSetsEveryLimitToZero) {
  RunConfig c = toy2_config("zero");
  c.eens_case = EensCase::kZero;
  c.mode = RunMode::kOracle;
  std::ostringstream err;
  ASSERT_EQ(execute(c, err), kExitOk) << err.str();
  const auto s = nlohmann::json::parse(slurp(c.output / "summary.json"));
  EXPECT_EQ(s["eens_limit"]["north"].get<double>(), 0.0);
  EXPECT_EQ(s["eens_limit"]["south"].get<double>(), 0.0);
  EXPECT_NEAR(s["eens"]["north"].get<double>(), 0.0, 1e-6);
}

TEST(RunnerTest, UnattainableLimitExitsInfeasible) {
  const fs::path dir = scratch("unattainable");
  auto [inst, sc] = testing::load_toy2();
  for (auto& u : inst.thermal) {
    if (u.is_candidate()) u.cap_upper = 0.0;
  }
  write_instance(dir / "instance.json", inst);
  write_scenarios(dir, inst, sc);
  RunConfig c = toy2_config("unattainable_out");
  c.instance = dir / "instance.json";
  c.scenarios = dir / "manifest.json";
  c.eens_case = EensCase::kZero;
  for (RunMode m : {RunMode::kOracle, RunMode::kFull}) {
    c.mode = m;
    std::ostringstream err;
    EXPECT_EQ(execute(c, err), kExitInfeasible) << err.str();
    EXPECT_NE(err.str().find("infeasible"), std::string::npos);
  }
}

}  // namespace
}  // namespace cep
