#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "planguard/benchmark.hpp"
#include "test_util.hpp"

using namespace planguard;

TEST_SUITE_BEGIN("benchmark");

namespace {

BenchConfig base_config() {
  BenchConfig config;
  config.prompts_dir = test::share_dir() + "/prompts";
  config.jobs = 2;
  return config;
}

}  // namespace

TEST_CASE("bench config parses from JSON") {
  BenchConfig config = BenchConfig::from_json(R"({
    "domain": "navigation",
    "sizes": [5, 7],
    "instances_per_size": 3,
    "seed": 42,
    "backend": "oracle",
    "mode": "task-planner",
    "iteration_limit": 10,
    "subtask_failure_limit": 2,
    "confidence_threshold": 0.5,
    "jobs": 4
  })");
  CHECK(config.domain == BenchDomain::Navigation);
  CHECK(config.sizes == std::vector<std::size_t>{5, 7});
  CHECK(config.instances_per_size == 3);
  CHECK(config.seed == 42);
  CHECK(config.mode == BenchMode::TaskPlanner);
  CHECK(config.iteration_limit == 10);
  CHECK(config.subtask_failure_limit == 2);
  CHECK(config.jobs == 4);

  CHECK_THROWS_AS(BenchConfig::from_json(R"({"domain": "chess", "sizes": [1]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      BenchConfig::from_json(R"({"domain": "navigation", "sizes": []})"),
      std::invalid_argument);
  CHECK_THROWS_AS(parse_bench_mode("other"), std::invalid_argument);
}

TEST_CASE("oracle backend sweeps blocksworld size 5 at 10/10") {
  BenchConfig config = base_config();
  config.domain = BenchDomain::Blocksworld;
  config.sizes = {5};
  config.instances_per_size = 10;
  config.seed = 11;
  config.backend = "oracle";
  config.mode = BenchMode::TaskPlanner;

  RunReport report = run_benchmark(config);
  REQUIRE(report.records.size() == 10);
  CHECK(report.successes() == 10);
  for (const InstanceRecord& record : report.records) {
    CHECK(record.success);
    CHECK(record.reverified);
    CHECK(record.iterations == 1);
    CHECK(record.error.empty());
  }
  CHECK(report.per_size.at(5) == std::make_pair(std::size_t{10},
                                                std::size_t{10}));
}

TEST_CASE("always-invalid scripted backend scores zero in one-shot mode") {
  std::string script_path =
      (std::filesystem::temp_directory_path() / "always-invalid.script")
          .string();
  {
    std::ofstream out(script_path);
    out << "1. pick-up b1\n2. pick-up b2\n";  // second pick-up never legal
  }

  BenchConfig config = base_config();
  config.domain = BenchDomain::Blocksworld;
  config.sizes = {3, 4};
  config.instances_per_size = 2;
  config.backend = "scripted:" + script_path;
  config.mode = BenchMode::OneShot;

  RunReport report = run_benchmark(config);
  REQUIRE(report.records.size() == 4);
  CHECK(report.successes() == 0);
  for (const InstanceRecord& record : report.records)
    CHECK(record.iterations == 1);
}

TEST_CASE("reports are deterministic modulo wall times") {
  BenchConfig config = base_config();
  config.domain = BenchDomain::Navigation;
  config.sizes = {5, 6};
  config.instances_per_size = 2;
  config.seed = 3;
  config.backend = "oracle";
  config.mode = BenchMode::TaskPlanner;

  RunReport first = run_benchmark(config);
  RunReport second = run_benchmark(config);
  CHECK(first.to_json(false) == second.to_json(false));
  CHECK(first.successes() == 4);
}

TEST_CASE("safepilot mode drives the hierarchy end to end on oracle") {
  BenchConfig config = base_config();
  config.domain = BenchDomain::Navigation;
  config.sizes = {5};
  config.instances_per_size = 2;
  config.seed = 9;
  config.backend = "oracle";
  config.mode = BenchMode::SafePilot;

  RunReport report = run_benchmark(config);
  CHECK(report.successes() == 2);
}

TEST_CASE("run directory receives per-instance transcripts") {
  std::string run_dir =
      (std::filesystem::temp_directory_path() / "planguard-run-test")
          .string();
  std::filesystem::remove_all(run_dir);

  BenchConfig config = base_config();
  config.domain = BenchDomain::Navigation;
  config.sizes = {5};
  config.instances_per_size = 1;
  config.backend = "oracle";
  config.mode = BenchMode::TaskPlanner;
  config.run_dir = run_dir;
  config.results_file = run_dir + "/results.json";

  RunReport report = run_benchmark(config);
  CHECK(report.successes() == 1);
  std::string log =
      test::read_file(run_dir + "/navigation-5-0.log");
  CHECK(log.find("=== prompt ===") != std::string::npos);
  CHECK(log.find("=== reply ===") != std::string::npos);
  CHECK(log.find("=== plan ===") != std::string::npos);
  std::string results = test::read_file(run_dir + "/results.json");
  CHECK(results.find("\"records\"") != std::string::npos);
  CHECK(results.find("\"summary\"") != std::string::npos);
}

TEST_SUITE_END();
