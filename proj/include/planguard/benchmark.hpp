#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "planguard/generators.hpp"
#include "planguard/hierarchical.hpp"

namespace planguard {

enum class BenchMode { SafePilot, TaskPlanner, NoReason, OneShot };
enum class BenchDomain { Blocksworld, Navigation };

BenchMode parse_bench_mode(const std::string& name);
std::string to_string(BenchMode mode);
BenchDomain parse_bench_domain(const std::string& name);
std::string to_string(BenchDomain domain);

struct BenchConfig {
  BenchDomain domain = BenchDomain::Blocksworld;
  std::vector<std::size_t> sizes;
  std::size_t instances_per_size = 1;
  std::uint64_t seed = 0;
  std::string backend = "oracle";  // "llm" | "oracle" | "scripted:PATH"
  std::size_t iteration_limit = kDefaultIterationLimit;
  std::size_t subtask_failure_limit = kDefaultFailureLimit;
  double confidence_threshold = kDefaultConfidenceThreshold;
  ConfidenceAggregate aggregate = ConfidenceAggregate::ArithmeticMean;
  BenchMode mode = BenchMode::SafePilot;
  std::string prompts_dir;    // directory holding task.txt etc.
  std::string results_file;   // empty: do not write
  std::string run_dir;        // per-instance transcript logs; empty: none
  std::size_t jobs = 2;
  GeneratorTuning tuning;     // instance distribution knobs

  static BenchConfig from_json(const std::string& text);
};

struct InstanceRecord {
  std::string id;
  std::size_t size = 0;
  std::string mode;
  bool success = false;
  bool reverified = false;  // success re-checked by a fresh validator
  std::size_t iterations = 0;
  std::size_t rollbacks = 0;
  bool fallback_used = false;
  double wall_seconds = 0.0;
  std::string plan_text;     // numbered steps for successful runs
  std::string verdict_json;  // final verdict record, when one exists
  std::string error;         // per-instance failure note, run continues
};

struct RunReport {
  std::vector<InstanceRecord> records;
  // size -> (successes, instances)
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_size;

  std::size_t successes() const;
  std::string to_json(bool include_wall_times = true) const;
};

PlanningProblem bench_instance(BenchDomain domain, std::size_t size,
                               std::uint64_t seed, std::size_t index,
                               const GeneratorTuning& tuning = {});

// Generates sizes x instances problems, runs each through the selected mode
// on a worker pool, re-verifies every reported success with a fresh
// validator, and (when configured) writes the report and per-instance
// transcripts.
RunReport run_benchmark(const BenchConfig& config);

}  // namespace planguard
