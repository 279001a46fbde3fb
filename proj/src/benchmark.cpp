#include "planguard/benchmark.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "planguard/generators.hpp"
#include "planguard/llm_client.hpp"
#include "planguard/oracle.hpp"

namespace planguard {

BenchMode parse_bench_mode(const std::string& name) {
  if (name == "safepilot") return BenchMode::SafePilot;
  if (name == "task-planner") return BenchMode::TaskPlanner;
  if (name == "no-reason") return BenchMode::NoReason;
  if (name == "one-shot") return BenchMode::OneShot;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (safepilot, task-planner, no-reason, "
                              "one-shot)");
}

std::string to_string(BenchMode mode) {
  switch (mode) {
    case BenchMode::SafePilot:
      return "safepilot";
    case BenchMode::TaskPlanner:
      return "task-planner";
    case BenchMode::NoReason:
      return "no-reason";
    case BenchMode::OneShot:
      return "one-shot";
  }
  return {};
}

BenchDomain parse_bench_domain(const std::string& name) {
  if (name == "blocksworld") return BenchDomain::Blocksworld;
  if (name == "navigation") return BenchDomain::Navigation;
  throw std::invalid_argument("unknown domain '" + name +
                              "' (blocksworld, navigation)");
}

std::string to_string(BenchDomain domain) {
  return domain == BenchDomain::Blocksworld ? "blocksworld" : "navigation";
}

BenchConfig BenchConfig::from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  BenchConfig config;
  config.domain = parse_bench_domain(doc.at("domain").get<std::string>());
  for (const auto& size : doc.at("sizes"))
    config.sizes.push_back(size.get<std::size_t>());
  if (config.sizes.empty())
    throw std::invalid_argument("config needs a non-empty sizes list");
  config.instances_per_size =
      doc.value("instances_per_size", std::size_t{1});
  if (config.instances_per_size < 1)
    throw std::invalid_argument("instances_per_size must be >= 1");
  config.seed = doc.value("seed", std::uint64_t{0});
  config.backend = doc.value("backend", std::string("oracle"));
  config.iteration_limit =
      doc.value("iteration_limit", kDefaultIterationLimit);
  config.subtask_failure_limit =
      doc.value("subtask_failure_limit", kDefaultFailureLimit);
  config.confidence_threshold =
      doc.value("confidence_threshold", kDefaultConfidenceThreshold);
  if (doc.value("confidence_aggregate", std::string("arithmetic")) ==
      "geometric")
    config.aggregate = ConfidenceAggregate::GeometricMean;
  config.mode =
      parse_bench_mode(doc.value("mode", std::string("safepilot")));
  config.prompts_dir = doc.value("prompts_dir", std::string());
  config.results_file = doc.value("results_file", std::string());
  config.run_dir = doc.value("run_dir", std::string());
  config.jobs = doc.value("jobs", std::size_t{2});
  if (config.jobs < 1) config.jobs = 1;
  if (doc.contains("generator")) {
    const nlohmann::json& gen = doc["generator"];
    config.tuning.nav_extra_road_fraction =
        gen.value("nav_extra_road_fraction",
                  config.tuning.nav_extra_road_fraction);
    config.tuning.nav_walk_factor =
        gen.value("nav_walk_factor", config.tuning.nav_walk_factor);
    config.tuning.bw_walk_factor =
        gen.value("bw_walk_factor", config.tuning.bw_walk_factor);
    config.tuning.nav_templates =
        gen.value("nav_templates", config.tuning.nav_templates);
  }
  return config;
}

std::size_t RunReport::successes() const {
  std::size_t count = 0;
  for (const InstanceRecord& record : records)
    if (record.success) ++count;
  return count;
}

std::string RunReport::to_json(bool include_wall_times) const {
  nlohmann::json instances = nlohmann::json::array();
  for (const InstanceRecord& record : records) {
    nlohmann::json entry = {
        {"id", record.id},
        {"size", record.size},
        {"mode", record.mode},
        {"success", record.success},
        {"reverified", record.reverified},
        {"iterations", record.iterations},
        {"rollbacks", record.rollbacks},
        {"fallback_used", record.fallback_used},
        {"plan", record.plan_text},
    };
    if (!record.verdict_json.empty())
      entry["verdict"] = nlohmann::json::parse(record.verdict_json);
    if (!record.error.empty()) entry["error"] = record.error;
    if (include_wall_times) entry["wall_seconds"] = record.wall_seconds;
    instances.push_back(std::move(entry));
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& [size, counts] : per_size)
    summary.push_back({{"size", size},
                       {"successes", counts.first},
                       {"instances", counts.second}});
  nlohmann::json doc = {{"records", instances}, {"summary", summary}};
  return doc.dump(2) + "\n";
}

PlanningProblem bench_instance(BenchDomain domain, std::size_t size,
                               std::uint64_t seed, std::size_t index,
                               const GeneratorTuning& tuning) {
  const std::uint64_t instance_seed = seed + index;
  return domain == BenchDomain::Blocksworld
             ? gen_blocksworld(size, instance_seed, tuning)
             : gen_navigation(size, instance_seed, tuning);
}

namespace {

std::unique_ptr<PlannerBackend> make_backend(
    const BenchConfig& config, const PlanningProblem& problem,
    const std::vector<ScriptEntry>& script) {
  if (config.backend == "oracle")
    return std::make_unique<OracleBackend>(problem);
  if (config.backend == "llm")
    return std::make_unique<LlmBackend>(endpoint_from_env());
  if (config.backend.starts_with("scripted:"))
    return std::make_unique<ScriptedBackend>(script);
  throw std::invalid_argument("unknown backend '" + config.backend + "'");
}

struct ModeResult {
  bool success = false;
  Plan plan;
  std::size_t iterations = 0;
  std::size_t rollbacks = 0;
  bool fallback_used = false;
  std::string verdict_json;  // final verdict record, when one exists
};

// Serializes the last verdict of a loop history (re-parsing its reply).
std::string history_verdict_json(const std::vector<IterationRecord>& history,
                                 const PlanningProblem& problem) {
  if (history.empty() || !history.back().verdict) return {};
  try {
    Plan plan = parse_plan_text(history.back().reply, problem);
    return verdict_record_json(*history.back().verdict, plan, problem);
  } catch (const PlanTextError&) {
    return {};
  }
}

ModeResult run_mode(const BenchConfig& config, const PlanningProblem& problem,
                    PlannerBackend& backend, const PromptTemplates& templates,
                    const DomainPrompts& prompts,
                    const TranscriptSink& transcript) {
  ModeResult result;
  switch (config.mode) {
    case BenchMode::OneShot: {
      const std::string prompt =
          build_task_prompt(templates, prompts, problem);
      if (transcript) transcript("prompt", prompt);
      GenerationResult generation = backend.generate(prompt);
      if (transcript) transcript("reply", generation.text);
      result.iterations = 1;
      try {
        Plan plan = parse_plan_text(generation.text, problem);
        Verdict verdict = verify_plan(problem, plan);
        result.verdict_json = verdict_record_json(verdict, plan, problem);
        if (verdict.valid) {
          result.success = true;
          result.plan = std::move(plan);
        }
      } catch (const PlanTextError&) {
      }
      return result;
    }
    case BenchMode::TaskPlanner:
    case BenchMode::NoReason: {
      LoopOptions loop;
      loop.iteration_limit = config.iteration_limit;
      loop.correction_style = config.mode == BenchMode::TaskPlanner
                                  ? CorrectionStyle::Reasoning
                                  : CorrectionStyle::InvalidOnly;
      loop.transcript = transcript;
      LoopOutcome outcome =
          plan_with_verification(problem, backend, templates, prompts, loop);
      result.success = outcome.success;
      if (outcome.plan) result.plan = *outcome.plan;
      result.iterations = outcome.iterations_used;
      result.verdict_json = history_verdict_json(outcome.history, problem);
      return result;
    }
    case BenchMode::SafePilot: {
      HierOptions options;
      options.iteration_limit = config.iteration_limit;
      options.failure_limit = config.subtask_failure_limit;
      options.confidence_threshold = config.confidence_threshold;
      options.aggregate = config.aggregate;
      options.transcript = transcript;
      if (transcript)
        options.events = [&transcript](const HierEvent& event) {
          transcript("event",
                     to_string(event.kind) + " k=" + std::to_string(event.k) +
                         " counter=" + std::to_string(event.counter));
        };
      AssuredOutcome outcome = plan_with_assurance(problem, backend,
                                                   templates, prompts,
                                                   options);
      result.success = outcome.success;
      result.plan = std::move(outcome.plan);
      result.iterations = outcome.iterations;
      result.rollbacks = outcome.rollbacks;
      result.fallback_used = outcome.fallback_used;
      result.verdict_json =
          history_verdict_json(outcome.direct_history, problem);
      if (result.verdict_json.empty() && outcome.success)
        result.verdict_json =
            verdict_record_json(Verdict::ok(), result.plan, problem);
      return result;
    }
  }
  return result;
}

}  // namespace

RunReport run_benchmark(const BenchConfig& config) {
  const std::string domain_dir =
      config.prompts_dir + "/" + to_string(config.domain);
  const PromptTemplates templates = PromptTemplates::load(config.prompts_dir);
  const DomainPrompts prompts = DomainPrompts::load(domain_dir);

  std::vector<ScriptEntry> script;
  if (config.backend.starts_with("scripted:"))
    script = load_script_file(config.backend.substr(9));

  if (!config.run_dir.empty())
    std::filesystem::create_directories(config.run_dir);

  struct Job {
    std::size_t size;
    std::size_t index;
    std::string id;
  };
  std::vector<Job> jobs;
  for (std::size_t size : config.sizes)
    for (std::size_t i = 0; i < config.instances_per_size; ++i)
      jobs.push_back({size, i,
                      to_string(config.domain) + "-" + std::to_string(size) +
                          "-" + std::to_string(i)});

  std::vector<InstanceRecord> records(jobs.size());
  std::mutex next_mutex;
  std::size_t next_job = 0;

  auto worker = [&]() {
    while (true) {
      std::size_t job_index;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next_job >= jobs.size()) return;
        job_index = next_job++;
      }
      const Job& job = jobs[job_index];
      InstanceRecord record;
      record.id = job.id;
      record.size = job.size;
      record.mode = to_string(config.mode);

      std::ofstream log;
      TranscriptSink transcript;
      if (!config.run_dir.empty()) {
        log.open(config.run_dir + "/" + job.id + ".log");
        transcript = [&log](const std::string& role,
                            const std::string& text) {
          log << "=== " << role << " ===\n" << text << "\n";
        };
      }

      const auto started = std::chrono::steady_clock::now();
      try {
        PlanningProblem problem = bench_instance(
            config.domain, job.size, config.seed, job.index, config.tuning);
        std::unique_ptr<PlannerBackend> backend =
            make_backend(config, problem, script);
        ModeResult result = run_mode(config, problem, *backend, templates,
                                     prompts, transcript);
        record.iterations = result.iterations;
        record.rollbacks = result.rollbacks;
        record.fallback_used = result.fallback_used;
        record.verdict_json = result.verdict_json;
        if (result.success) {
          // Success is only reported when an independently constructed
          // problem instance re-verifies the plan.
          PlanningProblem fresh = bench_instance(
              config.domain, job.size, config.seed, job.index, config.tuning);
          record.reverified = verify_plan(fresh, result.plan).valid;
          record.success = record.reverified;
          record.plan_text = format_plan(result.plan, problem);
          if (log.is_open() && record.success)
            log << "=== plan ===\n" << record.plan_text << "\n";
        }
      } catch (const std::exception& e) {
        record.error = e.what();
      }
      record.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        started)
              .count();
      records[job_index] = std::move(record);
    }
  };

  std::vector<std::thread> pool;
  const std::size_t workers = std::min(config.jobs, jobs.size());
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  RunReport report;
  report.records = std::move(records);
  for (const InstanceRecord& record : report.records) {
    auto& [successes, total] = report.per_size[record.size];
    ++total;
    if (record.success) ++successes;
  }

  if (!config.results_file.empty()) {
    std::ofstream out(config.results_file);
    out << report.to_json();
  }
  return report;
}

}  // namespace planguard
