#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "planguard/benchmark.hpp"
#include "planguard/generators.hpp"
#include "planguard/llm_client.hpp"
#include "planguard/oracle.hpp"

namespace fs = std::filesystem;
using namespace planguard;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitPlanFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string resolve_prompts_dir(const std::string& flag_value,
                                const char* argv0) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("PLANGUARD_PROMPTS_DIR")) return env;
  if (fs::exists("share/prompts/task.txt")) return "share/prompts";
  fs::path exe_dir = fs::weakly_canonical(fs::path(argv0)).parent_path();
  for (const char* relative : {"../share/prompts", "../../share/prompts"}) {
    fs::path candidate = exe_dir / relative;
    if (fs::exists(candidate / "task.txt")) return candidate.string();
  }
  throw std::runtime_error(
      "cannot locate the prompts directory; pass --prompts-dir");
}

PlanningProblem load_problem_with_domain(const std::string& problem_file,
                                         const std::string& domain_file,
                                         const std::string& constraints_file) {
  PlanningProblem problem = parse_problem(read_file(problem_file));
  attach_domain(problem, parse_domain(read_file(domain_file)));
  if (!constraints_file.empty())
    problem.constraints =
        parse_constraint_sidecar(read_file(constraints_file), problem);
  // An initial state that violates a state constraint is a problem defect,
  // not a plan defect; flag it at load time.
  for (const StateConstraint& c : problem.constraints.state_constraints)
    if (!goal_holds(problem.init, c.formula))
      throw std::runtime_error(
          "the initial state already violates the constraint: " + c.text);
  return problem;
}

std::string detect_profile(const PlanningProblem& problem,
                           const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  return problem.objects_keyword_cities ? "navigation" : "blocksworld";
}

std::unique_ptr<PlannerBackend> make_backend(const std::string& name,
                                             const PlanningProblem& problem) {
  if (name == "oracle") return std::make_unique<OracleBackend>(problem);
  if (name == "llm") {
    EndpointConfig config = endpoint_from_env();
    if (config.base_url.empty())
      throw std::runtime_error(
          "llm backend needs PLANGUARD_LLM_BASE_URL (and usually "
          "PLANGUARD_LLM_MODEL / PLANGUARD_LLM_API_KEY)");
    return std::make_unique<LlmBackend>(config);
  }
  if (name.starts_with("scripted:"))
    return std::make_unique<ScriptedBackend>(
        load_script_file(name.substr(9)));
  throw std::runtime_error("unknown backend '" + name +
                           "' (llm, oracle, scripted:PATH)");
}

TranscriptSink make_run_log(const std::string& run_dir,
                            const std::string& name,
                            std::shared_ptr<std::ofstream>& keeper) {
  if (run_dir.empty()) return {};
  fs::create_directories(run_dir);
  keeper = std::make_shared<std::ofstream>(run_dir + "/" + name + ".log");
  auto log = keeper;
  return [log](const std::string& role, const std::string& text) {
    *log << "=== " << role << " ===\n" << text << "\n";
  };
}

int cmd_verify(const std::string& problem_file, const std::string& domain_file,
               const std::string& plan_file,
               const std::string& constraints_file) {
  PlanningProblem problem =
      load_problem_with_domain(problem_file, domain_file, constraints_file);
  Plan plan;
  try {
    plan = parse_plan_text(read_file(plan_file), problem);
  } catch (const PlanTextError& e) {
    std::cerr << "plan file: " << e.what() << "\n";
    return kExitPlanFailure;
  }
  Verdict verdict = verify_plan(problem, plan);
  if (verdict.valid) {
    std::cout << "VALID: " << plan.size() << " steps satisfy " << problem.name
              << "\n";
    return kExitSuccess;
  }
  std::cout << "INVALID (" << to_string(verdict.kind);
  if (verdict.step) std::cout << " at step " << *verdict.step;
  std::cout << ")\n" << reasoning_text(verdict, plan, problem) << "\n";
  return kExitPlanFailure;
}

struct PlanFlags {
  std::string backend = "oracle";
  std::string mode = "safepilot";
  std::size_t iteration_limit = kDefaultIterationLimit;
  std::size_t failure_limit = kDefaultFailureLimit;
  double confidence_threshold = kDefaultConfidenceThreshold;
  std::string confidence_aggregate = "arithmetic";
  bool auto_approve = false;
  std::string prompts_dir;
  std::string profile;
  std::string run_dir;
};

int cmd_plan(const std::string& problem_file, const std::string& domain_file,
             const std::string& constraints_file, const PlanFlags& flags,
             const char* argv0) {
  PlanningProblem problem =
      load_problem_with_domain(problem_file, domain_file, constraints_file);

  std::string prompts_dir = resolve_prompts_dir(flags.prompts_dir, argv0);
  PromptTemplates templates = PromptTemplates::load(prompts_dir);
  DomainPrompts prompts = DomainPrompts::load(
      prompts_dir + "/" + detect_profile(problem, flags.profile));

  std::unique_ptr<PlannerBackend> backend =
      make_backend(flags.backend, problem);

  bool untranslated = false;
  for (const TemporalConstraint& c : problem.constraints.temporal_constraints)
    if (!c.translated()) untranslated = true;
  if (untranslated) {
    if (flags.backend == "oracle")
      throw std::runtime_error(
          "constraints are untranslated; run 'planguard translate' or pass "
          "--constraints (the oracle backend cannot translate)");
    std::cerr << "translating " << "constraints via " << backend->id()
              << (flags.auto_approve ? " (auto-approved)" : "") << "\n";
    problem.constraints = translate_constraints(
        problem, *backend, templates, prompts,
        flags.auto_approve ? ApprovalMode::Auto : ApprovalMode::Interactive);
  }

  std::shared_ptr<std::ofstream> log_keeper;
  TranscriptSink transcript =
      make_run_log(flags.run_dir, problem.name, log_keeper);

  BenchMode mode = parse_bench_mode(flags.mode);
  bool success = false;
  Plan plan;
  switch (mode) {
    case BenchMode::OneShot: {
      const std::string prompt = build_task_prompt(templates, prompts, problem);
      if (transcript) transcript("prompt", prompt);
      GenerationResult generation = backend->generate(prompt);
      if (transcript) transcript("reply", generation.text);
      try {
        plan = parse_plan_text(generation.text, problem);
        success = verify_plan(problem, plan).valid;
      } catch (const PlanTextError& e) {
        std::cerr << e.what() << "\n";
      }
      break;
    }
    case BenchMode::TaskPlanner:
    case BenchMode::NoReason: {
      LoopOptions options;
      options.iteration_limit = flags.iteration_limit;
      options.correction_style = mode == BenchMode::TaskPlanner
                                     ? CorrectionStyle::Reasoning
                                     : CorrectionStyle::InvalidOnly;
      options.transcript = transcript;
      LoopOutcome outcome = plan_with_verification(problem, *backend,
                                                   templates, prompts,
                                                   options);
      success = outcome.success;
      if (outcome.plan) plan = *outcome.plan;
      std::cerr << "iterations used: " << outcome.iterations_used << "\n";
      break;
    }
    case BenchMode::SafePilot: {
      HierOptions options;
      options.iteration_limit = flags.iteration_limit;
      options.failure_limit = flags.failure_limit;
      options.confidence_threshold = flags.confidence_threshold;
      options.aggregate = flags.confidence_aggregate == "geometric"
                              ? ConfidenceAggregate::GeometricMean
                              : ConfidenceAggregate::ArithmeticMean;
      options.transcript = transcript;
      if (transcript)
        options.events = [&transcript](const HierEvent& event) {
          transcript("event", to_string(event.kind) +
                                  " k=" + std::to_string(event.k) +
                                  " counter=" + std::to_string(event.counter));
        };
      AssuredOutcome outcome = plan_with_assurance(problem, *backend,
                                                   templates, prompts,
                                                   options);
      success = outcome.success;
      plan = outcome.plan;
      std::cerr << "iterations used: " << outcome.iterations << "\n";
      if (outcome.decomposed)
        std::cerr << "decomposed (rollbacks: " << outcome.rollbacks
                  << ", fallback: " << (outcome.fallback_used ? "yes" : "no")
                  << ")\n";
      break;
    }
  }

  if (!success) {
    std::cout << "no valid plan found for " << problem.name << "\n";
    return kExitPlanFailure;
  }
  // Independent re-check before reporting success.
  PlanningProblem fresh =
      load_problem_with_domain(problem_file, domain_file, constraints_file);
  fresh.constraints = problem.constraints;
  Verdict verdict = verify_plan(fresh, plan);
  if (!verdict.valid) {
    std::cout << "planner produced a plan that failed re-verification\n";
    return kExitPlanFailure;
  }
  std::cout << format_plan(plan, problem) << "\n";
  return kExitSuccess;
}

int cmd_translate(const std::string& problem_file, bool interactive,
                  const std::string& backend_name,
                  const std::string& out_file, const std::string& prompts_dir,
                  const std::string& profile, const char* argv0) {
  PlanningProblem problem = parse_problem(read_file(problem_file));
  if (problem.constraints.temporal_constraints.empty() &&
      problem.constraints.state_constraints.empty())
    throw std::runtime_error("problem declares no constraints to translate");

  std::string dir = resolve_prompts_dir(prompts_dir, argv0);
  PromptTemplates templates = PromptTemplates::load(dir);
  DomainPrompts prompts =
      DomainPrompts::load(dir + "/" + detect_profile(problem, profile));
  std::unique_ptr<PlannerBackend> backend =
      make_backend(backend_name, problem);

  ConstraintSet constraints = translate_constraints(
      problem, *backend, templates, prompts,
      interactive ? ApprovalMode::Interactive : ApprovalMode::Auto);

  std::string sidecar = constraint_sidecar_json(constraints);
  if (out_file.empty()) {
    std::cout << sidecar;
  } else {
    std::ofstream out(out_file);
    out << sidecar;
    std::cerr << "wrote " << out_file << "\n";
  }
  return kExitSuccess;
}

int cmd_bench(const std::string& config_file, const std::string& results_file,
              const std::string& prompts_dir, const char* argv0) {
  BenchConfig config = BenchConfig::from_json(read_file(config_file));
  if (!results_file.empty()) config.results_file = results_file;
  if (config.results_file.empty()) config.results_file = "results.json";
  config.prompts_dir = resolve_prompts_dir(
      prompts_dir.empty() ? config.prompts_dir : prompts_dir, argv0);

  RunReport report = run_benchmark(config);
  std::cout << "domain " << to_string(config.domain) << ", mode "
            << to_string(config.mode) << ", backend " << config.backend
            << "\n";
  for (const auto& [size, counts] : report.per_size)
    std::cout << "  size " << size << ": " << counts.first << "/"
              << counts.second << " solved\n";
  std::cout << "total: " << report.successes() << "/" << report.records.size()
            << "\n";
  if (!config.results_file.empty())
    std::cout << "results written to " << config.results_file << "\n";
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plan assurance toolkit: verify, repair and benchmark "
               "planner output under first-order and temporal constraints"};
  app.require_subcommand(1);

  // verify
  std::string problem_file, domain_file, plan_file, constraints_file;
  CLI::App* verify = app.add_subcommand(
      "verify", "check one plan against a problem and its constraints");
  verify->add_option("problem", problem_file, "problem file")->required();
  verify->add_option("domain", domain_file, "domain file")->required();
  verify->add_option("plan", plan_file, "plan text file")->required();
  verify->add_option("--constraints", constraints_file,
                     "constraints sidecar JSON");

  // plan
  PlanFlags plan_flags;
  std::string plan_problem, plan_domain, plan_constraints;
  CLI::App* plan = app.add_subcommand(
      "plan", "generate a verified plan with the selected backend");
  plan->add_option("problem", plan_problem, "problem file")->required();
  plan->add_option("domain", plan_domain, "domain file")->required();
  plan->add_option("--constraints", plan_constraints,
                   "constraints sidecar JSON");
  plan->add_option("--backend", plan_flags.backend,
                   "llm | oracle | scripted:PATH");
  plan->add_option("--mode", plan_flags.mode,
                   "safepilot | task-planner | no-reason | one-shot");
  plan->add_option("--iteration-limit", plan_flags.iteration_limit,
                   "verification loop limit");
  plan->add_option("--subtask-failure-limit", plan_flags.failure_limit,
                   "failures per sub-task before rollback");
  plan->add_option("--confidence-threshold", plan_flags.confidence_threshold,
                   "discriminator threshold in [0,1]");
  plan->add_option("--confidence-aggregate",
                   plan_flags.confidence_aggregate,
                   "arithmetic | geometric token-probability mean");
  plan->add_flag("--auto-approve", plan_flags.auto_approve,
                 "accept translated formulas without review");
  plan->add_option("--prompts-dir", plan_flags.prompts_dir,
                   "prompt fixture directory");
  plan->add_option("--profile", plan_flags.profile,
                   "prompt profile (blocksworld | navigation)");
  plan->add_option("--run-dir", plan_flags.run_dir,
                   "directory for prompt/reply transcripts");

  // translate
  std::string tr_problem, tr_backend = "llm", tr_out, tr_prompts, tr_profile;
  bool tr_interactive = false;
  CLI::App* translate = app.add_subcommand(
      "translate", "translate NL constraints into formal formulas");
  translate->add_option("problem", tr_problem, "problem file")->required();
  translate->add_flag("--interactive", tr_interactive,
                      "review each formula before accepting");
  translate->add_option("--backend", tr_backend,
                        "llm | oracle | scripted:PATH");
  translate->add_option("--out", tr_out, "sidecar output file");
  translate->add_option("--prompts-dir", tr_prompts,
                        "prompt fixture directory");
  translate->add_option("--profile", tr_profile,
                        "prompt profile (blocksworld | navigation)");

  // bench
  std::string bench_config, bench_results, bench_prompts;
  CLI::App* bench = app.add_subcommand(
      "bench", "run a benchmark sweep from a JSON config");
  bench->add_option("config", bench_config, "bench config JSON")->required();
  bench->add_option("--results", bench_results, "results file override");
  bench->add_option("--prompts-dir", bench_prompts,
                    "prompt fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify)
      return cmd_verify(problem_file, domain_file, plan_file,
                        constraints_file);
    if (*plan)
      return cmd_plan(plan_problem, plan_domain, plan_constraints, plan_flags,
                      argv[0]);
    if (*translate)
      return cmd_translate(tr_problem, tr_interactive, tr_backend, tr_out,
                           tr_prompts, tr_profile, argv[0]);
    if (*bench)
      return cmd_bench(bench_config, bench_results, bench_prompts, argv[0]);
  } catch (const TranslationRetryExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPlanFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
