#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace planguard {

struct GenerationResult {
  std::string text;
  // One probability in (0,1] per emitted token, when the backend reports them.
  std::optional<std::vector<double>> token_probs;
  std::string backend_id;
};

struct DecodingOptions {
  double temperature = 0.0;
};

// A plan generator. generate() never mutates the caller's problem; repeated
// calls are permitted. Implementations must be usable from concurrent
// benchmark workers.
class PlannerBackend {
 public:
  virtual ~PlannerBackend() = default;
  virtual GenerationResult generate(const std::string& prompt,
                                    const DecodingOptions& options = {}) = 0;
  virtual std::string id() const = 0;
};

struct ScriptEntry {
  std::string text;
  std::optional<std::vector<double>> token_probs;
  // When non-empty, the entry is only eligible if the prompt contains this
  // substring; ineligible entries are passed over.
  std::string require;
};

// Deterministic replay backend: the nth call returns the nth eligible entry;
// calls beyond the script repeat the last eligible entry. The cursor is
// internally synchronized.
class ScriptedBackend : public PlannerBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptEntry> script,
                           std::string id = "scripted");
  GenerationResult generate(const std::string& prompt,
                            const DecodingOptions& options = {}) override;
  std::string id() const override { return id_; }
  std::size_t calls() const;

 private:
  mutable std::mutex mutex_;
  std::vector<ScriptEntry> script_;
  std::size_t cursor_ = 0;
  std::size_t calls_ = 0;
  std::string id_;
};

ScriptedBackend scripted_generate(std::vector<std::string> completions);

// Script file format: entries separated by lines of "---"; optional header
// lines "@require: TEXT" and "@probs: p1 p2 ..." precede the entry text.
std::vector<ScriptEntry> parse_script(const std::string& text);
std::vector<ScriptEntry> load_script_file(const std::string& path);

enum class ConfidenceAggregate { ArithmeticMean, GeometricMean };

// Mean of token probabilities; empty when the result carries none.
std::optional<double> confidence_score(
    const GenerationResult& result,
    ConfidenceAggregate aggregate = ConfidenceAggregate::ArithmeticMean);

}  // namespace planguard
