#include "planguard/backend.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace planguard {

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> script,
                                 std::string id)
    : script_(std::move(script)), id_(std::move(id)) {
  if (script_.empty())
    throw std::invalid_argument("scripted backend needs a non-empty script");
}

GenerationResult ScriptedBackend::generate(const std::string& prompt,
                                           const DecodingOptions&) {
  std::lock_guard<std::mutex> lock(mutex_);
  ++calls_;

  auto eligible = [&](const ScriptEntry& entry) {
    return entry.require.empty() ||
           prompt.find(entry.require) != std::string::npos;
  };

  const ScriptEntry* chosen = nullptr;
  for (std::size_t i = cursor_; i < script_.size(); ++i) {
    if (eligible(script_[i])) {
      chosen = &script_[i];
      cursor_ = i + 1;
      break;
    }
  }
  if (!chosen) {
    // Script exhausted (or nothing ahead is eligible): repeat the last
    // eligible entry, falling back to the final entry.
    for (std::size_t i = script_.size(); i-- > 0;) {
      if (eligible(script_[i])) {
        chosen = &script_[i];
        break;
      }
    }
    if (!chosen) chosen = &script_.back();
  }

  GenerationResult result;
  result.text = chosen->text;
  result.token_probs = chosen->token_probs;
  result.backend_id = id_;
  return result;
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_;
}

ScriptedBackend scripted_generate(std::vector<std::string> completions) {
  std::vector<ScriptEntry> script;
  script.reserve(completions.size());
  for (auto& text : completions) script.push_back({std::move(text), {}, {}});
  return ScriptedBackend(std::move(script));
}

std::vector<ScriptEntry> parse_script(const std::string& text) {
  std::vector<ScriptEntry> entries;
  ScriptEntry current;
  std::string body;
  bool any_line = false;

  auto flush = [&]() {
    while (!body.empty() && body.back() == '\n') body.pop_back();
    current.text = body;
    entries.push_back(current);
    current = ScriptEntry{};
    body.clear();
    any_line = false;
  };

  std::istringstream stream(text);
  for (std::string line; std::getline(stream, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "---") {
      flush();
      continue;
    }
    if (!any_line && line.starts_with("@require:")) {
      std::string value = line.substr(9);
      while (!value.empty() && value.front() == ' ') value.erase(0, 1);
      current.require = value;
      continue;
    }
    if (!any_line && line.starts_with("@probs:")) {
      std::istringstream probs(line.substr(7));
      std::vector<double> values;
      for (double p; probs >> p;) values.push_back(p);
      current.token_probs = std::move(values);
      continue;
    }
    body += line;
    body += '\n';
    if (!line.empty()) any_line = true;
  }
  flush();
  if (entries.size() > 1 && entries.back().text.empty() &&
      !entries.back().token_probs && entries.back().require.empty())
    entries.pop_back();  // trailing separator
  return entries;
}

std::vector<ScriptEntry> load_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_script(buffer.str());
}

std::optional<double> confidence_score(const GenerationResult& result,
                                       ConfidenceAggregate aggregate) {
  if (!result.token_probs || result.token_probs->empty()) return std::nullopt;
  const std::vector<double>& probs = *result.token_probs;
  if (aggregate == ConfidenceAggregate::ArithmeticMean) {
    double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    return sum / static_cast<double>(probs.size());
  }
  double log_sum = 0.0;
  for (double p : probs) log_sum += std::log(p);
  return std::exp(log_sum / static_cast<double>(probs.size()));
}

}  // namespace planguard
