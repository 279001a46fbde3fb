#pragma once

#include <stdexcept>
#include <string>

#include "planguard/backend.hpp"

namespace planguard {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EndpointConfig {
  std::string base_url;  // e.g. "http://localhost:8810/v1"
  std::string model;
  // Name of the environment variable holding the API key; requests go out
  // without an Authorization header when it is unset.
  std::string api_key_env = "PLANGUARD_LLM_API_KEY";
  double timeout_seconds = 60.0;
  int max_retries = 2;
  double temperature = 0.0;
  bool request_logprobs = true;
};

// Environment variables PLANGUARD_LLM_BASE_URL and PLANGUARD_LLM_MODEL.
EndpointConfig endpoint_from_env();

// One chat-completion round trip: the prompt as a single user message,
// token log-probabilities requested per config and converted to
// probabilities. Transient transport failures retry with exponential
// backoff up to max_retries.
GenerationResult llm_generate(const EndpointConfig& config,
                              const std::string& prompt);

class LlmBackend : public PlannerBackend {
 public:
  explicit LlmBackend(EndpointConfig config) : config_(std::move(config)) {}
  GenerationResult generate(const std::string& prompt,
                            const DecodingOptions& options = {}) override;
  std::string id() const override { return "llm:" + config_.model; }

 private:
  EndpointConfig config_;
};

}  // namespace planguard
