#include "planguard/llm_client.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace planguard {

namespace {

using nlohmann::json;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // leading prefix, no trailing slash
};

SplitUrl split_base_url(const std::string& base_url) {
  std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos)
    throw TransportError("base URL must include a scheme: " + base_url);
  std::size_t path_start = base_url.find('/', scheme_end + 3);
  SplitUrl split;
  if (path_start == std::string::npos) {
    split.origin = base_url;
  } else {
    split.origin = base_url.substr(0, path_start);
    split.path = base_url.substr(path_start);
  }
  while (!split.path.empty() && split.path.back() == '/')
    split.path.pop_back();
  return split;
}

GenerationResult parse_completion(const std::string& body,
                                  const EndpointConfig& config) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("response is not JSON: ") + e.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty())
    throw MalformedResponse("response has no choices");
  const json& choice = doc["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string())
    throw MalformedResponse("response choice has no message content");

  GenerationResult result;
  result.text = choice["message"]["content"].get<std::string>();
  result.backend_id = "llm:" + config.model;

  if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
      choice["logprobs"].contains("content") &&
      choice["logprobs"]["content"].is_array()) {
    std::vector<double> probs;
    for (const json& token : choice["logprobs"]["content"]) {
      if (!token.contains("logprob") || !token["logprob"].is_number())
        throw MalformedResponse("logprobs entry without a numeric logprob");
      double p = std::exp(token["logprob"].get<double>());
      probs.push_back(
          std::clamp(p, std::numeric_limits<double>::min(), 1.0));
    }
    result.token_probs = std::move(probs);
  } else if (config.request_logprobs) {
    std::cerr << "planguard: endpoint omitted logprobs; confidence will be "
                 "unavailable\n";
  }
  return result;
}

}  // namespace

EndpointConfig endpoint_from_env() {
  EndpointConfig config;
  if (const char* url = std::getenv("PLANGUARD_LLM_BASE_URL"))
    config.base_url = url;
  if (const char* model = std::getenv("PLANGUARD_LLM_MODEL"))
    config.model = model;
  return config;
}

GenerationResult llm_generate(const EndpointConfig& config,
                              const std::string& prompt) {
  SplitUrl url = split_base_url(config.base_url);

  json body = {
      {"model", config.model},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config.temperature},
  };
  if (config.request_logprobs) body["logprobs"] = true;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(config.api_key_env.c_str()))
    headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(200 << (attempt - 1)));

    httplib::Client client(url.origin);
    client.set_connection_timeout(std::chrono::duration<double>(
        config.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(
        config.timeout_seconds));

    httplib::Result response = client.Post(url.path + "/chat/completions",
                                           headers, payload,
                                           "application/json");
    if (!response) {
      httplib::Error err = response.error();
      last_error = httplib::to_string(err);
      if (err == httplib::Error::ConnectionTimeout ||
          err == httplib::Error::Read || err == httplib::Error::Write)
        continue;  // transient
      continue;    // connection refused etc. also retried
    }

    if (response->status == 401 || response->status == 403)
      throw AuthError("endpoint rejected credentials (HTTP " +
                      std::to_string(response->status) + ")");
    if (response->status >= 500) {
      last_error = "HTTP " + std::to_string(response->status);
      continue;
    }
    if (response->status != 200)
      throw TransportError("unexpected HTTP status " +
                           std::to_string(response->status));
    return parse_completion(response->body, config);
  }

  if (last_error.find("imeout") != std::string::npos)
    throw TimeoutError("request timed out after retries: " + last_error);
  throw TransportError("request failed after retries: " + last_error);
}

GenerationResult LlmBackend::generate(const std::string& prompt,
                                      const DecodingOptions& options) {
  EndpointConfig config = config_;
  if (options.temperature != 0.0) config.temperature = options.temperature;
  return llm_generate(config, prompt);
}

}  // namespace planguard
