#include <atomic>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "planguard/llm_client.hpp"
#include "test_util.hpp"

using namespace planguard;
using nlohmann::json;

TEST_SUITE_BEGIN("llm-client");

namespace {

// Serves the recorded request/response transcript, one record per request,
// checking that the request body carries the recorded fields.
class FixtureServer {
 public:
  explicit FixtureServer(const std::string& fixture_path) {
    std::ifstream in(fixture_path);
    REQUIRE(in);
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) records_.push_back(json::parse(line));

    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   serve(req, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this]() { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FixtureServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
  }

  bool request_mismatch() const { return request_mismatch_; }

 private:
  void serve(const httplib::Request& req, httplib::Response& res) {
    std::size_t index = served_++;
    if (index >= records_.size()) {
      res.status = 500;
      return;
    }
    const json& record = records_[index];
    json body = json::parse(req.body);
    for (const auto& [key, value] : record["request"].items())
      if (!body.contains(key) || body[key] != value) request_mismatch_ = true;
    res.status = record["response"]["status"].get<int>();
    res.set_content(record["response"]["body"].dump(), "application/json");
  }

  std::vector<json> records_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<std::size_t> served_{0};
  std::atomic<bool> request_mismatch_{false};
};

EndpointConfig test_config(const FixtureServer& server) {
  EndpointConfig config;
  config.base_url = server.base_url();
  config.model = "test-model";
  config.max_retries = 0;
  config.timeout_seconds = 5.0;
  return config;
}

}  // namespace

TEST_CASE("llm_generate replays the recorded transcript") {
  FixtureServer server(std::string(PLANGUARD_TEST_DIR) +
                       "/fixtures/chat-completions.jsonl");
  EndpointConfig config = test_config(server);

  // Record 1: completion with 17 token log-probabilities.
  GenerationResult first = llm_generate(config, "plan please");
  CHECK(first.text == "START-PLAN\n1. A -> B\n2. B -> C");
  REQUIRE(first.token_probs.has_value());
  CHECK(first.token_probs->size() == 17);
  for (double p : *first.token_probs) {
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }

  // Record 2: logprobs requested but omitted; degradation, not an error.
  GenerationResult second = llm_generate(config, "plan please");
  CHECK(second.text == "no probabilities this time");
  CHECK_FALSE(second.token_probs.has_value());

  // Record 3: credentials rejected.
  CHECK_THROWS_AS(llm_generate(config, "plan please"), AuthError);

  // Record 4: structurally broken completion.
  CHECK_THROWS_AS(llm_generate(config, "plan please"), MalformedResponse);

  CHECK_FALSE(server.request_mismatch());
}

TEST_CASE("llm_generate surfaces transport failures after retries") {
  EndpointConfig config;
  config.base_url = "http://127.0.0.1:9";  // discard port: refused
  config.model = "test-model";
  config.max_retries = 1;
  config.timeout_seconds = 0.2;
  CHECK_THROWS_AS(llm_generate(config, "x"), TransportError);
}

TEST_CASE("llm backend adapts the endpoint to the backend interface") {
  FixtureServer server(std::string(PLANGUARD_TEST_DIR) +
                       "/fixtures/chat-completions.jsonl");
  LlmBackend backend(test_config(server));
  GenerationResult result = backend.generate("prompt");
  CHECK(result.backend_id == "llm:test-model");
  CHECK(result.token_probs.has_value());
}

// Opt-in live smoke test; set PLANGUARD_LLM_BASE_URL and
// PLANGUARD_LLM_MODEL to enable.
TEST_CASE("live endpoint round trip" *
          doctest::skip(std::getenv("PLANGUARD_LLM_BASE_URL") == nullptr)) {
  EndpointConfig config = endpoint_from_env();
  GenerationResult result = llm_generate(config, "Reply with OK.");
  CHECK_FALSE(result.text.empty());
}

TEST_SUITE_END();
