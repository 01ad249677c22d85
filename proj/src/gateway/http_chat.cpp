#include <cmath>
#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "spio/error.hpp"
#include "spio/gateway.hpp"

namespace spio {

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) fail(ErrorCode::kConfigError, "invalid endpoint URL '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

class HttplibTransport final : public HttpTransport {
 public:
  HttpReply post(const std::string& url, const std::map<std::string, std::string>& headers,
                 const std::string& body, double timeout_s) override {
    const auto parts = split_url(url);
    httplib::Client client(parts.base);
    const auto secs = static_cast<time_t>(timeout_s);
    const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto result = client.Post(parts.path, h, body, "application/json");
    if (!result) throw TransportError(httplib::to_string(result.error()));
    return {result->status, result->body};
  }
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

std::string chat_payload(const GenerationRequest& request, const ProviderConfig& provider) {
  nlohmann::ordered_json body;
  body["model"] = provider.model_name;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;
  body["max_tokens"] = request.max_tokens;
  return body.dump();
}

GenerationResponse Gateway::http_chat(const GenerationRequest& request) {
  if (!transport_) fail(ErrorCode::kConfigError, "http_chat provider has no transport");
  std::map<std::string, std::string> headers{{"Content-Type", "application/json"}};
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const std::string payload = chat_payload(request, config_);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(std::chrono::duration<double>(config_.backoff_initial_s * std::pow(2.0, attempt - 1)));
    }
    HttpReply reply;
    try {
      reply = transport_->post(config_.endpoint, headers, payload, config_.request_timeout_s);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    if (reply.status == 429 || reply.status >= 500) {
      last_error = "HTTP " + std::to_string(reply.status);
      continue;
    }
    if (reply.status < 200 || reply.status >= 300) {
      fail(ErrorCode::kProviderUnreachable,
           "HTTP " + std::to_string(reply.status) + " for step " + request.step_label);
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(reply.body);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kProviderRefusal, std::string("unparseable provider reply: ") + e.what());
    }
    GenerationResponse response;
    const auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty()) {
      fail(ErrorCode::kProviderRefusal, "provider reply has no choices for step " + request.step_label);
    }
    const auto& choice = choices->front();
    if (choice.value("finish_reason", std::string{}) == "content_filter") {
      fail(ErrorCode::kProviderRefusal, "output blocked by provider for step " + request.step_label);
    }
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      response.text = choice["message"]["content"].get<std::string>();
    }
    const auto usage = doc.find("usage");
    if (usage != doc.end() && usage->is_object()) {
      response.input_tokens = usage->value("prompt_tokens", estimate_tokens(request.prompt));
      response.output_tokens = usage->value("completion_tokens", estimate_tokens(response.text));
    } else {
      response.input_tokens = estimate_tokens(request.prompt);
      response.output_tokens = estimate_tokens(response.text);
    }
    return response;
  }
  fail(ErrorCode::kProviderUnreachable, config_.endpoint + " after " +
                                            std::to_string(config_.max_retries + 1) +
                                            " tries: " + last_error);
}

}  // namespace spio
