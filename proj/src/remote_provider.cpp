#include "ecoagent/remote_provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ecoagent/util.hpp"

namespace ecoagent {

using nlohmann::json;

namespace {

json build_request_body(const CompletionRequest& request, const std::string& model) {
  json content = json::array();
  for (const auto& segment : request.user_segments) {
    if (const auto* text = std::get_if<TextSegment>(&segment)) {
      content.push_back(json{{"type", "text"}, {"text", text->text}});
    } else {
      const auto& image = std::get<ImageSegment>(segment);
      content.push_back(json{
          {"type", "image_url"},
          {"image_url",
           json{{"url", "data:application/octet-stream;base64," +
                            base64_encode(image.payload)}}}});
    }
  }
  json messages = json::array();
  if (!request.system.empty()) {
    messages.push_back(json{{"role", "system"}, {"content", request.system}});
  }
  messages.push_back(json{{"role", "user"}, {"content", std::move(content)}});
  json body;
  body["model"] = model;
  body["messages"] = std::move(messages);
  if (request.max_tokens > 0) body["max_tokens"] = request.max_tokens;
  return body;
}

Result<Completion> parse_response(const std::string& body_text) {
  json body = json::parse(body_text, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) {
    return make_error(Errc::MalformedProviderResponse, "response is not JSON");
  }
  if (!body.contains("choices") || !body["choices"].is_array() ||
      body["choices"].empty()) {
    return make_error(Errc::MalformedProviderResponse, "response lacks choices");
  }
  const json& message = body["choices"][0].value("message", json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    return make_error(Errc::MalformedProviderResponse, "choice lacks message content");
  }
  if (!body.contains("usage") || !body["usage"].is_object() ||
      !body["usage"].contains("prompt_tokens") ||
      !body["usage"].contains("completion_tokens")) {
    return make_error(Errc::MalformedProviderResponse, "response lacks usage counters");
  }
  Completion completion;
  completion.text = message["content"].get<std::string>();
  completion.usage.prompt_tokens = body["usage"]["prompt_tokens"].get<std::int64_t>();
  completion.usage.completion_tokens =
      body["usage"]["completion_tokens"].get<std::int64_t>();
  return completion;
}

}  // namespace

Result<Completion> RemoteProvider::complete(const CompletionRequest& request) {
  std::string secret = endpoint_.api_key;
  if (secret.empty() && !endpoint_.auth_env.empty()) {
    if (const char* env = std::getenv(endpoint_.auth_env.c_str())) secret = env;
  }

  const std::string payload = build_request_body(request, endpoint_.model).dump();

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= endpoint_.retries; ++attempt) {
    ++attempts_made_;
    httplib::Client client(endpoint_.base_url);
    client.set_connection_timeout(0, endpoint_.timeout_ms * 1000);
    client.set_read_timeout(endpoint_.timeout_ms / 1000,
                            (endpoint_.timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!secret.empty()) {
      headers.emplace(endpoint_.auth_header, endpoint_.auth_prefix + secret);
    }
    auto response = client.Post(endpoint_.path, headers, payload, "application/json");
    if (!response) {
      last_error = "transport failure: " + httplib::to_string(response.error());
      continue;
    }
    if (response->status >= 500) {
      last_error = "server error: HTTP " + std::to_string(response->status);
      continue;
    }
    if (response->status != 200) {
      return make_error(Errc::ProviderUnavailable,
                        "HTTP " + std::to_string(response->status));
    }
    auto completion = parse_response(response->body);
    if (!completion.ok()) return completion;
    completion.value().synthetic_latency_us =
        synthetic_latency_us(config_.latency, completion.value().usage);
    return completion;
  }
  return make_error(Errc::ProviderUnavailable, last_error);
}

}  // namespace ecoagent
