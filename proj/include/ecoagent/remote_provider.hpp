#pragma once

#include <string>

#include "ecoagent/providers.hpp"

namespace ecoagent {

struct RemoteEndpoint {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  std::string auth_env = "ECOAGENT_API_KEY";  // env var holding the secret
  std::string api_key;                        // explicit value wins over env
  int timeout_ms = 30000;
  int retries = 2;  // retries after the first attempt
};

/// JSON chat-completion client. Images travel as base64 data URLs; the
/// service's usage counters become Completion.usage. Transport failures and
/// 5xx responses are retried up to the configured bound.
class RemoteProvider : public Provider {
public:
  RemoteProvider(ProviderConfig config, RemoteEndpoint endpoint)
      : config_(config), endpoint_(std::move(endpoint)) {}

  Result<Completion> complete(const CompletionRequest& request) override;
  const ProviderConfig& config() const override { return config_; }

  int attempts_made() const { return attempts_made_; }

private:
  ProviderConfig config_;
  RemoteEndpoint endpoint_;
  int attempts_made_ = 0;
};

}  // namespace ecoagent
