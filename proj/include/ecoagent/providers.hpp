#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ecoagent/result.hpp"

namespace ecoagent {

/// Proxy tokenizer: ceil(utf8 bytes / 4). Monotone in byte length; all token
/// figures in reports are "proxy tokens" in this unit.
std::int64_t count_tokens(std::string_view text);

// ---------------------------------------------------------------------------
// Requests and completions

struct TextSegment {
  std::string text;
};

/// payload carries what the model actually sees (for pseudo-screenshots, the
/// canonical JSON listing); declared_bytes is the raw transfer size the image
/// stands in for.
struct ImageSegment {
  std::string payload;
  std::int64_t declared_bytes = 0;
};

using Segment = std::variant<TextSegment, ImageSegment>;

struct CompletionRequest {
  std::string system;
  std::vector<Segment> user_segments;
  std::int64_t max_tokens = 0;  // 0 = provider default
};

/// Flattens system text and all segments (image payloads included) in order;
/// this is the text scripted rules match against.
std::string request_text(const CompletionRequest& request);

int image_segment_count(const CompletionRequest& request);

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct Completion {
  std::string text;
  Usage usage;
  std::int64_t synthetic_latency_us = 0;
};

// ---------------------------------------------------------------------------
// Provider contract

enum class ProviderRole { Cloud, DeviceExecutor, DeviceObserver };

struct LatencyModel {
  std::int64_t fixed_us = 0;
  std::int64_t per_token_us = 0;
};

struct ProviderConfig {
  ProviderRole role = ProviderRole::Cloud;
  LatencyModel latency;
  std::int64_t image_token_cost = 1400;
};

class Provider {
public:
  virtual ~Provider() = default;
  virtual Result<Completion> complete(const CompletionRequest& request) = 0;
  virtual const ProviderConfig& config() const = 0;
};

/// prompt_tokens for a request under the proxy tokenizer and a per-image
/// constant cost.
std::int64_t prompt_token_count(const CompletionRequest& request,
                                std::int64_t image_token_cost);

std::int64_t synthetic_latency_us(const LatencyModel& model, const Usage& usage);

// ---------------------------------------------------------------------------
// Scripted provider

/// One rule: every needle must appear in the request text, in order. An empty
/// needle list matches everything (useful as a fallback).
struct ScriptedRule {
  std::vector<std::string> match;
  std::string response;
};

bool rule_matches(const ScriptedRule& rule, std::string_view text);

/// Reads a {"rules":[{"match":...,"response":...}]} file. "match" may be a
/// single string or an ordered array of strings.
Result<std::vector<ScriptedRule>> load_scripted_rules(const std::string& path);

/// Deterministic provider backed by an ordered rule table; first matching
/// rule wins. The table is immutable once the provider is built, so a single
/// instance may serve concurrent episodes.
class ScriptedProvider : public Provider {
public:
  explicit ScriptedProvider(ProviderConfig config) : config_(config) {}
  ScriptedProvider(ProviderConfig config, std::vector<ScriptedRule> rules)
      : config_(config), rules_(std::move(rules)) {}

  size_t add_rule(ScriptedRule rule) {
    rules_.push_back(std::move(rule));
    return rules_.size() - 1;
  }
  size_t add_rule(std::string needle, std::string response) {
    return add_rule(ScriptedRule{{std::move(needle)}, std::move(response)});
  }

  Result<Completion> complete(const CompletionRequest& request) override;
  const ProviderConfig& config() const override { return config_; }

  size_t rule_count() const { return rules_.size(); }

private:
  ProviderConfig config_;
  std::vector<ScriptedRule> rules_;
};

// ---------------------------------------------------------------------------
// Wiretap

/// Counting decorator used to cross-check provider-call accounting. Thread
/// safe; wrap per episode when exact sequences matter.
class WiretapProvider : public Provider {
public:
  explicit WiretapProvider(Provider& inner) : inner_(inner) {}

  Result<Completion> complete(const CompletionRequest& request) override;
  const ProviderConfig& config() const override { return inner_.config(); }

  int calls() const;
  std::int64_t total_tokens() const;
  std::int64_t total_image_bytes() const;

private:
  Provider& inner_;
  mutable std::mutex mu_;
  int calls_ = 0;
  std::int64_t total_tokens_ = 0;
  std::int64_t total_image_bytes_ = 0;
};

}  // namespace ecoagent
