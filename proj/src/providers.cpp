#include "ecoagent/providers.hpp"

#include <nlohmann/json.hpp>

#include "ecoagent/util.hpp"

namespace ecoagent {

std::int64_t count_tokens(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::string request_text(const CompletionRequest& request) {
  std::string out = request.system;
  for (const auto& segment : request.user_segments) {
    out.push_back('\n');
    if (const auto* text = std::get_if<TextSegment>(&segment)) {
      out += text->text;
    } else {
      out += std::get<ImageSegment>(segment).payload;
    }
  }
  return out;
}

int image_segment_count(const CompletionRequest& request) {
  int n = 0;
  for (const auto& segment : request.user_segments) {
    if (std::holds_alternative<ImageSegment>(segment)) ++n;
  }
  return n;
}

std::int64_t prompt_token_count(const CompletionRequest& request,
                                std::int64_t image_token_cost) {
  std::int64_t tokens = count_tokens(request.system);
  for (const auto& segment : request.user_segments) {
    if (const auto* text = std::get_if<TextSegment>(&segment)) {
      tokens += count_tokens(text->text);
    } else {
      tokens += image_token_cost;
    }
  }
  return tokens;
}

std::int64_t synthetic_latency_us(const LatencyModel& model, const Usage& usage) {
  return model.fixed_us +
         model.per_token_us * (usage.prompt_tokens + usage.completion_tokens);
}

Result<std::vector<ScriptedRule>> load_scripted_rules(const std::string& path) {
  auto text = read_file(path);
  if (!text.has_value()) {
    return make_error(Errc::ConfigInvalid, "cannot read rules file '" + path + "'");
  }
  auto doc = nlohmann::json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("rules") ||
      !doc["rules"].is_array()) {
    return make_error(Errc::ConfigInvalid,
                      "rules file '" + path + "' must be {\"rules\": [...]}");
  }
  std::vector<ScriptedRule> rules;
  for (const auto& jr : doc["rules"]) {
    if (!jr.is_object() || !jr.contains("response") || !jr["response"].is_string()) {
      return make_error(Errc::ConfigInvalid,
                        "rule lacks a string 'response' in " + path);
    }
    ScriptedRule rule;
    if (jr.contains("match")) {
      if (jr["match"].is_string()) {
        rule.match.push_back(jr["match"].get<std::string>());
      } else if (jr["match"].is_array()) {
        for (const auto& needle : jr["match"]) {
          if (!needle.is_string()) {
            return make_error(Errc::ConfigInvalid,
                              "rule 'match' entries must be strings in " + path);
          }
          rule.match.push_back(needle.get<std::string>());
        }
      } else {
        return make_error(Errc::ConfigInvalid,
                          "rule 'match' must be a string or array in " + path);
      }
    }
    rule.response = jr["response"].get<std::string>();
    rules.push_back(std::move(rule));
  }
  return rules;
}

bool rule_matches(const ScriptedRule& rule, std::string_view text) {
  size_t pos = 0;
  for (const auto& needle : rule.match) {
    if (needle.empty()) continue;
    size_t found = text.find(needle, pos);
    if (found == std::string_view::npos) return false;
    pos = found + needle.size();
  }
  return true;
}

Result<Completion> ScriptedProvider::complete(const CompletionRequest& request) {
  const std::string text = request_text(request);
  for (const auto& rule : rules_) {
    if (!rule_matches(rule, text)) continue;
    Completion completion;
    completion.text = rule.response;
    completion.usage.prompt_tokens = prompt_token_count(request, config_.image_token_cost);
    completion.usage.completion_tokens = count_tokens(rule.response);
    completion.synthetic_latency_us = synthetic_latency_us(config_.latency, completion.usage);
    return completion;
  }
  return make_error(Errc::RuleMiss, "no scripted rule matched request");
}

Result<Completion> WiretapProvider::complete(const CompletionRequest& request) {
  auto result = inner_.complete(request);
  std::lock_guard<std::mutex> lock(mu_);
  ++calls_;
  if (result.ok()) {
    total_tokens_ += result.value().usage.prompt_tokens +
                     result.value().usage.completion_tokens;
  }
  for (const auto& segment : request.user_segments) {
    if (const auto* image = std::get_if<ImageSegment>(&segment)) {
      total_image_bytes_ += image->declared_bytes;
    }
  }
  return result;
}

int WiretapProvider::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

std::int64_t WiretapProvider::total_tokens() const {
  std::lock_guard<std::mutex> lock(mu_);
  return total_tokens_;
}

std::int64_t WiretapProvider::total_image_bytes() const {
  std::lock_guard<std::mutex> lock(mu_);
  return total_image_bytes_;
}

}  // namespace ecoagent
