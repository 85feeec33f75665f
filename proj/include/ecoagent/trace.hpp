#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecoagent/domain.hpp"
#include "ecoagent/result.hpp"

namespace ecoagent::trace {

/// One episode event. Serialized as line-delimited JSON, one event per line:
/// {"seq":..,"kind":..,"t_us":..,"payload":{..}}.
struct TraceEvent {
  int seq = 0;
  std::string kind;
  std::int64_t t_us = 0;
  nlohmann::json payload;

  std::string to_line() const;
};

std::string to_jsonl(const std::vector<TraceEvent>& events);
Result<std::vector<TraceEvent>> from_jsonl(const std::string& text);

nlohmann::json action_to_json(const Action& action);
Result<Action> action_from_json(const nlohmann::json& j);

}  // namespace ecoagent::trace
