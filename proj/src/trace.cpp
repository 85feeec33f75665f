#include "ecoagent/trace.hpp"

#include "ecoagent/protocol.hpp"
#include "ecoagent/util.hpp"

namespace ecoagent::trace {

using nlohmann::json;

std::string TraceEvent::to_line() const {
  json j;
  j["kind"] = kind;
  j["payload"] = payload;
  j["seq"] = seq;
  j["t_us"] = t_us;
  return j.dump();
}

std::string to_jsonl(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const auto& event : events) {
    out += event.to_line();
    out.push_back('\n');
  }
  return out;
}

Result<std::vector<TraceEvent>> from_jsonl(const std::string& text) {
  std::vector<TraceEvent> events;
  int line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      return make_error(Errc::TraceInvalid,
                        "line " + std::to_string(line_no) + " is not a JSON object");
    }
    TraceEvent event;
    event.seq = j.value("seq", 0);
    event.kind = j.value("kind", std::string{});
    event.t_us = j.value("t_us", std::int64_t{0});
    event.payload = j.value("payload", json::object());
    if (event.kind.empty()) {
      return make_error(Errc::TraceInvalid,
                        "line " + std::to_string(line_no) + " lacks a kind");
    }
    events.push_back(std::move(event));
  }
  if (events.empty()) return make_error(Errc::TraceInvalid, "trace is empty");
  return events;
}

json action_to_json(const Action& action) {
  // The canonical text grammar is the single source of truth for action
  // serialization; traces embed it rather than a second schema.
  json j;
  j["call"] = protocol::render_action(action);
  return j;
}

Result<Action> action_from_json(const json& j) {
  if (!j.is_object() || !j.contains("call") || !j["call"].is_string()) {
    return make_error(Errc::TraceInvalid, "action payload lacks 'call'");
  }
  auto action = protocol::parse_action(j["call"].get<std::string>());
  if (!action.ok()) return make_error(Errc::TraceInvalid, action.error().to_string());
  return action;
}

}  // namespace ecoagent::trace
