#include "ecoagent/protocol.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <map>

#include <nlohmann/json.hpp>

#include "ecoagent/util.hpp"

namespace ecoagent::protocol {

using nlohmann::ordered_json;

std::string_view uplink_kind_name(UplinkKind kind) {
  switch (kind) {
    case UplinkKind::PlanRequest: return "plan_request";
    case UplinkKind::ReplanRequest: return "replan_request";
    case UplinkKind::VerifyRequest: return "verify_request";
  }
  return "plan_request";
}

std::int64_t measure_uplink(const UplinkMessage& message) {
  return static_cast<std::int64_t>(message.body.size()) + message.attached_image_bytes;
}

UplinkMessage make_uplink_message(UplinkKind kind, const std::string& task_id,
                                  const std::string& system_text,
                                  const std::string& user_text,
                                  std::int64_t attached_image_bytes) {
  ordered_json payload;
  payload["system"] = system_text;
  payload["user"] = user_text;
  ordered_json body;
  body["kind"] = std::string(uplink_kind_name(kind));
  body["task_id"] = task_id;
  body["payload"] = payload;
  return UplinkMessage{kind, body.dump(), attached_image_bytes};
}

// ---------------------------------------------------------------------------
// Section splitting

namespace {

struct Section {
  std::string label;
  std::string content;
};

/// Splits text into labeled sections. A section begins at a line whose first
/// token is "<label>:" for one of the given labels; content runs until the
/// next label line.
std::vector<Section> split_sections(std::string_view text,
                                    const std::vector<std::string>& labels) {
  std::vector<Section> sections;
  auto lines = split_lines(text);
  Section* current = nullptr;
  for (const auto& line : lines) {
    std::string_view stripped = trim(line);
    bool matched = false;
    for (const auto& label : labels) {
      if (stripped.size() >= label.size() + 1 &&
          stripped.substr(0, label.size()) == label &&
          stripped[label.size()] == ':') {
        sections.push_back({label, std::string(stripped.substr(label.size() + 1))});
        current = &sections.back();
        matched = true;
        break;
      }
    }
    if (!matched && current != nullptr) {
      current->content += '\n';
      current->content += line;
    }
  }
  for (auto& s : sections) s.content = std::string(trim(s.content));
  return sections;
}

const std::string* find_section(const std::vector<Section>& sections,
                                std::string_view label) {
  for (const auto& s : sections) {
    if (s.label == label) return &s.content;
  }
  return nullptr;
}

/// Pulls the JSON body out of a Plan section: either between ``` fences
/// (any info-string spelling) or the raw remainder.
std::string strip_plan_fences(std::string_view content) {
  std::string_view s = trim(content);
  size_t open = s.find("```");
  if (open == std::string_view::npos) return std::string(s);
  size_t body_start = s.find('\n', open);
  if (body_start == std::string_view::npos) {
    // fence with no newline, e.g. "```{...}```"
    body_start = open + 3;
    // skip an info string like JSON/json glued to the fence
    while (body_start < s.size() && std::isalpha(static_cast<unsigned char>(s[body_start]))) {
      ++body_start;
    }
  }
  size_t close = s.find("```", body_start);
  if (close == std::string_view::npos) return std::string(trim(s.substr(body_start)));
  return std::string(trim(s.substr(body_start, close - body_start)));
}

Result<Plan> parse_plan_json(std::string_view json_text) {
  ordered_json doc = ordered_json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::MalformedPlanJson, "plan is not a JSON object");
  }
  if (doc.empty()) return make_error(Errc::EmptyPlan, "plan JSON has no steps");

  std::map<int, ordered_json> by_index;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key.size() <= 4 || key.substr(0, 4) != "Step") {
      return make_error(Errc::MalformedPlanJson, "unexpected key '" + key + "'");
    }
    int index = 0;
    auto digits = key.substr(4);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || index < 1) {
      return make_error(Errc::MalformedPlanJson, "unexpected key '" + key + "'");
    }
    if (!by_index.emplace(index, it.value()).second) {
      return make_error(Errc::MalformedPlanJson, "duplicate key '" + key + "'");
    }
  }

  Plan plan;
  int expected = 1;
  for (const auto& [index, step_json] : by_index) {
    if (index != expected) return make_error(Errc::StepKeyGap, std::to_string(expected));
    ++expected;
    if (!step_json.is_object()) {
      return make_error(Errc::MalformedPlanJson,
                        "Step" + std::to_string(index) + " is not an object");
    }
    PlanStep step;
    step.index = index;
    if (auto it = step_json.find("thought"); it != step_json.end() && it->is_string()) {
      step.thought = it->get<std::string>();
    }
    auto get_required = [&](const char* field, std::string& out) -> bool {
      auto it = step_json.find(field);
      if (it == step_json.end() || !it->is_string()) return false;
      out = it->get<std::string>();
      return !out.empty();
    };
    if (!get_required("step", step.step)) {
      return make_error(Errc::MalformedPlanJson,
                        "Step" + std::to_string(index) + " lacks a non-empty 'step'");
    }
    if (!get_required("expectation", step.expectation)) {
      return make_error(Errc::MalformedPlanJson,
                        "Step" + std::to_string(index) + " lacks a non-empty 'expectation'");
    }
    plan.steps.push_back(std::move(step));
  }
  if (plan.steps.empty()) return make_error(Errc::EmptyPlan, "plan JSON has no steps");
  return plan;
}

}  // namespace

Result<PlannerResponse> parse_planner_response(std::string_view text) {
  auto sections = split_sections(text, {"Description", "Thought", "Plan"});
  const std::string* description = find_section(sections, "Description");
  const std::string* thought = find_section(sections, "Thought");
  const std::string* plan_text = find_section(sections, "Plan");
  if (description == nullptr) return make_error(Errc::MissingSection, "Description");
  if (thought == nullptr) return make_error(Errc::MissingSection, "Thought");
  if (plan_text == nullptr) return make_error(Errc::MissingSection, "Plan");

  auto plan = parse_plan_json(strip_plan_fences(*plan_text));
  if (!plan.ok()) return plan.error();

  PlannerResponse out;
  out.description = *description;
  out.thought = *thought;
  out.plan = std::move(plan.value());
  out.plan.revision = 0;
  out.plan.source_description = out.description;
  return out;
}

namespace {

bool is_quote_char(char c) { return c == '\'' || c == '"' || c == '`'; }

bool matches_sentinel(std::string_view text) {
  constexpr std::string_view kSentinel = "No need to replan.";
  std::string_view t = trim(text);
  if (t == kSentinel) return true;
  if (t.size() == kSentinel.size() + 2 && is_quote_char(t.front()) &&
      is_quote_char(t.back()) && t.substr(1, kSentinel.size()) == kSentinel) {
    return true;
  }
  return false;
}

}  // namespace

Result<ReplanOutcome> parse_replanner_response(std::string_view text) {
  if (matches_sentinel(text)) return ReplanOutcome{NoReplanNeeded{}};

  auto sections = split_sections(text, {"Reflection", "Plan"});
  const std::string* reflection = find_section(sections, "Reflection");
  const std::string* plan_text = find_section(sections, "Plan");
  if (reflection == nullptr) return make_error(Errc::MissingSection, "Reflection");
  if (plan_text == nullptr) return make_error(Errc::MissingSection, "Plan");

  auto plan = parse_plan_json(strip_plan_fences(*plan_text));
  if (!plan.ok()) return plan.error();

  NewPlan out;
  out.reflection = *reflection;
  out.plan = std::move(plan.value());
  return ReplanOutcome{std::move(out)};
}

// ---------------------------------------------------------------------------
// Action grammar

namespace {

class ActionScanner {
public:
  explicit ActionScanner(std::string_view text) : s_(text) {}

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool read_identifier(std::string& out) {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) return false;
    out.assign(s_.substr(start, pos_ - start));
    return true;
  }

  bool read_int(int& out) {
    skip_ws();
    size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start || (pos_ == start + 1 && s_[start] == '-')) return false;
    auto sub = s_.substr(start, pos_ - start);
    auto [ptr, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), out);
    return ec == std::errc() && ptr == sub.data() + sub.size();
  }

  bool read_string(std::string& out) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '"') return false;
    ++pos_;
    out.clear();
    while (pos_ < s_.size()) {
      char c = s_[pos_++];
      if (c == '"') return true;
      if (c == '\\') {
        if (pos_ >= s_.size()) return false;
        char esc = s_[pos_++];
        switch (esc) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default: return false;
        }
      } else {
        out.push_back(c);
      }
    }
    return false;  // unterminated
  }

private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

std::string escape_string_arg(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out.push_back('"');
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace

Result<Action> parse_action(std::string_view text) {
  auto fail = [&]() -> Error {
    std::string snippet(trim(text).substr(0, 80));
    return make_error(Errc::UnparseableAction, snippet);
  };

  ActionScanner scan(text);
  std::string kind;
  if (!scan.read_identifier(kind)) return fail();
  if (!scan.consume('(')) return fail();

  auto finish = [&](Action action) -> Result<Action> {
    if (!scan.consume(')')) return fail();
    if (!scan.at_end()) return fail();
    return action;
  };

  auto read_points = [&](int count, std::array<int, 4>& vals) {
    for (int i = 0; i < count; ++i) {
      if (i > 0 && !scan.consume(',')) return false;
      if (!scan.read_int(vals[static_cast<size_t>(i)])) return false;
    }
    return true;
  };

  std::array<int, 4> v{};
  if (kind == "TAP") {
    if (!read_points(2, v)) return fail();
    return finish(Tap{v[0], v[1]});
  }
  if (kind == "SWIPE") {
    if (!read_points(4, v)) return fail();
    return finish(Swipe{v[0], v[1], v[2], v[3]});
  }
  if (kind == "LONG_PRESS") {
    if (!read_points(2, v)) return fail();
    return finish(LongPress{v[0], v[1]});
  }
  if (kind == "INPUT_TEXT") {
    std::string arg;
    if (!scan.read_string(arg)) return fail();
    return finish(InputText{std::move(arg)});
  }
  if (kind == "DELETE_TEXT") return finish(DeleteText{});
  if (kind == "OPEN_APP") {
    std::string arg;
    if (!scan.read_string(arg)) return fail();
    return finish(OpenApp{std::move(arg)});
  }
  if (kind == "ENTER") return finish(Enter{});
  if (kind == "ANSWER") {
    std::string arg;
    if (!scan.read_string(arg)) return fail();
    return finish(Answer{std::move(arg)});
  }
  if (kind == "PRESS_BACK") return finish(PressBack{});
  if (kind == "PRESS_HOME") return finish(PressHome{});
  return fail();
}

std::string render_action(const Action& action) {
  struct Visitor {
    std::string operator()(const Tap& a) const {
      return "TAP(" + std::to_string(a.x) + "," + std::to_string(a.y) + ")";
    }
    std::string operator()(const Swipe& a) const {
      return "SWIPE(" + std::to_string(a.x1) + "," + std::to_string(a.y1) + "," +
             std::to_string(a.x2) + "," + std::to_string(a.y2) + ")";
    }
    std::string operator()(const LongPress& a) const {
      return "LONG_PRESS(" + std::to_string(a.x) + "," + std::to_string(a.y) + ")";
    }
    std::string operator()(const InputText& a) const {
      return "INPUT_TEXT(" + escape_string_arg(a.text) + ")";
    }
    std::string operator()(const DeleteText&) const { return "DELETE_TEXT()"; }
    std::string operator()(const OpenApp& a) const {
      return "OPEN_APP(" + escape_string_arg(a.name) + ")";
    }
    std::string operator()(const Enter&) const { return "ENTER()"; }
    std::string operator()(const Answer& a) const {
      return "ANSWER(" + escape_string_arg(a.text) + ")";
    }
    std::string operator()(const PressBack&) const { return "PRESS_BACK()"; }
    std::string operator()(const PressHome&) const { return "PRESS_HOME()"; }
  };
  return std::visit(Visitor{}, action);
}

Result<VerificationResult> parse_verdict(std::string_view text) {
  std::string_view t = trim(text);
  size_t eol = t.find('\n');
  std::string_view first_line = eol == std::string_view::npos ? t : t.substr(0, eol);

  auto word_boundary_after = [&](size_t len) {
    return first_line.size() == len ||
           !std::isalpha(static_cast<unsigned char>(first_line[len]));
  };

  if (starts_with_icase(first_line, "Pass") && word_boundary_after(4)) {
    return VerificationResult{Verdict::Pass, {}};
  }
  if (starts_with_icase(first_line, "Fail") && word_boundary_after(4)) {
    std::string_view rest = trim(t.substr(4));
    if (!rest.empty() && rest.front() == ':') rest = trim(rest.substr(1));
    std::string summary(rest);
    if (summary.empty()) summary = "(no failure reason given)";
    return VerificationResult{Verdict::Fail, std::move(summary)};
  }
  return make_error(Errc::UnparseableVerdict, std::string(t.substr(0, 80)));
}

}  // namespace ecoagent::protocol
