#include "ecoagent/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ecoagent {

namespace {

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

ActionKind kind_of(const Action& action) {
  struct Visitor {
    ActionKind operator()(const Tap&) const { return ActionKind::Tap; }
    ActionKind operator()(const Swipe&) const { return ActionKind::Swipe; }
    ActionKind operator()(const LongPress&) const { return ActionKind::LongPress; }
    ActionKind operator()(const InputText&) const { return ActionKind::InputText; }
    ActionKind operator()(const DeleteText&) const { return ActionKind::DeleteText; }
    ActionKind operator()(const OpenApp&) const { return ActionKind::OpenApp; }
    ActionKind operator()(const Enter&) const { return ActionKind::Enter; }
    ActionKind operator()(const Answer&) const { return ActionKind::Answer; }
    ActionKind operator()(const PressBack&) const { return ActionKind::PressBack; }
    ActionKind operator()(const PressHome&) const { return ActionKind::PressHome; }
  };
  return std::visit(Visitor{}, action);
}

std::string_view action_kind_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::Tap: return "Tap";
    case ActionKind::Swipe: return "Swipe";
    case ActionKind::LongPress: return "LongPress";
    case ActionKind::InputText: return "InputText";
    case ActionKind::DeleteText: return "DeleteText";
    case ActionKind::OpenApp: return "OpenApp";
    case ActionKind::Enter: return "Enter";
    case ActionKind::Answer: return "Answer";
    case ActionKind::PressBack: return "PressBack";
    case ActionKind::PressHome: return "PressHome";
  }
  return "Unknown";
}

bool operator==(const Action& a, const Action& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&b](const auto& lhs) {
        using T = std::decay_t<decltype(lhs)>;
        return lhs == std::get<T>(b);
      },
      a);
}

Result<ActionKind> canonical_action_kind(std::string_view keyword) {
  if (keyword == "TAP") return ActionKind::Tap;
  if (keyword == "SWIPE") return ActionKind::Swipe;
  if (keyword == "INPUT") return ActionKind::InputText;
  if (keyword == "ENTER") return ActionKind::Enter;
  if (keyword == "ANSWER") return ActionKind::Answer;
  if (keyword == "OPEN_APP") return ActionKind::OpenApp;
  if (keyword == "DELETE") return ActionKind::DeleteText;
  if (keyword == "PRESS_BACK") return ActionKind::PressBack;
  if (keyword == "PRESS_HOME") return ActionKind::PressHome;
  return make_error(Errc::UnknownActionKeyword, std::string(keyword));
}

std::optional<std::string> extract_step_keyword(std::string_view step_text) {
  const std::string upper = to_upper(step_text);

  // Tokenize on word boundaries, joining the two-word spellings.
  std::vector<std::pair<std::string, size_t>> tokens;  // (token, offset)
  size_t i = 0;
  while (i < upper.size()) {
    if (!is_word_char(upper[i])) { ++i; continue; }
    size_t j = i;
    while (j < upper.size() && is_word_char(upper[j])) ++j;
    tokens.emplace_back(upper.substr(i, j - i), i);
    i = j;
  }

  std::vector<std::pair<std::string, size_t>> hits;
  for (size_t t = 0; t < tokens.size(); ++t) {
    const auto& [tok, off] = tokens[t];
    auto next_is = [&](std::string_view w) {
      return t + 1 < tokens.size() && tokens[t + 1].first == w;
    };
    std::string matched;
    if (tok == "OPEN_APP" || tok == "PRESS_BACK" || tok == "PRESS_HOME" ||
        tok == "TAP" || tok == "SWIPE" || tok == "INPUT" || tok == "ENTER" ||
        tok == "ANSWER" || tok == "DELETE") {
      matched = tok;
    } else if (tok == "OPEN" && next_is("APP")) {
      matched = "OPEN_APP";
    } else if (tok == "PRESS" && next_is("BACK")) {
      matched = "PRESS_BACK";
    } else if (tok == "PRESS" && next_is("HOME")) {
      matched = "PRESS_HOME";
    }
    if (!matched.empty()) hits.emplace_back(matched, off);
  }

  if (hits.empty()) return std::nullopt;
  // A leading keyword wins outright; otherwise the mention must be unique.
  if (hits.front().second == upper.find_first_not_of(" \t\r\n")) return hits.front().first;
  if (hits.size() == 1) return hits.front().first;
  return std::nullopt;
}

namespace {

bool point_in(const Screen& s, int x, int y) {
  return x >= 0 && x <= s.width_px && y >= 0 && y <= s.height_px;
}

}  // namespace

ActionValidity validate_action(const Action& action, const Screen& screen) {
  struct Visitor {
    const Screen& screen;
    ActionValidity operator()(const Tap& a) const { return check_point(a.x, a.y); }
    ActionValidity operator()(const LongPress& a) const { return check_point(a.x, a.y); }
    ActionValidity operator()(const Swipe& a) const {
      auto first = check_point(a.x1, a.y1);
      if (!first.ok) return first;
      return check_point(a.x2, a.y2);
    }
    ActionValidity operator()(const InputText& a) const {
      if (a.text.empty()) return {false, "InputText requires non-empty text"};
      return {true, {}};
    }
    ActionValidity operator()(const DeleteText&) const { return {true, {}}; }
    ActionValidity operator()(const OpenApp& a) const {
      if (a.name.empty()) return {false, "OpenApp requires an app name"};
      return {true, {}};
    }
    ActionValidity operator()(const Enter&) const { return {true, {}}; }
    ActionValidity operator()(const Answer&) const { return {true, {}}; }
    ActionValidity operator()(const PressBack&) const { return {true, {}}; }
    ActionValidity operator()(const PressHome&) const { return {true, {}}; }

    ActionValidity check_point(int x, int y) const {
      if (!point_in(screen, x, y)) {
        return {false, "coordinate (" + std::to_string(x) + "," + std::to_string(y) +
                           ") outside " + std::to_string(screen.width_px) + "x" +
                           std::to_string(screen.height_px)};
      }
      return {true, {}};
    }
  };
  return std::visit(Visitor{screen}, action);
}

std::string_view failure_class_name(FailureClass fc) {
  switch (fc) {
    case FailureClass::None: return "None";
    case FailureClass::Planning: return "Planning";
    case FailureClass::VisualGrounding: return "VisualGrounding";
    case FailureClass::MaxSteps: return "MaxSteps";
    case FailureClass::Verification: return "Verification";
  }
  return "None";
}

}  // namespace ecoagent
