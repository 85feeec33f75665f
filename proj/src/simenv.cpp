#include "ecoagent/simenv.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <random>
#include <sstream>

#include "ecoagent/util.hpp"

namespace ecoagent::sim {

using nlohmann::json;

std::string_view role_name(Role role) {
  switch (role) {
    case Role::Button: return "button";
    case Role::Field: return "field";
    case Role::ListItem: return "list_item";
    case Role::Icon: return "icon";
  }
  return "button";
}

namespace {

Result<Role> parse_role(const std::string& s) {
  if (s == "button") return Role::Button;
  if (s == "field") return Role::Field;
  if (s == "list_item") return Role::ListItem;
  if (s == "icon") return Role::Icon;
  return make_error(Errc::FixtureInvalid, "unknown element role '" + s + "'");
}

Result<TriggerKind> parse_trigger_kind(const std::string& s) {
  if (s == "tap") return TriggerKind::Tap;
  if (s == "long_press") return TriggerKind::LongPress;
  if (s == "swipe") return TriggerKind::Swipe;
  if (s == "enter") return TriggerKind::Enter;
  return make_error(Errc::FixtureInvalid, "unknown transition trigger '" + s + "'");
}

/// "a.b.c" -> json pointer /a/b/c
json::json_pointer to_pointer(const std::string& dotted) {
  std::string p;
  p.push_back('/');
  for (char c : dotted) {
    p.push_back(c == '.' ? '/' : c);
  }
  return json::json_pointer(p);
}

/// Replaces each "$field:<id>" token with the field's current content.
std::string substitute_fields(const std::string& tmpl, const WorldState& state) {
  std::string out;
  size_t i = 0;
  constexpr std::string_view kToken = "$field:";
  while (i < tmpl.size()) {
    if (tmpl.compare(i, kToken.size(), kToken) == 0) {
      size_t j = i + kToken.size();
      size_t start = j;
      while (j < tmpl.size() &&
             (std::isalnum(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) {
        ++j;
      }
      std::string id = tmpl.substr(start, j - start);
      auto it = state.field_contents.find(id);
      if (it != state.field_contents.end()) out += it->second;
      i = j;
    } else {
      out.push_back(tmpl[i++]);
    }
  }
  return out;
}

json substitute_value(const json& value, const WorldState& state) {
  if (value.is_string()) return substitute_fields(value.get<std::string>(), state);
  return value;
}

}  // namespace

const ScreenNode* WorldFixture::find_screen(const std::string& id) const {
  for (const auto& s : screens) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const Task* WorldFixture::find_task(const std::string& task_id) const {
  for (const auto& t : tasks) {
    if (t.task_id == task_id) return &t;
  }
  return nullptr;
}

const std::string& WorldFixture::home_screen_id() const {
  static const std::string empty;
  for (const auto& s : screens) {
    if (s.home) return s.id;
  }
  return empty;
}

// ---------------------------------------------------------------------------
// Fixture parsing

namespace {

Result<Predicate> parse_predicate(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    return make_error(Errc::FixtureInvalid, where + ": predicate needs a string 'kind'");
  }
  Predicate p;
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "list_contains") {
    p.kind = Predicate::Kind::ListContains;
    if (!j.contains("path") || !j.contains("entry") || !j["entry"].is_object()) {
      return make_error(Errc::FixtureInvalid, where + ": list_contains needs path and entry");
    }
    p.path = j["path"].get<std::string>();
    for (auto it = j["entry"].begin(); it != j["entry"].end(); ++it) {
      p.entry[it.key()] = it.value();
    }
  } else if (kind == "equals") {
    p.kind = Predicate::Kind::Equals;
    if (!j.contains("path") || !j.contains("value")) {
      return make_error(Errc::FixtureInvalid, where + ": equals needs path and value");
    }
    p.path = j["path"].get<std::string>();
    p.value = j["value"];
  } else if (kind == "answer_equals") {
    p.kind = Predicate::Kind::AnswerEquals;
    if (!j.contains("value") || !j["value"].is_string()) {
      return make_error(Errc::FixtureInvalid, where + ": answer_equals needs a string value");
    }
    p.value = j["value"];
  } else if (kind == "all") {
    p.kind = Predicate::Kind::All;
    if (!j.contains("of") || !j["of"].is_array() || j["of"].empty()) {
      return make_error(Errc::FixtureInvalid, where + ": all needs a non-empty 'of' array");
    }
    for (const auto& child : j["of"]) {
      auto sub = parse_predicate(child, where);
      if (!sub.ok()) return sub.error();
      p.children.push_back(std::move(sub.value()));
    }
  } else {
    return make_error(Errc::FixtureInvalid, where + ": unknown predicate kind '" + kind + "'");
  }
  return p;
}

Result<Effect> parse_effect(const json& j, const std::string& where) {
  if (!j.is_object() || j.size() != 1) {
    return make_error(Errc::FixtureInvalid, where + ": effect must be a single-key object");
  }
  Effect e;
  auto it = j.begin();
  const std::string op = it.key();
  const json& body = it.value();
  auto need = [&](const char* field) -> Result<json> {
    if (!body.is_object() || !body.contains(field)) {
      return make_error(Errc::FixtureInvalid,
                        where + ": effect '" + op + "' needs '" + field + "'");
    }
    return body[field];
  };
  if (op == "set_field") {
    e.op = Effect::Op::SetField;
    auto el = need("element"); if (!el.ok()) return el.error();
    auto val = need("value"); if (!val.ok()) return val.error();
    e.element = el.value().get<std::string>();
    e.value = val.value();
  } else if (op == "clear_field") {
    e.op = Effect::Op::ClearField;
    auto el = need("element"); if (!el.ok()) return el.error();
    e.element = el.value().get<std::string>();
  } else if (op == "set_element_state") {
    e.op = Effect::Op::SetElementState;
    auto el = need("element"); if (!el.ok()) return el.error();
    auto val = need("value"); if (!val.ok()) return val.error();
    e.element = el.value().get<std::string>();
    e.value = val.value();
  } else if (op == "set_data") {
    e.op = Effect::Op::SetData;
    auto path = need("path"); if (!path.ok()) return path.error();
    auto val = need("value"); if (!val.ok()) return val.error();
    e.path = path.value().get<std::string>();
    e.value = val.value();
  } else if (op == "append_record") {
    e.op = Effect::Op::AppendRecord;
    auto path = need("path"); if (!path.ok()) return path.error();
    auto rec = need("record"); if (!rec.ok()) return rec.error();
    e.path = path.value().get<std::string>();
    if (!rec.value().is_object()) {
      return make_error(Errc::FixtureInvalid, where + ": append_record 'record' must be object");
    }
    for (auto rit = rec.value().begin(); rit != rec.value().end(); ++rit) {
      if (!rit.value().is_string()) {
        return make_error(Errc::FixtureInvalid,
                          where + ": append_record values must be strings");
      }
      e.record[rit.key()] = rit.value().get<std::string>();
    }
  } else {
    return make_error(Errc::FixtureInvalid, where + ": unknown effect '" + op + "'");
  }
  return e;
}

}  // namespace

Result<WorldFixture> parse_fixture(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    return make_error(Errc::FixtureInvalid, e.what());
  }
  if (!doc.is_object()) return make_error(Errc::FixtureInvalid, "fixture root must be an object");

  WorldFixture f;
  try {
    f.name = doc.value("name", std::string{});
    if (doc.contains("resolution")) {
      f.width_px = doc["resolution"].value("width_px", 1080);
      f.height_px = doc["resolution"].value("height_px", 2400);
    }
    f.screenshot_bytes = doc.value("screenshot_bytes", std::int64_t{100000});

    if (doc.contains("apps")) {
      for (auto it = doc["apps"].begin(); it != doc["apps"].end(); ++it) {
        f.apps[it.key()] = it.value().value("entry_screen", std::string{});
      }
    }

    for (const auto& js : doc.value("screens", json::array())) {
      ScreenNode node;
      node.id = js.value("id", std::string{});
      node.home = js.value("home", false);
      for (const auto& je : js.value("elements", json::array())) {
        Element el;
        el.id = je.value("id", std::string{});
        el.label = je.value("label", std::string{});
        auto role = parse_role(je.value("role", std::string{"button"}));
        if (!role.ok()) return role.error();
        el.role = role.value();
        auto jb = je.value("bounds", json::array());
        if (!jb.is_array() || jb.size() != 4) {
          return make_error(Errc::FixtureInvalid,
                            "element '" + el.id + "' bounds must be [x1,y1,x2,y2]");
        }
        el.bounds = Bounds{jb[0].get<int>(), jb[1].get<int>(), jb[2].get<int>(),
                           jb[3].get<int>()};
        el.state = je.value("state", std::string{});
        node.elements.push_back(std::move(el));
      }
      f.screens.push_back(std::move(node));
    }

    for (const auto& jt : doc.value("transitions", json::array())) {
      Transition t;
      t.screen = jt.value("screen", std::string{});
      t.element = jt.value("element", std::string{});
      auto on = parse_trigger_kind(jt.value("on", std::string{"tap"}));
      if (!on.ok()) return on.error();
      t.on = on.value();
      t.target = jt.value("target", std::string{});
      for (const auto& je : jt.value("effects", json::array())) {
        auto eff = parse_effect(je, "transition " + t.screen + "/" + t.element);
        if (!eff.ok()) return eff.error();
        t.effects.push_back(std::move(eff.value()));
      }
      f.transitions.push_back(std::move(t));
    }

    for (const auto& jp : doc.value("popups", json::array())) {
      Popup p;
      p.id = jp.value("id", std::string{});
      const auto& jtr = jp.value("trigger", json::object());
      const std::string kind = jtr.value("kind", std::string{});
      if (kind == "step_count") {
        p.trigger.kind = PopupTrigger::Kind::StepCount;
        p.trigger.at_step = jtr.value("at", 0);
      } else if (kind == "screen_entry") {
        p.trigger.kind = PopupTrigger::Kind::ScreenEntry;
        p.trigger.screen = jtr.value("screen", std::string{});
      } else if (kind == "random_step") {
        p.trigger.kind = PopupTrigger::Kind::RandomStep;
        p.trigger.min_step = jtr.value("min", 1);
        p.trigger.max_step = jtr.value("max", 1);
      } else {
        return make_error(Errc::FixtureInvalid,
                          "popup '" + p.id + "' has unknown trigger kind '" + kind + "'");
      }
      p.overlay_screen = jp.value("overlay_screen", std::string{});
      p.dismiss_element = jp.value("dismiss_element", std::string{});
      p.max_fires = jp.value("max_fires", 1);
      for (const auto& jt : jp.value("only_for_tasks", json::array())) {
        p.only_for_tasks.push_back(jt.get<std::string>());
      }
      f.popups.push_back(std::move(p));
    }

    for (const auto& jt : doc.value("tasks", json::array())) {
      Task t;
      t.task_id = jt.value("task_id", std::string{});
      t.instruction = jt.value("instruction", std::string{});
      if (!jt.contains("success")) {
        return make_error(Errc::FixtureInvalid, "task '" + t.task_id + "' lacks success predicate");
      }
      auto pred = parse_predicate(jt["success"], "task '" + t.task_id + "'");
      if (!pred.ok()) return pred.error();
      t.success = std::move(pred.value());
      f.tasks.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    return make_error(Errc::FixtureInvalid, e.what());
  }

  return f;
}

Result<WorldFixture> load_fixture(const std::string& path) {
  auto text = read_file(path);
  if (!text.has_value()) {
    return make_error(Errc::FixtureInvalid, "cannot read fixture file '" + path + "'");
  }
  auto fixture = parse_fixture(*text);
  if (!fixture.ok()) return fixture.error();
  // Structural invariants are part of loading; reachability stays separate
  // because it is comparatively expensive.
  auto& f = fixture.value();
  auto structural = validate_fixture(f, /*max_depth=*/0);
  if (!structural.ok()) return structural.error();
  return std::move(f);
}

// ---------------------------------------------------------------------------
// State

std::string WorldState::canonical_json() const {
  json j;
  j["answered"] = answered;
  j["app_data"] = app_data;
  j["current_screen"] = current_screen_id;
  j["element_states"] = element_states;
  j["field_contents"] = field_contents;
  j["focused_element"] = focused_element;
  j["last_answer"] = last_answer;
  j["popup_active"] = popup_active.has_value() ? json(*popup_active) : json(nullptr);
  j["popup_fires"] = popup_fires;
  j["screen_stack"] = screen_stack;
  j["step_counter"] = step_counter;
  return j.dump();
}

WorldState reset(const WorldFixture& fixture, std::uint64_t seed,
                 const std::string& task_id) {
  WorldState s;
  s.current_screen_id = fixture.home_screen_id();
  s.active_task = task_id;
  s.app_data = json::object();
  for (const auto& popup : fixture.popups) {
    if (popup.trigger.kind == PopupTrigger::Kind::RandomStep) {
      std::mt19937_64 rng(seed ^ fnv1a64(popup.id));
      std::uniform_int_distribution<int> dist(popup.trigger.min_step,
                                              popup.trigger.max_step);
      s.popup_random_step[popup.id] = dist(rng);
    }
  }
  return s;
}

namespace {

const Popup* find_popup(const WorldFixture& fixture, const std::string& id) {
  for (const auto& p : fixture.popups) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

bool popup_applies_to_task(const Popup& popup, const std::string& task_id) {
  if (popup.only_for_tasks.empty()) return true;
  return std::find(popup.only_for_tasks.begin(), popup.only_for_tasks.end(), task_id) !=
         popup.only_for_tasks.end();
}

const Element* find_element(const ScreenNode& screen, const std::string& id) {
  for (const auto& el : screen.elements) {
    if (el.id == id) return &el;
  }
  return nullptr;
}

/// Topmost = latest in the element list.
const Element* hit_test(const ScreenNode& screen, int x, int y) {
  const Element* hit = nullptr;
  for (const auto& el : screen.elements) {
    if (el.bounds.contains(x, y)) hit = &el;
  }
  return hit;
}

const Transition* find_transition(const WorldFixture& fixture, const std::string& screen,
                                  const std::string& element, TriggerKind on) {
  for (const auto& t : fixture.transitions) {
    if (t.screen == screen && t.element == element && t.on == on) return &t;
  }
  return nullptr;
}

void apply_effect(const Effect& effect, WorldState& s) {
  switch (effect.op) {
    case Effect::Op::SetField:
      s.field_contents[effect.element] =
          substitute_fields(effect.value.get<std::string>(), s);
      break;
    case Effect::Op::ClearField:
      s.field_contents[effect.element] = "";
      break;
    case Effect::Op::SetElementState:
      s.element_states[effect.element] = effect.value.get<std::string>();
      break;
    case Effect::Op::SetData:
      s.app_data[to_pointer(effect.path)] = substitute_value(effect.value, s);
      break;
    case Effect::Op::AppendRecord: {
      json record = json::object();
      for (const auto& [key, tmpl] : effect.record) {
        record[key] = substitute_fields(tmpl, s);
      }
      auto ptr = to_pointer(effect.path);
      if (!s.app_data.contains(ptr) || !s.app_data[ptr].is_array()) {
        s.app_data[ptr] = json::array();
      }
      s.app_data[ptr].push_back(std::move(record));
      break;
    }
  }
}

struct StepContext {
  bool entered_screen = false;
  std::string entered_id;
};

void navigate(WorldState& s, const std::string& target, StepContext& ctx,
              bool push_stack) {
  if (target.empty() || target == s.current_screen_id) return;
  if (push_stack) s.screen_stack.push_back(s.current_screen_id);
  s.current_screen_id = target;
  s.focused_element.clear();
  ctx.entered_screen = true;
  ctx.entered_id = target;
}

void fire_transition(const WorldFixture&, const Transition& t, WorldState& s,
                     StepContext& ctx) {
  for (const auto& effect : t.effects) apply_effect(effect, s);
  navigate(s, t.target, ctx, /*push_stack=*/true);
}

/// Runs the popup schedule once the action itself has been applied.
void evaluate_popups(const WorldFixture& fixture, WorldState& s, const StepContext& ctx) {
  if (s.popup_active.has_value()) return;
  for (const auto& popup : fixture.popups) {
    if (!popup_applies_to_task(popup, s.active_task)) continue;
    if (s.popup_fires[popup.id] >= popup.max_fires) continue;
    bool fire = false;
    switch (popup.trigger.kind) {
      case PopupTrigger::Kind::StepCount:
        fire = s.step_counter >= popup.trigger.at_step;
        break;
      case PopupTrigger::Kind::ScreenEntry:
        fire = ctx.entered_screen && ctx.entered_id == popup.trigger.screen;
        break;
      case PopupTrigger::Kind::RandomStep: {
        auto it = s.popup_random_step.find(popup.id);
        fire = it != s.popup_random_step.end() && s.step_counter >= it->second;
        break;
      }
    }
    if (fire) {
      s.popup_active = popup.id;
      ++s.popup_fires[popup.id];
      break;  // one overlay at a time
    }
  }
}

}  // namespace

Screen current_screen(const WorldFixture& fixture, const WorldState& state) {
  const ScreenNode* node = nullptr;
  bool dimmed = false;
  if (state.popup_active.has_value()) {
    const Popup* popup = find_popup(fixture, *state.popup_active);
    if (popup != nullptr) node = fixture.find_screen(popup->overlay_screen);
    dimmed = true;
  }
  if (node == nullptr) node = fixture.find_screen(state.current_screen_id);

  json elements = json::array();
  if (node != nullptr) {
    for (const auto& el : node->elements) {
      json je;
      je["bounds"] = {el.bounds.x1, el.bounds.y1, el.bounds.x2, el.bounds.y2};
      je["id"] = el.id;
      je["label"] = el.label;
      je["role"] = std::string(role_name(el.role));
      if (el.role == Role::Field) {
        auto it = state.field_contents.find(el.id);
        je["content"] = it != state.field_contents.end() ? it->second : "";
        if (state.focused_element == el.id) je["focused"] = true;
      }
      auto st = state.element_states.find(el.id);
      if (st != state.element_states.end()) {
        je["state"] = st->second;
      } else if (!el.state.empty()) {
        je["state"] = el.state;
      }
      elements.push_back(std::move(je));
    }
  }

  json payload;
  payload["dimmed"] = dimmed;
  payload["elements"] = std::move(elements);
  payload["screen"] = node != nullptr ? node->id : std::string{};

  Screen screen;
  screen.screen_id = node != nullptr ? node->id : std::string{};
  screen.width_px = fixture.width_px;
  screen.height_px = fixture.height_px;
  screen.payload = payload.dump();
  screen.payload_bytes = fixture.screenshot_bytes;
  return screen;
}

Result<TransitionResult> apply_action(const WorldFixture& fixture,
                                      const WorldState& state,
                                      const Action& action) {
  TransitionResult result{state, {}, false};
  WorldState& s = result.state;
  StepContext ctx;

  auto finish = [&](std::string effect, bool no_effect) -> Result<TransitionResult> {
    result.effect = std::move(effect);
    result.no_effect = no_effect;
    ++s.step_counter;
    evaluate_popups(fixture, s, ctx);
    return result;
  };

  // Overlay discipline: while a popup shows, only a tap on its dismiss
  // element does anything.
  if (s.popup_active.has_value()) {
    const Popup* popup = find_popup(fixture, *s.popup_active);
    const ScreenNode* overlay =
        popup != nullptr ? fixture.find_screen(popup->overlay_screen) : nullptr;
    if (const auto* tap = std::get_if<Tap>(&action); tap != nullptr && overlay != nullptr) {
      const Element* dismiss = find_element(*overlay, popup->dismiss_element);
      if (dismiss != nullptr && dismiss->bounds.contains(tap->x, tap->y)) {
        s.popup_active.reset();
        return finish("dismissed popup '" + popup->id + "'", false);
      }
    }
    return finish("popup intercepted the action", true);
  }

  const ScreenNode* screen = fixture.find_screen(s.current_screen_id);
  if (screen == nullptr) {
    return finish("current screen missing from fixture", true);
  }

  struct Visitor {
    const WorldFixture& fixture;
    WorldState& s;
    const ScreenNode& screen;
    StepContext& ctx;

    std::pair<std::string, bool> operator()(const Tap& a) {
      const Element* el = hit_test(screen, a.x, a.y);
      if (el == nullptr) return {"tap hit nothing", true};
      std::string effect;
      if (el->role == Role::Field) {
        s.focused_element = el->id;
        effect = "focused field '" + el->id + "'";
      }
      const Transition* t = find_transition(fixture, screen.id, el->id, TriggerKind::Tap);
      if (t != nullptr) {
        fire_transition(fixture, *t, s, ctx);
        effect = effect.empty() ? "tapped '" + el->id + "'" : effect;
        if (!t->target.empty()) effect += " -> " + t->target;
        return {effect, false};
      }
      if (!effect.empty()) return {effect, false};
      return {"no transition for tap on '" + el->id + "'", true};
    }

    std::pair<std::string, bool> operator()(const LongPress& a) {
      const Element* el = hit_test(screen, a.x, a.y);
      if (el == nullptr) return {"long press hit nothing", true};
      const Transition* t =
          find_transition(fixture, screen.id, el->id, TriggerKind::LongPress);
      if (t == nullptr) return {"no transition for long press on '" + el->id + "'", true};
      fire_transition(fixture, *t, s, ctx);
      return {"long pressed '" + el->id + "'", false};
    }

    std::pair<std::string, bool> operator()(const Swipe&) {
      const Transition* t = find_transition(fixture, screen.id, "", TriggerKind::Swipe);
      if (t == nullptr) return {"no swipe transition on this screen", true};
      fire_transition(fixture, *t, s, ctx);
      return {"swiped -> " + s.current_screen_id, false};
    }

    std::pair<std::string, bool> operator()(const InputText& a) {
      if (s.focused_element.empty() ||
          find_element(screen, s.focused_element) == nullptr) {
        return {"no focused field", true};
      }
      s.field_contents[s.focused_element] += a.text;
      return {"typed into '" + s.focused_element + "'", false};
    }

    std::pair<std::string, bool> operator()(const DeleteText&) {
      if (s.focused_element.empty() ||
          find_element(screen, s.focused_element) == nullptr) {
        return {"no focused field", true};
      }
      s.field_contents[s.focused_element] = "";
      return {"cleared '" + s.focused_element + "'", false};
    }

    std::pair<std::string, bool> operator()(const Enter&) {
      if (s.focused_element.empty()) return {"no focused field to commit", true};
      const Transition* t =
          find_transition(fixture, screen.id, s.focused_element, TriggerKind::Enter);
      if (t == nullptr) return {"no commit transition for '" + s.focused_element + "'", true};
      fire_transition(fixture, *t, s, ctx);
      return {"committed '" + s.focused_element + "'", false};
    }

    std::pair<std::string, bool> operator()(const Answer& a) {
      s.last_answer = a.text;
      s.answered = true;
      return {"answered", false};
    }

    std::pair<std::string, bool> operator()(const PressBack&) {
      if (s.screen_stack.empty()) return {"back stack empty", true};
      std::string target = s.screen_stack.back();
      s.screen_stack.pop_back();
      s.current_screen_id = target;
      s.focused_element.clear();
      ctx.entered_screen = true;
      ctx.entered_id = target;
      return {"back -> " + target, false};
    }

    std::pair<std::string, bool> operator()(const PressHome&) {
      s.screen_stack.clear();
      std::string home = fixture.home_screen_id();
      if (s.current_screen_id != home) {
        s.current_screen_id = home;
        s.focused_element.clear();
        ctx.entered_screen = true;
        ctx.entered_id = home;
      }
      return {"home", false};
    }

    std::pair<std::string, bool> operator()(const OpenApp&) {
      return {"", false};  // handled before the visitor
    }
  };

  // OpenApp can fail with a typed error, so handle it outside the visitor.
  if (const auto* open = std::get_if<OpenApp>(&action)) {
    auto it = fixture.apps.find(open->name);
    if (it == fixture.apps.end()) {
      return make_error(Errc::UnknownApp, open->name);
    }
    navigate(s, it->second, ctx, /*push_stack=*/true);
    return finish("opened app '" + open->name + "'", false);
  }

  Visitor visitor{fixture, s, *screen, ctx};
  auto [effect, no_effect] = std::visit(visitor, action);
  return finish(std::move(effect), no_effect);
}

// ---------------------------------------------------------------------------
// Success predicates

namespace {

bool eval_predicate(const Predicate& p, const WorldState& state) {
  switch (p.kind) {
    case Predicate::Kind::ListContains: {
      auto ptr = to_pointer(p.path);
      if (!state.app_data.contains(ptr)) return false;
      const json& arr = state.app_data[ptr];
      if (!arr.is_array()) return false;
      for (const auto& item : arr) {
        if (!item.is_object()) continue;
        bool all = true;
        for (const auto& [key, value] : p.entry) {
          if (!item.contains(key) || item[key] != value) {
            all = false;
            break;
          }
        }
        if (all) return true;
      }
      return false;
    }
    case Predicate::Kind::Equals: {
      auto ptr = to_pointer(p.path);
      return state.app_data.contains(ptr) && state.app_data[ptr] == p.value;
    }
    case Predicate::Kind::AnswerEquals:
      return state.answered && json(state.last_answer) == p.value;
    case Predicate::Kind::All:
      for (const auto& child : p.children) {
        if (!eval_predicate(child, state)) return false;
      }
      return true;
  }
  return false;
}

}  // namespace

bool evaluate_success(const WorldFixture& fixture, const WorldState& state,
                      const Task& task) {
  (void)fixture;
  return eval_predicate(task.success, state);
}

// ---------------------------------------------------------------------------
// Validation + reachability

namespace {

/// Candidate strings for the brute-force search: every string literal in the
/// task predicate plus its whitespace-split words.
void collect_predicate_strings(const Predicate& p, std::set<std::string>& out) {
  auto add = [&out](const std::string& s) {
    if (s.empty()) return;
    out.insert(s);
    std::istringstream words(s);
    std::string w;
    while (words >> w) out.insert(w);
  };
  if (p.value.is_string()) add(p.value.get<std::string>());
  for (const auto& [key, value] : p.entry) {
    if (value.is_string()) add(value.get<std::string>());
  }
  for (const auto& child : p.children) collect_predicate_strings(child, out);
}

void collect_answer_strings(const Predicate& p, std::set<std::string>& out) {
  if (p.kind == Predicate::Kind::AnswerEquals && p.value.is_string()) {
    out.insert(p.value.get<std::string>());
  }
  for (const auto& child : p.children) collect_answer_strings(child, out);
}

bool predicate_paths_written(const Predicate& p, const WorldFixture& fixture,
                             std::string& missing) {
  if (p.kind == Predicate::Kind::ListContains || p.kind == Predicate::Kind::Equals) {
    for (const auto& t : fixture.transitions) {
      for (const auto& e : t.effects) {
        if ((e.op == Effect::Op::SetData || e.op == Effect::Op::AppendRecord) &&
            e.path == p.path) {
          return true;
        }
      }
    }
    missing = p.path;
    return false;
  }
  for (const auto& child : p.children) {
    if (!predicate_paths_written(child, fixture, missing)) return false;
  }
  return true;
}

std::string search_key(const WorldState& s, int step_cap) {
  json j;
  j["answered"] = s.answered;
  j["app_data"] = s.app_data;
  j["fields"] = s.field_contents;
  j["focus"] = s.focused_element;
  j["last_answer"] = s.last_answer;
  j["popup"] = s.popup_active.has_value() ? json(*s.popup_active) : json(nullptr);
  j["popup_fires"] = s.popup_fires;
  j["screen"] = s.current_screen_id;
  j["stack"] = s.screen_stack;
  j["states"] = s.element_states;
  j["step"] = std::min(s.step_counter, step_cap);
  return j.dump();
}

Result<std::monostate> check_structure(const WorldFixture& f) {
  auto invalid = [](std::string detail) {
    return Result<std::monostate>(make_error(Errc::FixtureInvalid, std::move(detail)));
  };

  if (f.width_px <= 0 || f.height_px <= 0) return invalid("resolution must be positive");
  if (f.screenshot_bytes < 0) return invalid("screenshot_bytes must be >= 0");

  int homes = 0;
  std::set<std::string> screen_ids;
  std::set<std::string> element_ids;
  for (const auto& s : f.screens) {
    if (s.id.empty()) return invalid("screen with empty id");
    if (!screen_ids.insert(s.id).second) return invalid("duplicate screen id '" + s.id + "'");
    if (s.home) ++homes;
    for (const auto& el : s.elements) {
      if (el.id.empty()) return invalid("screen '" + s.id + "' has element with empty id");
      if (!element_ids.insert(el.id).second) {
        return invalid("duplicate element id '" + el.id + "'");
      }
      if (el.bounds.x1 > el.bounds.x2 || el.bounds.y1 > el.bounds.y2 ||
          el.bounds.x1 < 0 || el.bounds.y1 < 0 || el.bounds.x2 > f.width_px ||
          el.bounds.y2 > f.height_px) {
        return invalid("element '" + el.id + "' bounds outside screen resolution");
      }
    }
  }
  if (homes == 0) return invalid("no home screen declared");
  if (homes > 1) return invalid("more than one home screen declared");

  for (const auto& [app, entry] : f.apps) {
    if (screen_ids.count(entry) == 0) {
      return invalid("app '" + app + "' entry screen '" + entry + "' does not exist");
    }
  }

  std::set<std::string> transition_keys;
  for (const auto& t : f.transitions) {
    const ScreenNode* src = f.find_screen(t.screen);
    if (src == nullptr) {
      return invalid("transition references missing screen '" + t.screen + "'");
    }
    if (!t.element.empty() && find_element(*src, t.element) == nullptr) {
      return invalid("transition references element '" + t.element +
                     "' absent from screen '" + t.screen + "'");
    }
    if (!t.target.empty() && screen_ids.count(t.target) == 0) {
      return invalid("transition targets missing screen '" + t.target + "'");
    }
    std::string key = t.screen + "\x1f" + t.element + "\x1f" +
                      std::to_string(static_cast<int>(t.on));
    if (!transition_keys.insert(key).second) {
      return invalid("duplicate transition for (" + t.screen + ", " + t.element + ")");
    }
    for (const auto& e : t.effects) {
      if ((e.op == Effect::Op::SetField || e.op == Effect::Op::ClearField ||
           e.op == Effect::Op::SetElementState) &&
          element_ids.count(e.element) == 0) {
        return invalid("effect references missing element '" + e.element + "'");
      }
    }
  }

  std::set<std::string> task_ids;
  for (const auto& t : f.tasks) {
    if (t.task_id.empty()) return invalid("task with empty task_id");
    if (!task_ids.insert(t.task_id).second) {
      return invalid("duplicate task id '" + t.task_id + "'");
    }
    if (t.instruction.empty()) return invalid("task '" + t.task_id + "' has empty instruction");
    std::string missing;
    if (!predicate_paths_written(t.success, f, missing)) {
      return invalid("task '" + t.task_id + "' predicate path '" + missing +
                     "' is never written by any effect");
    }
  }

  for (const auto& p : f.popups) {
    if (p.id.empty()) return invalid("popup with empty id");
    const ScreenNode* overlay = f.find_screen(p.overlay_screen);
    if (overlay == nullptr) {
      return invalid("popup '" + p.id + "' overlay screen '" + p.overlay_screen +
                     "' does not exist");
    }
    if (find_element(*overlay, p.dismiss_element) == nullptr) {
      return invalid("popup '" + p.id + "' dismiss element '" + p.dismiss_element +
                     "' absent from overlay");
    }
    if (p.trigger.kind == PopupTrigger::Kind::ScreenEntry &&
        screen_ids.count(p.trigger.screen) == 0) {
      return invalid("popup '" + p.id + "' trigger screen does not exist");
    }
    if (p.trigger.kind == PopupTrigger::Kind::RandomStep &&
        p.trigger.min_step > p.trigger.max_step) {
      return invalid("popup '" + p.id + "' random trigger has min > max");
    }
    for (const auto& task : p.only_for_tasks) {
      if (task_ids.count(task) == 0) {
        return invalid("popup '" + p.id + "' filters on unknown task '" + task + "'");
      }
    }
  }

  return std::monostate{};
}

}  // namespace

Result<std::vector<TaskReachability>> validate_fixture(const WorldFixture& fixture,
                                                       int max_depth) {
  auto structural = check_structure(fixture);
  if (!structural.ok()) return structural.error();

  std::vector<TaskReachability> reachability;
  if (max_depth <= 0) return reachability;  // structural checks only

  for (const auto& task : fixture.tasks) {
    std::set<std::string> inputs;
    std::set<std::string> answers;
    collect_predicate_strings(task.success, inputs);
    collect_answer_strings(task.success, answers);

    int step_cap = 1;
    for (const auto& p : fixture.popups) {
      if (!popup_applies_to_task(p, task.task_id)) continue;
      if (p.trigger.kind == PopupTrigger::Kind::StepCount) {
        step_cap = std::max(step_cap, p.trigger.at_step + 1);
      }
      if (p.trigger.kind == PopupTrigger::Kind::RandomStep) {
        step_cap = std::max(step_cap, p.trigger.max_step + 1);
      }
    }

    TaskReachability r;
    r.task_id = task.task_id;

    WorldState start = reset(fixture, /*seed=*/0, task.task_id);
    std::deque<std::pair<WorldState, int>> frontier;
    std::set<std::string> visited;
    frontier.emplace_back(start, 0);
    visited.insert(search_key(start, step_cap));

    while (!frontier.empty() && !r.reachable) {
      auto [state, depth] = std::move(frontier.front());
      frontier.pop_front();
      if (depth >= max_depth) continue;

      std::vector<Action> candidates;
      const ScreenNode* visible = nullptr;
      if (state.popup_active.has_value()) {
        const Popup* popup = find_popup(fixture, *state.popup_active);
        if (popup != nullptr) visible = fixture.find_screen(popup->overlay_screen);
      } else {
        visible = fixture.find_screen(state.current_screen_id);
      }
      if (visible != nullptr) {
        for (const auto& el : visible->elements) {
          candidates.push_back(Tap{el.bounds.center_x(), el.bounds.center_y()});
          candidates.push_back(LongPress{el.bounds.center_x(), el.bounds.center_y()});
        }
      }
      candidates.push_back(Swipe{fixture.width_px / 2, fixture.height_px * 3 / 4,
                                 fixture.width_px / 2, fixture.height_px / 4});
      if (!state.focused_element.empty()) {
        candidates.push_back(DeleteText{});
        candidates.push_back(Enter{});
        for (const auto& text : inputs) candidates.push_back(InputText{text});
      }
      for (const auto& [app, entry] : fixture.apps) candidates.push_back(OpenApp{app});
      candidates.push_back(PressBack{});
      candidates.push_back(PressHome{});
      for (const auto& answer : answers) candidates.push_back(Answer{answer});

      for (const auto& action : candidates) {
        auto applied = apply_action(fixture, state, action);
        if (!applied.ok()) continue;
        const WorldState& next = applied.value().state;
        // Keep the space finite: cap field content growth.
        bool oversized = false;
        for (const auto& [id, content] : next.field_contents) {
          if (content.size() > 64) oversized = true;
        }
        if (oversized) continue;
        if (evaluate_success(fixture, next, task)) {
          r.reachable = true;
          r.shortest_actions = depth + 1;
          break;
        }
        std::string key = search_key(next, step_cap);
        if (visited.insert(key).second) {
          frontier.emplace_back(next, depth + 1);
        }
      }
    }

    reachability.push_back(std::move(r));
  }

  return reachability;
}

}  // namespace ecoagent::sim
