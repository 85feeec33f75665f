#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecoagent/domain.hpp"
#include "ecoagent/result.hpp"

namespace ecoagent::sim {

// ---------------------------------------------------------------------------
// Fixture model (immutable after load)

enum class Role { Button, Field, ListItem, Icon };

std::string_view role_name(Role role);

struct Bounds {
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  bool contains(int x, int y) const { return x >= x1 && x <= x2 && y >= y1 && y <= y2; }
  int center_x() const { return (x1 + x2) / 2; }
  int center_y() const { return (y1 + y2) / 2; }
};

struct Element {
  std::string id;
  std::string label;
  Role role = Role::Button;
  Bounds bounds;
  std::string state;  // optional visual state, e.g. "off"
};

struct ScreenNode {
  std::string id;
  bool home = false;
  std::vector<Element> elements;  // later entries are topmost for hit-testing
};

enum class TriggerKind { Tap, LongPress, Swipe, Enter };

/// One effect applied when a transition fires. Exactly one of the operation
/// fields is used, selected by op.
struct Effect {
  enum class Op {
    SetField,         // field_contents[element] = value
    ClearField,       // field_contents[element] = ""
    SetElementState,  // element_states[element] = value
    SetData,          // app_data[path] = value (json)
    AppendRecord,     // app_data[path] += record built from field refs
  };
  Op op = Op::SetData;
  std::string element;
  std::string path;
  nlohmann::json value;
  /// For AppendRecord: record field -> "$field:<element_id>" or literal.
  std::map<std::string, std::string> record;
};

struct Transition {
  std::string screen;
  std::string element;  // empty for screen-level swipe transitions
  TriggerKind on = TriggerKind::Tap;
  std::string target;  // empty = stay on the same screen
  std::vector<Effect> effects;
};

struct PopupTrigger {
  enum class Kind { StepCount, ScreenEntry, RandomStep };
  Kind kind = Kind::StepCount;
  int at_step = 0;          // StepCount
  std::string screen;       // ScreenEntry
  int min_step = 0, max_step = 0;  // RandomStep, resolved at reset from seed
};

struct Popup {
  std::string id;
  PopupTrigger trigger;
  std::string overlay_screen;
  std::string dismiss_element;
  int max_fires = 1;
  std::vector<std::string> only_for_tasks;  // empty = all tasks
};

/// Success predicates: ListContains (array at path has an entry whose fields
/// all match), Equals (value at path equals), AnswerEquals (recorded ANSWER
/// text equals), All (conjunction).
struct Predicate {
  enum class Kind { ListContains, Equals, AnswerEquals, All };
  Kind kind = Kind::ListContains;
  std::string path;
  nlohmann::json value;                 // Equals / AnswerEquals
  std::map<std::string, nlohmann::json> entry;  // ListContains
  std::vector<Predicate> children;      // All
};

struct Task {
  std::string task_id;
  std::string instruction;
  Predicate success;
};

struct WorldFixture {
  std::string name;
  int width_px = 1080;
  int height_px = 2400;
  std::int64_t screenshot_bytes = 100000;
  std::map<std::string, std::string> apps;  // app name -> entry screen
  std::vector<ScreenNode> screens;
  std::vector<Transition> transitions;
  std::vector<Popup> popups;
  std::vector<Task> tasks;

  const ScreenNode* find_screen(const std::string& id) const;
  const Task* find_task(const std::string& task_id) const;
  const std::string& home_screen_id() const;
};

Result<WorldFixture> load_fixture(const std::string& path);
Result<WorldFixture> parse_fixture(const std::string& json_text);

// ---------------------------------------------------------------------------
// Mutable world state

struct WorldState {
  std::string current_screen_id;
  std::vector<std::string> screen_stack;  // for PressBack; excludes current
  std::map<std::string, std::string> field_contents;
  std::map<std::string, std::string> element_states;
  nlohmann::json app_data = nlohmann::json::object();
  std::optional<std::string> popup_active;  // popup id
  std::string focused_element;              // field id, cleared on navigation
  std::string last_answer;
  bool answered = false;
  int step_counter = 0;
  std::map<std::string, int> popup_fires;
  std::map<std::string, int> popup_random_step;  // resolved RandomStep schedule
  std::string active_task;

  /// Canonical JSON used for trace digests and replay comparison.
  std::string canonical_json() const;
};

/// Fresh state at the home screen. The seed resolves any randomized popup
/// schedule; identical seeds give identical behavior.
WorldState reset(const WorldFixture& fixture, std::uint64_t seed,
                 const std::string& task_id = {});

/// Renders the active screen (overlay first when a popup is showing) as a
/// pseudo-screenshot. payload_bytes always equals fixture.screenshot_bytes.
Screen current_screen(const WorldFixture& fixture, const WorldState& state);

struct TransitionResult {
  WorldState state;
  std::string effect;   // human-readable description of what happened
  bool no_effect = false;
};

Result<TransitionResult> apply_action(const WorldFixture& fixture,
                                      const WorldState& state,
                                      const Action& action);

bool evaluate_success(const WorldFixture& fixture, const WorldState& state,
                      const Task& task);

// ---------------------------------------------------------------------------
// Validation and reachability

struct TaskReachability {
  std::string task_id;
  bool reachable = false;
  int shortest_actions = -1;
};

/// Structural invariant checks plus a bounded brute-force search proving each
/// task's success state reachable. The search doubles as the oracle used to
/// author golden plans.
Result<std::vector<TaskReachability>> validate_fixture(const WorldFixture& fixture,
                                                       int max_depth = 24);

}  // namespace ecoagent::sim
