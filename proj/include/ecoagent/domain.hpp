#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ecoagent/result.hpp"

namespace ecoagent {

struct Instruction {
  std::string task_id;
  std::string goal;
};

/// A pseudo-screenshot: structured element listing plus the emulated byte
/// size a raw screenshot of this screen would occupy on the wire.
struct Screen {
  std::string screen_id;
  int width_px = 0;
  int height_px = 0;
  std::string payload;        // canonical JSON element listing
  std::int64_t payload_bytes = 0;
};

struct PlanStep {
  int index = 0;  // 1-based
  std::string thought;
  std::string step;
  std::string expectation;
};

struct Plan {
  int revision = 0;
  std::vector<PlanStep> steps;
  std::string source_description;
};

// ---------------------------------------------------------------------------
// Action space

struct Tap { int x = 0, y = 0; };
struct Swipe { int x1 = 0, y1 = 0, x2 = 0, y2 = 0; };
struct LongPress { int x = 0, y = 0; };
struct InputText { std::string text; };
struct DeleteText {};
struct OpenApp { std::string name; };
struct Enter {};
struct Answer { std::string text; };
struct PressBack {};
struct PressHome {};

using Action = std::variant<Tap, Swipe, LongPress, InputText, DeleteText,
                            OpenApp, Enter, Answer, PressBack, PressHome>;

enum class ActionKind {
  Tap, Swipe, LongPress, InputText, DeleteText,
  OpenApp, Enter, Answer, PressBack, PressHome,
};

ActionKind kind_of(const Action& action);
std::string_view action_kind_name(ActionKind kind);

bool operator==(const Action& a, const Action& b);

inline bool operator==(const Tap& a, const Tap& b) { return a.x == b.x && a.y == b.y; }
inline bool operator==(const Swipe& a, const Swipe& b) {
  return a.x1 == b.x1 && a.y1 == b.y1 && a.x2 == b.x2 && a.y2 == b.y2;
}
inline bool operator==(const LongPress& a, const LongPress& b) { return a.x == b.x && a.y == b.y; }
inline bool operator==(const InputText& a, const InputText& b) { return a.text == b.text; }
inline bool operator==(const DeleteText&, const DeleteText&) { return true; }
inline bool operator==(const OpenApp& a, const OpenApp& b) { return a.name == b.name; }
inline bool operator==(const Enter&, const Enter&) { return true; }
inline bool operator==(const Answer& a, const Answer& b) { return a.text == b.text; }
inline bool operator==(const PressBack&, const PressBack&) { return true; }
inline bool operator==(const PressHome&, const PressHome&) { return true; }

// ---------------------------------------------------------------------------
// Planner vocabulary

/// The nine step keywords a plan may use. INPUT maps to InputText and DELETE
/// to DeleteText; the rest map by name. LongPress is reachable only through
/// executor output, never through plan text.
inline constexpr std::string_view kPlannerVocabulary[] = {
    "TAP", "SWIPE", "INPUT", "ENTER", "ANSWER",
    "OPEN_APP", "DELETE", "PRESS_BACK", "PRESS_HOME",
};

Result<ActionKind> canonical_action_kind(std::string_view keyword);

/// Finds the keyword that classifies a plan step: the step's leading keyword
/// if it starts with one, otherwise the single keyword it mentions. Matching
/// is case-insensitive on word boundaries; OPEN_APP, PRESS_BACK and
/// PRESS_HOME also match their two-word spellings.
std::optional<std::string> extract_step_keyword(std::string_view step_text);

// ---------------------------------------------------------------------------
// Validation

struct ActionValidity {
  bool ok = false;
  std::string reason;
};

/// Coordinates must lie inside [0,width]x[0,height] (bounds inclusive);
/// InputText requires non-empty text, Answer does not.
ActionValidity validate_action(const Action& action, const Screen& screen);

// ---------------------------------------------------------------------------
// Verification and summaries

enum class Verdict { Pass, Fail };

struct VerificationResult {
  Verdict verdict = Verdict::Pass;
  std::string failure_summary;  // non-empty iff Fail
};

struct ScreenSummary {
  std::string text;
  int token_count = 0;
};

struct MemoryEntry {
  int step_index = 0;
  ScreenSummary summary;
  std::optional<Action> action;
  std::optional<VerificationResult> verification;
};

// ---------------------------------------------------------------------------
// Metrics

enum class FailureClass { None, Planning, VisualGrounding, MaxSteps, Verification };

std::string_view failure_class_name(FailureClass fc);

struct EpisodeMetrics {
  bool success = false;
  int mc = 0;                                  // cloud-model calls
  std::int64_t mt = 0;                         // cloud prompt+completion tokens
  std::vector<std::int64_t> step_latencies_us; // one entry per executed loop step
  std::int64_t uplink_bytes = 0;
  int replans = 0;
  int steps_executed = 0;
  FailureClass failure_class = FailureClass::None;
};

}  // namespace ecoagent
