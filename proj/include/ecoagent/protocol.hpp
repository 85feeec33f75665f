#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "ecoagent/domain.hpp"
#include "ecoagent/result.hpp"

namespace ecoagent::protocol {

// ---------------------------------------------------------------------------
// Device-to-cloud wire messages

enum class UplinkKind {
  PlanRequest,
  ReplanRequest,
  VerifyRequest,  // emitted only by the emulated upload-baseline mode
};

std::string_view uplink_kind_name(UplinkKind kind);

/// body is the UTF-8 JSON text of {"kind":...,"task_id":...,"payload":...};
/// an attached screenshot is accounted at its raw (decoded) size and never
/// rides inside body. Replan requests carry text only.
struct UplinkMessage {
  UplinkKind kind = UplinkKind::PlanRequest;
  std::string body;
  std::int64_t attached_image_bytes = 0;
};

std::int64_t measure_uplink(const UplinkMessage& message);

UplinkMessage make_uplink_message(UplinkKind kind, const std::string& task_id,
                                  const std::string& system_text,
                                  const std::string& user_text,
                                  std::int64_t attached_image_bytes);

// ---------------------------------------------------------------------------
// Structured-response grammars

struct PlannerResponse {
  std::string description;
  std::string thought;
  Plan plan;  // revision 0; caller adjusts for replans
};

/// Sections "Description:" / "Thought:" / "Plan:", each starting a line; the
/// Plan section holds a JSON object keyed "Step1".."StepN" (fence spellings
/// ```JSON, ```json or none). Unknown keys inside a step object are ignored.
Result<PlannerResponse> parse_planner_response(std::string_view text);

struct NewPlan {
  std::string reflection;
  Plan plan;
};
struct NoReplanNeeded {};
using ReplanOutcome = std::variant<NewPlan, NoReplanNeeded>;

/// Accepts the exact sentinel "No need to replan." (optionally wrapped in one
/// pair of quote characters) or a "Reflection:" + "Plan:" response.
Result<ReplanOutcome> parse_replanner_response(std::string_view text);

/// Canonical executor grammar: KIND(args) with double-quoted, backslash-
/// escaped string arguments. Whitespace between tokens is ignored; the kind
/// itself is case-sensitive.
Result<Action> parse_action(std::string_view text);

/// Inverse of parse_action; emits the canonical spelling with no spaces.
std::string render_action(const Action& action);

/// First line must begin with "Pass" or "Fail" (case-insensitive, word
/// boundary). On Fail the remainder becomes the failure summary.
Result<VerificationResult> parse_verdict(std::string_view text);

}  // namespace ecoagent::protocol
