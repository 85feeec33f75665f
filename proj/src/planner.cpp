#include "ecoagent/planner.hpp"

#include "ecoagent/prompts.hpp"

namespace ecoagent::planner {

std::string MemoryStore::descriptions() const {
  std::string out;
  for (const auto& entry : entries_) {
    if (!out.empty()) out.push_back('\n');
    out += entry.summary.text;
  }
  return out;
}

CompletionRequest build_initial_prompt(const Instruction& instruction,
                                       const Screen& screen) {
  CompletionRequest request;
  request.system = std::string(prompts::planner_system());
  request.user_segments.push_back(ImageSegment{screen.payload, screen.payload_bytes});
  request.user_segments.push_back(TextSegment{prompts::render_template(
      prompts::planner_user_template(), {{"instruction", instruction.goal}})});
  return request;
}

namespace {

/// Every step must carry a recognizable vocabulary keyword that maps into the
/// action space.
Result<std::monostate> check_step_keywords(const Plan& plan, Errc error_code) {
  for (const auto& step : plan.steps) {
    auto keyword = extract_step_keyword(step.step);
    if (!keyword.has_value()) {
      return make_error(error_code, "step " + std::to_string(step.index) +
                                        " has no unambiguous action keyword: '" +
                                        step.step + "'");
    }
    auto kind = canonical_action_kind(*keyword);
    if (!kind.ok()) return make_error(error_code, kind.error().to_string());
  }
  return std::monostate{};
}

}  // namespace

Result<Plan> initial_plan(const Instruction& instruction, const Screen& screen,
                          Provider& cloud) {
  auto completion = cloud.complete(build_initial_prompt(instruction, screen));
  if (!completion.ok()) {
    return make_error(Errc::PlanningFailed, completion.error().to_string());
  }
  auto parsed = protocol::parse_planner_response(completion.value().text);
  if (!parsed.ok()) {
    return make_error(Errc::PlanningFailed, parsed.error().to_string());
  }
  Plan plan = std::move(parsed.value().plan);
  plan.revision = 0;
  if (auto check = check_step_keywords(plan, Errc::PlanningFailed); !check.ok()) {
    return check.error();
  }
  return plan;
}

CompletionRequest build_replan_prompt(const Instruction& instruction,
                                      const Plan& prev_plan,
                                      const MemoryStore& memory,
                                      const ScreenSummary& current_summary,
                                      const std::string& failure_summary) {
  CompletionRequest request;
  request.system = std::string(prompts::replanner_system());
  request.user_segments.push_back(TextSegment{prompts::render_template(
      prompts::replanner_user_template(),
      {{"instruction", instruction.goal},
       {"original_plan", prompts::render_plan_json(prev_plan)},
       {"descriptions", memory.descriptions()},
       {"description", current_summary.text},
       {"summary", failure_summary}})});
  return request;
}

Result<protocol::ReplanOutcome> replan(const Instruction& instruction,
                                       const Plan& prev_plan,
                                       const MemoryStore& memory,
                                       const ScreenSummary& current_summary,
                                       const std::string& failure_summary,
                                       Provider& cloud) {
  auto completion = cloud.complete(build_replan_prompt(
      instruction, prev_plan, memory, current_summary, failure_summary));
  if (!completion.ok()) {
    return make_error(Errc::ReplanningFailed, completion.error().to_string());
  }
  auto parsed = protocol::parse_replanner_response(completion.value().text);
  if (!parsed.ok()) {
    return make_error(Errc::ReplanningFailed, parsed.error().to_string());
  }
  if (auto* new_plan = std::get_if<protocol::NewPlan>(&parsed.value())) {
    new_plan->plan.revision = prev_plan.revision + 1;
    if (auto check = check_step_keywords(new_plan->plan, Errc::ReplanningFailed);
        !check.ok()) {
      return check.error();
    }
  }
  return parsed;
}

}  // namespace ecoagent::planner
