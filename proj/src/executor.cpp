#include "ecoagent/executor.hpp"

#include "ecoagent/protocol.hpp"

namespace ecoagent::executor {

CompletionRequest build_grounding_prompt(const Screen& screen, const PlanStep& step) {
  CompletionRequest request;
  request.user_segments.push_back(ImageSegment{screen.payload, screen.payload_bytes});
  request.user_segments.push_back(TextSegment{
      "Execute: " + step.step + ". Respond with exactly one action call."});
  return request;
}

Result<Action> execute_step(const Screen& screen, const PlanStep& step,
                            Provider& device) {
  auto completion = device.complete(build_grounding_prompt(screen, step));
  if (!completion.ok()) {
    return make_error(Errc::GroundingFailed, completion.error().to_string());
  }
  auto action = protocol::parse_action(completion.value().text);
  if (!action.ok()) {
    return make_error(Errc::GroundingFailed, action.error().to_string());
  }
  auto validity = validate_action(action.value(), screen);
  if (!validity.ok) {
    return make_error(Errc::GroundingFailed, validity.reason);
  }
  return action;
}

}  // namespace ecoagent::executor
