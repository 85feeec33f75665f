#pragma once

#include "ecoagent/domain.hpp"
#include "ecoagent/providers.hpp"

namespace ecoagent::executor {

/// Screen first, then "Execute: {step}". The executor never sees the
/// expectation text; grounding uses only the current screen and step.
CompletionRequest build_grounding_prompt(const Screen& screen, const PlanStep& step);

/// One device-provider call (excluded from MC/MT). The returned action has
/// already passed validate_action for this screen; parse or validation
/// failures surface as GroundingFailed.
Result<Action> execute_step(const Screen& screen, const PlanStep& step,
                            Provider& device);

}  // namespace ecoagent::executor
