#pragma once

#include <string>
#include <vector>

#include "ecoagent/domain.hpp"
#include "ecoagent/protocol.hpp"
#include "ecoagent/providers.hpp"

namespace ecoagent::planner {

/// Cloud-side trajectory memory: the screen summaries (and outcomes)
/// accumulated on-device and mirrored upward as text. Append-only within an
/// episode; entry 0 is the initial screen's summary.
class MemoryStore {
public:
  void append(MemoryEntry entry) { entries_.push_back(std::move(entry)); }

  const std::vector<MemoryEntry>& entries() const { return entries_; }

  /// One summary per line, oldest first, for the {descriptions} slot.
  std::string descriptions() const;

  Plan original_plan;
  int current_revision = 0;

private:
  std::vector<MemoryEntry> entries_;
};

CompletionRequest build_initial_prompt(const Instruction& instruction,
                                       const Screen& screen);

/// One cloud call; parses the structured response into a revision-0 plan and
/// checks every step against the planner vocabulary.
Result<Plan> initial_plan(const Instruction& instruction, const Screen& screen,
                          Provider& cloud);

CompletionRequest build_replan_prompt(const Instruction& instruction,
                                      const Plan& prev_plan,
                                      const MemoryStore& memory,
                                      const ScreenSummary& current_summary,
                                      const std::string& failure_summary);

/// One cloud call; text-only uplink. A NewPlan outcome carries revision
/// prev_plan.revision + 1 and execution restarts at its first step.
Result<protocol::ReplanOutcome> replan(const Instruction& instruction,
                                       const Plan& prev_plan,
                                       const MemoryStore& memory,
                                       const ScreenSummary& current_summary,
                                       const std::string& failure_summary,
                                       Provider& cloud);

}  // namespace ecoagent::planner
