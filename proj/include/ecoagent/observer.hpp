#pragma once

#include "ecoagent/domain.hpp"
#include "ecoagent/providers.hpp"

namespace ecoagent::observer {

inline constexpr int kDefaultSummaryTokenCap = 150;

struct SummaryOutcome {
  ScreenSummary summary;
  bool truncated = false;
};

CompletionRequest build_preunderstand_prompt(const Screen& screen);
CompletionRequest build_verify_prompt(const Screen& screen,
                                      const std::string& expectation);

/// Compresses a screen into a short textual summary. Responses above the
/// token cap are cut at the last sentence boundary that fits (hard byte cut
/// if the first sentence alone overflows) and flagged as truncated.
Result<SummaryOutcome> pre_understand(const Screen& screen, Provider& device,
                                      int token_cap = kDefaultSummaryTokenCap);

/// Judges the post-action screen against the step's expectation.
Result<VerificationResult> verify(const Screen& screen,
                                  const std::string& expectation,
                                  Provider& device);

}  // namespace ecoagent::observer
