#pragma once

#include <string>

#include "ecoagent/orchestrator.hpp"

namespace ecoagent::report {

/// All three renderings carry the same figures; numbers are formatted with
/// fixed precision so repeated runs are byte-identical.
std::string to_markdown(const orch::SuiteReport& report);
std::string to_csv(const orch::SuiteReport& report);
std::string to_json(const orch::SuiteReport& report);

inline constexpr std::string_view kProxyTokenDisclaimer =
    "Token figures are proxy tokens: ceil(utf8_bytes / 4).";

struct Comparison {
  orch::SuiteReport closed_loop;
  orch::SuiteReport baseline;
  double uplink_ratio = 0.0;   // baseline / closed-loop
  double mt_ratio = 0.0;       // baseline / closed-loop
  double latency_ratio = 0.0;  // baseline / closed-loop (mean per-step)
};

Comparison compare(const orch::SuiteReport& closed_loop,
                   const orch::SuiteReport& baseline);

std::string comparison_to_markdown(const Comparison& comparison);
std::string comparison_to_json(const Comparison& comparison);

}  // namespace ecoagent::report
