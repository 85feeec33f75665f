#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ecoagent/domain.hpp"

namespace ecoagent::prompts {

/// Prompt templates, embedded verbatim. assets/prompts/ holds the same bytes
/// as versioned files with a SHA-256 manifest; tests enforce that the two
/// never drift apart.
std::string_view planner_system();
std::string_view planner_user_template();    // slot: {instruction}
std::string_view replanner_system();
std::string_view replanner_user_template();  // slots: {instruction} {original_plan}
                                             //        {descriptions} {description} {summary}
std::string_view preunderstand_system();
std::string_view preunderstand_user();
std::string_view observer_system();
std::string_view observer_user_template();   // slot: {expectation}

/// Braces-style substitution: {name} inserts a value, {{ and }} emit literal
/// braces. Unknown slot names are left untouched.
std::string render_template(std::string_view template_text,
                            const std::map<std::string, std::string>& slots);

/// Renders a plan back into the Step-JSON shape the planner emits, in
/// numeric step order.
std::string render_plan_json(const Plan& plan);

struct TemplateAsset {
  std::string_view file_name;
  std::string_view content;
};

/// Every embedded template with its asset file name, for drift checks.
const std::vector<TemplateAsset>& template_assets();

}  // namespace ecoagent::prompts
