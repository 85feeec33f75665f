#include "ecoagent/prompts.hpp"

#include <vector>

#include <nlohmann/json.hpp>

namespace ecoagent::prompts {

namespace {

constexpr std::string_view kPlannerSystem =
    "You are a mobile assistant that helps users complete tasks on Android devices.";

constexpr std::string_view kPlannerUser =
    R"(Based on this Android screenshot, please help me with: {instruction}

Please provide:
1. A description of what you see on the current screen
2. What needs to be done to achieve the goal
3. A step-by-step action plan and expectations in JSON format like this:
```JSON
{{
"Step1": {{"thought": "THOUGHT1", "step": "STEP1.", "expectation": "EXPECTATION1."}},
"Step2": {{"thought": "THOUGHT2", "step": "STEP2.", "expectation": "EXPECTATION2."}},
"Step3": {{"thought": "THOUGHT3", "step": "STEP3.", "expectation": "EXPECTATION3."}}
}}
```

For each step, you can choose from the following actions:
1. TAP
2. SWIPE
3. INPUT
4. ENTER
5. ANSWER
6. OPEN_APP
7. DELETE

Make sure the step is brief and clear, you should only include the most important information in the step description. For example, if you need to tap a button, you should only outline the button's name but not its location on the screen.

Your response MUST strictly adhere the following structure, and DO NOT add other contents:

Description: <You need to describe the current screen and what you see on it.>
Thought: <You need to think about what needs to be done to achieve the goal.>
Plan: <You need to provide a plan in JSON format as described above.>)";

constexpr std::string_view kReplannerSystem = kPlannerSystem;

constexpr std::string_view kReplannerUser =
    R"(Given the original plan and current progress, please create a new plan for goal: {instruction}

Original Plan:
{original_plan}

The screen has changed as follows:
{descriptions}

The current screen description is: {description}
The reason why you failed at the last step is: {summary}
Please provide:
1. Why the previous action was not successful? What can you learn from this failure?
2. A step-by-step action plan started from this screen and expectations in JSON format like this:
```JSON
{{
"Step1": {{"thought": "THOUGHT1", "step": "STEP1.", "expectation": "EXPECTATION1."}},
"Step2": {{"thought": "THOUGHT2", "step": "STEP2.", "expectation": "EXPECTATION2."}},
"Step3": {{"thought": "THOUGHT3", "step": "STEP3.", "expectation": "EXPECTATION3."}}
}}
```

For each step, you can choose from the following actions:
1. TAP
2. SWIPE
3. INPUT
4. ENTER
5. ANSWER
6. OPEN_APP
7. DELETE
8. PRESS_BACK
9. PRESS_HOME

Make sure the step is brief and clear, you should only include the most important information in the step description. For example, if you need to tap a button, you should only outline the button's name but not its location on the screen.

Your response MUST strictly adhere the following structure, and DO NOT add other contents:

Reflection: <You need to reflect on the last action and what you can learn from this failure.>
Plan: <You need to provide a new plan for the remaining steps in JSON format as described above.>

If you have reviewed the screen history CAREFULLY and confirmed that the task has been completed, please JUST respond with:
`No need to replan.')";

constexpr std::string_view kPreUnderstandSystem =
    "You are an expert visual assistant trained to analyze smartphone screenshots.";

constexpr std::string_view kPreUnderstandUser =
    R"(- You are provided with a screenshot of a mobile phone.
- You are required to describe main contents and functionality of the current screen.
- You should focus on the main elements and their purposes, avoiding unnecessary details.
- Focus on brief, you should in 3-5 sentences.)";

constexpr std::string_view kObserverSystem =
    "You are an intelligent and helpful visual assistant adept at analyzing mobile devices.";

constexpr std::string_view kObserverUser =
    R"(- You are required to observe the screenshot carefully.
user expectation: {expectation}
- You are required to judge whether the screenshot meets the user expectation based on your observation.)";

}  // namespace

std::string_view planner_system() { return kPlannerSystem; }
std::string_view planner_user_template() { return kPlannerUser; }
std::string_view replanner_system() { return kReplannerSystem; }
std::string_view replanner_user_template() { return kReplannerUser; }
std::string_view preunderstand_system() { return kPreUnderstandSystem; }
std::string_view preunderstand_user() { return kPreUnderstandUser; }
std::string_view observer_system() { return kObserverSystem; }
std::string_view observer_user_template() { return kObserverUser; }

std::string render_template(std::string_view template_text,
                            const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(template_text.size());
  size_t i = 0;
  while (i < template_text.size()) {
    char c = template_text[i];
    if (c == '{') {
      if (i + 1 < template_text.size() && template_text[i + 1] == '{') {
        out.push_back('{');
        i += 2;
        continue;
      }
      size_t close = template_text.find('}', i + 1);
      if (close != std::string_view::npos) {
        std::string name(template_text.substr(i + 1, close - i - 1));
        auto it = slots.find(name);
        if (it != slots.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
      out.push_back('{');
      ++i;
      continue;
    }
    if (c == '}' && i + 1 < template_text.size() && template_text[i + 1] == '}') {
      out.push_back('}');
      i += 2;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::string render_plan_json(const Plan& plan) {
  std::string out = "{\n";
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    nlohmann::ordered_json obj;
    obj["thought"] = step.thought;
    obj["step"] = step.step;
    obj["expectation"] = step.expectation;
    out += "\"Step" + std::to_string(step.index) + "\": " + obj.dump();
    if (i + 1 < plan.steps.size()) out += ",";
    out += "\n";
  }
  out += "}";
  return out;
}

const std::vector<TemplateAsset>& template_assets() {
  static const std::vector<TemplateAsset> assets = {
      {"planner_system.txt", kPlannerSystem},
      {"planner_user.txt", kPlannerUser},
      {"replanner_system.txt", kReplannerSystem},
      {"replanner_user.txt", kReplannerUser},
      {"preunderstand_system.txt", kPreUnderstandSystem},
      {"preunderstand_user.txt", kPreUnderstandUser},
      {"observer_system.txt", kObserverSystem},
      {"observer_user.txt", kObserverUser},
  };
  return assets;
}

}  // namespace ecoagent::prompts
