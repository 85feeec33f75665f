#include <doctest.h>

#include <random>

#include "ecoagent/protocol.hpp"

using namespace ecoagent;
using namespace ecoagent::protocol;

namespace {

const char* kGoodPlannerResponse =
    "Description: A home screen with app icons.\n"
    "Thought: Open the app and add the contact.\n"
    "Plan: ```JSON\n"
    "{\n"
    "\"Step1\": {\"thought\": \"t\", \"step\": \"Tap the Contacts app icon\", "
    "\"expectation\": \"Contacts app opens\"}\n"
    "}\n"
    "```";

}  // namespace

TEST_CASE("parse_planner_response happy path") {
  auto result = parse_planner_response(kGoodPlannerResponse);
  REQUIRE(result.ok());
  const auto& parsed = result.value();
  CHECK(parsed.description == "A home screen with app icons.");
  CHECK(parsed.thought == "Open the app and add the contact.");
  REQUIRE(parsed.plan.steps.size() == 1);
  CHECK(parsed.plan.revision == 0);
  CHECK(parsed.plan.steps[0].index == 1);
  CHECK(parsed.plan.steps[0].expectation == "Contacts app opens");
  CHECK(parsed.plan.source_description == parsed.description);
}

TEST_CASE("parse_planner_response fence tolerance") {
  for (const char* fence : {"```JSON", "```json", "```"}) {
    std::string text = std::string("Description: d\nThought: t\nPlan: ") + fence +
                       "\n{\"Step1\": {\"thought\": \"x\", \"step\": \"Tap a\", "
                       "\"expectation\": \"b\"}}\n```";
    auto result = parse_planner_response(text);
    REQUIRE_MESSAGE(result.ok(), fence);
  }
  // No fence at all.
  auto result = parse_planner_response(
      "Description: d\nThought: t\nPlan: {\"Step1\": {\"thought\": \"x\", "
      "\"step\": \"Tap a\", \"expectation\": \"b\"}}");
  CHECK(result.ok());
  // Surrounding whitespace.
  auto padded = parse_planner_response(
      "\n\n  Description: d\n  Thought: t\n  Plan: {\"Step1\": {\"thought\": \"x\", "
      "\"step\": \"Tap a\", \"expectation\": \"b\"}}  \n\n");
  CHECK(padded.ok());
}

TEST_CASE("parse_planner_response missing sections") {
  auto no_plan = parse_planner_response("Description: d\nThought: t\n");
  REQUIRE_FALSE(no_plan.ok());
  CHECK(no_plan.error().code == Errc::MissingSection);
  CHECK(no_plan.error().detail == "Plan");

  auto no_desc = parse_planner_response("Thought: t\nPlan: {}");
  REQUIRE_FALSE(no_desc.ok());
  CHECK(no_desc.error().detail == "Description");
}

TEST_CASE("parse_planner_response step key gaps and malformed JSON") {
  auto gap = parse_planner_response(
      "Description: d\nThought: t\nPlan: {\"Step1\": {\"thought\": \"a\", \"step\": "
      "\"Tap x\", \"expectation\": \"y\"}, \"Step3\": {\"thought\": \"a\", \"step\": "
      "\"Tap x\", \"expectation\": \"y\"}}");
  REQUIRE_FALSE(gap.ok());
  CHECK(gap.error().code == Errc::StepKeyGap);
  CHECK(gap.error().detail == "2");

  auto empty = parse_planner_response("Description: d\nThought: t\nPlan: {}");
  REQUIRE_FALSE(empty.ok());
  CHECK(empty.error().code == Errc::EmptyPlan);

  auto bad_json = parse_planner_response("Description: d\nThought: t\nPlan: {nope");
  REQUIRE_FALSE(bad_json.ok());
  CHECK(bad_json.error().code == Errc::MalformedPlanJson);

  auto alien_key = parse_planner_response(
      "Description: d\nThought: t\nPlan: {\"Banana\": {}}");
  REQUIRE_FALSE(alien_key.ok());
  CHECK(alien_key.error().code == Errc::MalformedPlanJson);

  auto missing_field = parse_planner_response(
      "Description: d\nThought: t\nPlan: {\"Step1\": {\"thought\": \"a\"}}");
  REQUIRE_FALSE(missing_field.ok());
  CHECK(missing_field.error().code == Errc::MalformedPlanJson);
}

TEST_CASE("parse_planner_response ignores unknown keys inside steps") {
  auto result = parse_planner_response(
      "Description: d\nThought: t\nPlan: {\"Step1\": {\"thought\": \"a\", \"step\": "
      "\"Tap x\", \"expectation\": \"y\", \"confidence\": 0.9}}");
  REQUIRE(result.ok());
  CHECK(result.value().plan.steps.size() == 1);
}

TEST_CASE("parse_planner_response handles ten or more steps numerically") {
  std::string plan = "{";
  for (int i = 1; i <= 12; ++i) {
    plan += "\"Step" + std::to_string(i) + "\": {\"thought\": \"t\", \"step\": \"Tap b" +
            std::to_string(i) + "\", \"expectation\": \"e\"}";
    if (i < 12) plan += ",";
  }
  plan += "}";
  auto result = parse_planner_response("Description: d\nThought: t\nPlan: " + plan);
  REQUIRE(result.ok());
  REQUIRE(result.value().plan.steps.size() == 12);
  CHECK(result.value().plan.steps[11].index == 12);
  CHECK(result.value().plan.steps[11].step == "Tap b12");
}

TEST_CASE("parse_replanner_response sentinel forms") {
  auto bare = parse_replanner_response("No need to replan.");
  REQUIRE(bare.ok());
  CHECK(std::holds_alternative<NoReplanNeeded>(bare.value()));

  auto quoted = parse_replanner_response("'No need to replan.'");
  REQUIRE(quoted.ok());
  CHECK(std::holds_alternative<NoReplanNeeded>(quoted.value()));

  auto backquoted = parse_replanner_response("`No need to replan.'\n");
  REQUIRE(backquoted.ok());
  CHECK(std::holds_alternative<NoReplanNeeded>(backquoted.value()));

  auto padded = parse_replanner_response("  No need to replan.  \n");
  REQUIRE(padded.ok());
  CHECK(std::holds_alternative<NoReplanNeeded>(padded.value()));

  // Case-sensitive.
  auto wrong_case = parse_replanner_response("no need to replan.");
  CHECK_FALSE(wrong_case.ok());
}

TEST_CASE("parse_replanner_response new plan") {
  auto result = parse_replanner_response(
      "Reflection: The tap missed because a dialog was open.\n"
      "Plan: ```JSON\n"
      "{\"Step1\": {\"thought\": \"a\", \"step\": \"Tap the Allow button\", "
      "\"expectation\": \"dialog gone\"},\n"
      "\"Step2\": {\"thought\": \"b\", \"step\": \"Tap the Save button\", "
      "\"expectation\": \"saved\"}}\n```");
  REQUIRE(result.ok());
  const auto* new_plan = std::get_if<NewPlan>(&result.value());
  REQUIRE(new_plan != nullptr);
  CHECK(new_plan->reflection == "The tap missed because a dialog was open.");
  CHECK(new_plan->plan.steps.size() == 2);
}

TEST_CASE("parse_replanner_response neither form") {
  auto result = parse_replanner_response("maybe");
  REQUIRE_FALSE(result.ok());
  CHECK(result.error().code == Errc::MissingSection);
}

TEST_CASE("parse_action grammar") {
  CHECK(parse_action("TAP(120, 340)").value() == Action{Tap{120, 340}});
  CHECK(parse_action("TAP(120,340)").value() == Action{Tap{120, 340}});
  CHECK(parse_action("  SWIPE( 1 , 2 , 3 , 4 )  ").value() == Action{Swipe{1, 2, 3, 4}});
  CHECK(parse_action("LONG_PRESS(9,9)").value() == Action{LongPress{9, 9}});
  CHECK(parse_action("INPUT_TEXT(\"John Doe\")").value() == Action{InputText{"John Doe"}});
  CHECK(parse_action("INPUT_TEXT(\"a\\\"b\")").value() == Action{InputText{"a\"b"}});
  CHECK(parse_action("DELETE_TEXT()").value() == Action{DeleteText{}});
  CHECK(parse_action("OPEN_APP(\"Contacts\")").value() == Action{OpenApp{"Contacts"}});
  CHECK(parse_action("ENTER()").value() == Action{Enter{}});
  CHECK(parse_action("ANSWER(\"\")").value() == Action{Answer{""}});
  CHECK(parse_action("PRESS_BACK()").value() == Action{PressBack{}});
  CHECK(parse_action("PRESS_HOME()").value() == Action{PressHome{}});
  // Negative coordinates parse; validation rejects them later.
  CHECK(parse_action("TAP(-5,3)").value() == Action{Tap{-5, 3}});
}

TEST_CASE("parse_action rejections") {
  for (const char* bad :
       {"FLY(1,2)", "TAP(1)", "TAP(1,2,3)", "TAP(1,2", "TAP 1,2", "tap(1,2)",
        "INPUT_TEXT(John)", "INPUT_TEXT(\"unterminated", "TAP(1,2) extra", "",
        "INPUT_TEXT(\"bad\\q\")", "TAP(99999999999,1)"}) {
    auto result = parse_action(bad);
    REQUIRE_MESSAGE(!result.ok(), bad);
    CHECK(result.error().code == Errc::UnparseableAction);
  }
}

TEST_CASE("render_action canonical forms") {
  CHECK(render_action(Tap{120, 340}) == "TAP(120,340)");
  CHECK(render_action(DeleteText{}) == "DELETE_TEXT()");
  CHECK(render_action(InputText{"a\"b"}) == "INPUT_TEXT(\"a\\\"b\")");
  CHECK(render_action(Swipe{0, 0, 1080, 2400}) == "SWIPE(0,0,1080,2400)");
  CHECK(render_action(Answer{"85%"}) == "ANSWER(\"85%\")");
}

namespace {

Action random_action(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<int> coord(0, 3000);
  auto random_text = [&rng](bool allow_empty) {
    std::uniform_int_distribution<int> len(allow_empty ? 0 : 1, 24);
    std::uniform_int_distribution<int> byte(0, 255);
    // Bias towards characters that stress escaping.
    const std::string tricky = "\"\\\n\t\rαβ日();,x ";
    std::uniform_int_distribution<size_t> pick_tricky(0, tricky.size() - 1);
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i) s.push_back(tricky[pick_tricky(rng)]);
    return s;
  };
  switch (pick(rng)) {
    case 0: return Tap{coord(rng), coord(rng)};
    case 1: return Swipe{coord(rng), coord(rng), coord(rng), coord(rng)};
    case 2: return LongPress{coord(rng), coord(rng)};
    case 3: return InputText{random_text(false)};
    case 4: return DeleteText{};
    case 5: return OpenApp{random_text(false)};
    case 6: return Enter{};
    case 7: return Answer{random_text(true)};
    case 8: return PressBack{};
    default: return PressHome{};
  }
}

}  // namespace

TEST_CASE("action render/parse round-trip property") {
  std::mt19937_64 rng(20240817);
  for (int i = 0; i < 2000; ++i) {
    Action action = random_action(rng);
    auto round = parse_action(render_action(action));
    REQUIRE_MESSAGE(round.ok(), render_action(action));
    CHECK(round.value() == action);
  }
}

TEST_CASE("parse_verdict") {
  auto fail = parse_verdict("Fail: the permission dialog is covering the form");
  REQUIRE(fail.ok());
  CHECK(fail.value().verdict == Verdict::Fail);
  CHECK(fail.value().failure_summary == "the permission dialog is covering the form");

  auto pass = parse_verdict("Pass");
  REQUIRE(pass.ok());
  CHECK(pass.value().verdict == Verdict::Pass);
  CHECK(pass.value().failure_summary.empty());

  auto pass_trailing = parse_verdict("pass, everything looks right\nmore text");
  REQUIRE(pass_trailing.ok());
  CHECK(pass_trailing.value().verdict == Verdict::Pass);
  CHECK(pass_trailing.value().failure_summary.empty());

  auto multiline_fail = parse_verdict("FAIL\nthe screen is wrong");
  REQUIRE(multiline_fail.ok());
  CHECK(multiline_fail.value().verdict == Verdict::Fail);
  CHECK(multiline_fail.value().failure_summary == "the screen is wrong");

  auto bare_fail = parse_verdict("Fail");
  REQUIRE(bare_fail.ok());
  CHECK_FALSE(bare_fail.value().failure_summary.empty());

  for (const char* bad : {"maybe", "", "Failure to parse", "Passable"}) {
    auto result = parse_verdict(bad);
    REQUIRE_MESSAGE(!result.ok(), bad);
    CHECK(result.error().code == Errc::UnparseableVerdict);
  }
}

TEST_CASE("measure_uplink") {
  UplinkMessage replan{UplinkKind::ReplanRequest, std::string(900, 'x'), 0};
  CHECK(measure_uplink(replan) == 900);

  UplinkMessage plan{UplinkKind::PlanRequest, std::string(500, 'x'), 100000};
  CHECK(measure_uplink(plan) == 100500);

  UplinkMessage empty{UplinkKind::PlanRequest, "", 0};
  CHECK(measure_uplink(empty) == 0);
}

TEST_CASE("make_uplink_message replan carries text only") {
  auto message = make_uplink_message(UplinkKind::ReplanRequest, "t1", "sys", "user", 0);
  CHECK(message.attached_image_bytes == 0);
  CHECK(measure_uplink(message) == static_cast<std::int64_t>(message.body.size()));
  CHECK(message.body.find("replan_request") != std::string::npos);
  CHECK(message.body.find("t1") != std::string::npos);
}

TEST_CASE("parsers return typed errors on garbage (mini fuzz)") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> len(0, 200);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 3000; ++i) {
    std::string garbage;
    int n = len(rng);
    for (int j = 0; j < n; ++j) garbage.push_back(static_cast<char>(byte(rng)));
    (void)parse_planner_response(garbage);
    (void)parse_replanner_response(garbage);
    (void)parse_action(garbage);
    (void)parse_verdict(garbage);
  }
  CHECK(true);  // reaching here without a crash is the assertion
}
