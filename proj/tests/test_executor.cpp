#include <doctest.h>

#include "ecoagent/executor.hpp"

using namespace ecoagent;

namespace {

Screen editor_screen() {
  Screen screen;
  screen.screen_id = "contact_editor";
  screen.width_px = 1080;
  screen.height_px = 2400;
  screen.payload = "{\"screen\":\"contact_editor\"}";
  screen.payload_bytes = 100000;
  return screen;
}

ScriptedProvider make_device(std::vector<ScriptedRule> rules) {
  ProviderConfig config{ProviderRole::DeviceExecutor, {}, 1400};
  return ScriptedProvider(config, std::move(rules));
}

}  // namespace

TEST_CASE("grounding prompt carries screen and step but not the expectation") {
  PlanStep step{3, "thought", "Tap the Save button", "The editor closes"};
  auto request = executor::build_grounding_prompt(editor_screen(), step);

  REQUIRE(request.user_segments.size() == 2);
  CHECK(image_segment_count(request) == 1);
  const auto& text = std::get<TextSegment>(request.user_segments[1]).text;
  CHECK(text.find("Execute: Tap the Save button") != std::string::npos);
  CHECK(text.find("exactly one action call") != std::string::npos);
  CHECK(request_text(request).find("The editor closes") == std::string::npos);
}

TEST_CASE("execute_step parses and validates the grounded action") {
  auto device = make_device({{{"Execute: Tap the Save button"}, "TAP(540,1200)"}});
  PlanStep step{1, "t", "Tap the Save button", "e"};
  auto action = executor::execute_step(editor_screen(), step, device);
  REQUIRE(action.ok());
  CHECK(action.value() == Action{Tap{540, 1200}});
}

TEST_CASE("execute_step DELETE_TEXT grounding") {
  auto device = make_device({{{"Delete the text"}, "DELETE_TEXT()"}});
  PlanStep step{1, "t", "Delete the text in the name field", "e"};
  auto action = executor::execute_step(editor_screen(), step, device);
  REQUIRE(action.ok());
  CHECK(kind_of(action.value()) == ActionKind::DeleteText);
}

TEST_CASE("execute_step failures are GroundingFailed") {
  PlanStep step{1, "t", "Tap the Save button", "e"};

  SUBCASE("out-of-bounds action") {
    auto device = make_device({{{}, "TAP(2000,10)"}});
    auto action = executor::execute_step(editor_screen(), step, device);
    REQUIRE_FALSE(action.ok());
    CHECK(action.error().code == Errc::GroundingFailed);
  }
  SUBCASE("unparseable action") {
    auto device = make_device({{{}, "FLY(1,2)"}});
    auto action = executor::execute_step(editor_screen(), step, device);
    REQUIRE_FALSE(action.ok());
    CHECK(action.error().code == Errc::GroundingFailed);
  }
  SUBCASE("provider miss") {
    auto device = make_device({});
    auto action = executor::execute_step(editor_screen(), step, device);
    REQUIRE_FALSE(action.ok());
    CHECK(action.error().code == Errc::GroundingFailed);
  }
}

TEST_CASE("execute_step is referentially transparent under a scripted provider") {
  auto device = make_device({{{"Tap the Save button"}, "TAP(10,20)"}});
  PlanStep step{1, "t", "Tap the Save button", "e"};
  auto first = executor::execute_step(editor_screen(), step, device);
  auto second = executor::execute_step(editor_screen(), step, device);
  REQUIRE(first.ok());
  REQUIRE(second.ok());
  CHECK(first.value() == second.value());
}
