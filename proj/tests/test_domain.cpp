#include <doctest.h>

#include "ecoagent/domain.hpp"

using namespace ecoagent;

TEST_CASE("canonical_action_kind maps the full planner vocabulary") {
  CHECK(canonical_action_kind("DELETE").value() == ActionKind::DeleteText);
  CHECK(canonical_action_kind("TAP").value() == ActionKind::Tap);
  CHECK(canonical_action_kind("SWIPE").value() == ActionKind::Swipe);
  CHECK(canonical_action_kind("INPUT").value() == ActionKind::InputText);
  CHECK(canonical_action_kind("ENTER").value() == ActionKind::Enter);
  CHECK(canonical_action_kind("ANSWER").value() == ActionKind::Answer);
  CHECK(canonical_action_kind("OPEN_APP").value() == ActionKind::OpenApp);
  CHECK(canonical_action_kind("PRESS_BACK").value() == ActionKind::PressBack);
  CHECK(canonical_action_kind("PRESS_HOME").value() == ActionKind::PressHome);

  // Total on the vocabulary array itself.
  for (auto keyword : kPlannerVocabulary) {
    CHECK(canonical_action_kind(keyword).ok());
  }
}

TEST_CASE("canonical_action_kind rejects everything else") {
  for (auto bad : {"SCROLL", "tap", "LONG_PRESS", "", "TAP ", "DELETE_TEXT"}) {
    auto result = canonical_action_kind(bad);
    REQUIRE_FALSE(result.ok());
    CHECK(result.error().code == Errc::UnknownActionKeyword);
  }
}

TEST_CASE("extract_step_keyword") {
  CHECK(extract_step_keyword("Tap the 'Save' button").value() == "TAP");
  CHECK(extract_step_keyword("Input 'John' into the First name field").value() == "INPUT");
  CHECK(extract_step_keyword("Open app 'Contacts'").value() == "OPEN_APP");
  CHECK(extract_step_keyword("Press back to leave the menu").value() == "PRESS_BACK");
  CHECK(extract_step_keyword("Delete the text in the Title field").value() == "DELETE");
  CHECK(extract_step_keyword("Answer with the battery level").value() == "ANSWER");

  // A leading keyword wins even when other keywords appear later.
  CHECK(extract_step_keyword("Input the name and tap Next").value() == "INPUT");
  // Tapping is not TAP; no keyword at all.
  CHECK_FALSE(extract_step_keyword("Tapping around aimlessly").has_value());
}

TEST_CASE("extract_step_keyword ambiguity rules") {
  // Keyword not at start and not unique -> no extraction.
  CHECK_FALSE(extract_step_keyword("you should tap here or swipe there").has_value());
  // Keyword not at start but unique -> extracted.
  CHECK(extract_step_keyword("please tap the button").value() == "TAP");
}

TEST_CASE("validate_action bounds checking") {
  Screen screen;
  screen.width_px = 1080;
  screen.height_px = 2400;

  CHECK(validate_action(Tap{120, 340}, screen).ok);
  CHECK_FALSE(validate_action(Tap{2000, 10}, screen).ok);
  // Boundary inclusive.
  CHECK(validate_action(Swipe{0, 0, 1080, 2400}, screen).ok);
  CHECK_FALSE(validate_action(Swipe{0, 0, 1081, 2400}, screen).ok);
  CHECK_FALSE(validate_action(LongPress{-1, 5}, screen).ok);

  CHECK_FALSE(validate_action(InputText{""}, screen).ok);
  CHECK(validate_action(InputText{"x"}, screen).ok);
  CHECK(validate_action(Answer{""}, screen).ok);  // Answer may be empty
  CHECK(validate_action(DeleteText{}, screen).ok);
  CHECK(validate_action(PressHome{}, screen).ok);
  CHECK_FALSE(validate_action(OpenApp{""}, screen).ok);
}

TEST_CASE("action equality") {
  CHECK(Action{Tap{1, 2}} == Action{Tap{1, 2}});
  CHECK_FALSE(Action{Tap{1, 2}} == Action{Tap{1, 3}});
  CHECK_FALSE(Action{Tap{1, 2}} == Action{LongPress{1, 2}});
  CHECK(Action{InputText{"a"}} == Action{InputText{"a"}});
  CHECK(Action{DeleteText{}} == Action{DeleteText{}});
}
