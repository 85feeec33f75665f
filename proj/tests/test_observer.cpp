#include <doctest.h>

#include "ecoagent/observer.hpp"
#include "ecoagent/prompts.hpp"

using namespace ecoagent;

namespace {

Screen form_screen() {
  Screen screen;
  screen.screen_id = "form";
  screen.width_px = 1080;
  screen.height_px = 2400;
  screen.payload = "{\"screen\":\"form\"}";
  screen.payload_bytes = 100000;
  return screen;
}

ScriptedProvider make_device(std::vector<ScriptedRule> rules) {
  ProviderConfig config{ProviderRole::DeviceObserver, {}, 1400};
  return ScriptedProvider(config, std::move(rules));
}

}  // namespace

TEST_CASE("pre_understand returns a capped summary") {
  // Four sentences, comfortably inside the 50-150 token band.
  std::string text =
      "The contact form is open with name and phone fields. The name field is "
      "currently focused and empty. A save button is shown at the bottom of the "
      "form. Saving will store the new contact into the list of contacts.";
  auto device = make_device({{{}, text}});
  auto outcome = observer::pre_understand(form_screen(), device);
  REQUIRE(outcome.ok());
  CHECK_FALSE(outcome.value().truncated);
  CHECK(outcome.value().summary.text == text);
  CHECK(outcome.value().summary.token_count == count_tokens(text));
  CHECK(outcome.value().summary.token_count <= 150);
  CHECK(outcome.value().summary.token_count >= 50);
}

TEST_CASE("pre_understand truncates at a sentence boundary") {
  // ~2000 bytes: 10 sentences of ~200 bytes each.
  std::string sentence(199, 'a');
  sentence[50] = ' ';
  sentence[120] = ' ';
  std::string text;
  for (int i = 0; i < 10; ++i) text += sentence + ". ";
  REQUIRE(count_tokens(text) > 400);

  auto device = make_device({{{}, text}});
  auto outcome = observer::pre_understand(form_screen(), device);
  REQUIRE(outcome.ok());
  CHECK(outcome.value().truncated);
  CHECK(outcome.value().summary.token_count <= 150);
  // Cut lands on a sentence end.
  CHECK(outcome.value().summary.text.back() == '.');
}

TEST_CASE("pre_understand hard-cuts when the first sentence alone overflows") {
  std::string text(2000, 'x');  // no sentence boundary at all
  auto device = make_device({{{}, text}});
  auto outcome = observer::pre_understand(form_screen(), device);
  REQUIRE(outcome.ok());
  CHECK(outcome.value().truncated);
  CHECK(outcome.value().summary.token_count <= 150);
}

TEST_CASE("pre_understand rejects empty provider output") {
  auto device = make_device({{{}, "   \n  "}});
  auto outcome = observer::pre_understand(form_screen(), device);
  REQUIRE_FALSE(outcome.ok());
  CHECK(outcome.error().code == Errc::SummarizationFailed);
}

TEST_CASE("pre_understand prompt uses the screen image and fixed instructions") {
  auto request = observer::build_preunderstand_prompt(form_screen());
  CHECK(request.system == prompts::preunderstand_system());
  CHECK(image_segment_count(request) == 1);
  CHECK(request_text(request).find("3-5 sentences") != std::string::npos);
}

TEST_CASE("verify substitutes the expectation and parses the verdict") {
  auto request = observer::build_verify_prompt(form_screen(), "The dialog is gone");
  CHECK(request.system == prompts::observer_system());
  CHECK(image_segment_count(request) == 1);
  CHECK(request_text(request).find("user expectation: The dialog is gone") !=
        std::string::npos);

  SUBCASE("pass") {
    auto device = make_device({{{}, "Pass"}});
    auto verdict = observer::verify(form_screen(), "The dialog is gone", device);
    REQUIRE(verdict.ok());
    CHECK(verdict.value().verdict == Verdict::Pass);
  }
  SUBCASE("fail with summary") {
    auto device =
        make_device({{{}, "Fail: a permission popup is blocking the screen"}});
    auto verdict = observer::verify(form_screen(), "The dialog is gone", device);
    REQUIRE(verdict.ok());
    CHECK(verdict.value().verdict == Verdict::Fail);
    CHECK(verdict.value().failure_summary == "a permission popup is blocking the screen");
  }
  SUBCASE("gibberish is VerificationFailed") {
    auto device = make_device({{{}, "sdrawkcab si neercs eht"}});
    auto verdict = observer::verify(form_screen(), "The dialog is gone", device);
    REQUIRE_FALSE(verdict.ok());
    CHECK(verdict.error().code == Errc::VerificationFailed);
  }
}

TEST_CASE("summary-vs-image token economy") {
  std::string text =
      "The settings screen lists several categories including display and sound. "
      "Each category opens a page of related options. Nothing is currently "
      "selected. The search bar at the top finds options by name.";
  auto device = make_device({{{}, text}});
  auto outcome = observer::pre_understand(form_screen(), device);
  REQUIRE(outcome.ok());
  CHECK(outcome.value().summary.token_count < 1400);
  CHECK(1400 / outcome.value().summary.token_count >= 9);
}
