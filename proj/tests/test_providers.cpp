#include <doctest.h>

#include "ecoagent/providers.hpp"

using namespace ecoagent;

TEST_CASE("count_tokens is ceil(bytes/4)") {
  CHECK(count_tokens("") == 0);
  CHECK(count_tokens("abcdefgh") == 2);  // 8 bytes
  CHECK(count_tokens("word") == 1);      // 4 bytes
  CHECK(count_tokens("words") == 2);     // 5 bytes
  // Monotone in byte length.
  std::string s;
  std::int64_t prev = 0;
  for (int i = 0; i < 64; ++i) {
    s.push_back('a');
    auto now = count_tokens(s);
    CHECK(now >= prev);
    prev = now;
  }
}

TEST_CASE("prompt token accounting") {
  ProviderConfig config;
  config.image_token_cost = 1400;
  ScriptedProvider provider(config, {{{}, "ok"}});

  CompletionRequest request;
  request.user_segments.push_back(ImageSegment{"payload", 100000});
  request.user_segments.push_back(TextSegment{std::string(400, 'x')});  // 100 tokens

  auto completion = provider.complete(request);
  REQUIRE(completion.ok());
  CHECK(completion.value().usage.prompt_tokens == 1500);

  // Empty text plus one 4-char word -> exactly 1 token.
  CompletionRequest tiny;
  tiny.user_segments.push_back(TextSegment{""});
  tiny.user_segments.push_back(TextSegment{"word"});
  auto tiny_completion = provider.complete(tiny);
  REQUIRE(tiny_completion.ok());
  CHECK(tiny_completion.value().usage.prompt_tokens == 1);

  // prompt_tokens >= 1400 * image count with the default config.
  CompletionRequest two_images;
  two_images.user_segments.push_back(ImageSegment{"a", 1});
  two_images.user_segments.push_back(ImageSegment{"b", 1});
  auto two = provider.complete(two_images);
  REQUIRE(two.ok());
  CHECK(two.value().usage.prompt_tokens >= 2800);
}

TEST_CASE("scripted provider rule semantics") {
  ProviderConfig config;
  ScriptedProvider provider(config);
  provider.add_rule("help me with: AddContact", "the add-contact plan");
  provider.add_rule("help me with:", "the generic plan");

  CompletionRequest request;
  request.user_segments.push_back(TextSegment{"please help me with: AddContact now"});
  auto hit = provider.complete(request);
  REQUIRE(hit.ok());
  CHECK(hit.value().text == "the add-contact plan");

  // Earlier rule wins for overlapping matches.
  CompletionRequest generic;
  generic.user_segments.push_back(TextSegment{"please help me with: other"});
  CHECK(provider.complete(generic).value().text == "the generic plan");

  // No rules matched.
  CompletionRequest miss;
  miss.user_segments.push_back(TextSegment{"unrelated"});
  auto missed = provider.complete(miss);
  REQUIRE_FALSE(missed.ok());
  CHECK(missed.error().code == Errc::RuleMiss);

  // Zero rules -> every call misses.
  ScriptedProvider empty(config);
  CHECK(empty.complete(miss).error().code == Errc::RuleMiss);
}

TEST_CASE("ordered multi-needle matching") {
  ScriptedRule rule{{"alpha", "beta"}, "r"};
  CHECK(rule_matches(rule, "xx alpha yy beta zz"));
  CHECK_FALSE(rule_matches(rule, "beta then alpha"));
  CHECK_FALSE(rule_matches(rule, "alpha only"));
  // Needles may not overlap.
  CHECK_FALSE(rule_matches(ScriptedRule{{"aba", "ab"}, "r"}, "abab"));
  CHECK(rule_matches(ScriptedRule{{}, "r"}, "anything"));
}

TEST_CASE("scripted provider matches against image payloads too") {
  ProviderConfig config;
  ScriptedProvider provider(config);
  provider.add_rule("\"screen\":\"editor\"", "Pass");

  CompletionRequest request;
  request.user_segments.push_back(ImageSegment{"{\"screen\":\"editor\"}", 1000});
  request.user_segments.push_back(TextSegment{"judge it"});
  CHECK(provider.complete(request).ok());
}

TEST_CASE("scripted provider determinism") {
  ProviderConfig config;
  config.latency = {1000, 2};
  ScriptedProvider provider(config, {{{}, "fixed response"}});
  CompletionRequest request;
  request.system = "s";
  request.user_segments.push_back(TextSegment{"hello"});

  auto first = provider.complete(request);
  auto second = provider.complete(request);
  REQUIRE(first.ok());
  REQUIRE(second.ok());
  CHECK(first.value().text == second.value().text);
  CHECK(first.value().usage.prompt_tokens == second.value().usage.prompt_tokens);
  CHECK(first.value().synthetic_latency_us == second.value().synthetic_latency_us);
}

TEST_CASE("latency model is additive in tokens") {
  LatencyModel model{500, 3};
  Usage usage{100, 50};
  CHECK(synthetic_latency_us(model, usage) == 500 + 3 * 150);
  CHECK(synthetic_latency_us(LatencyModel{}, usage) == 0);
}

TEST_CASE("wiretap counts calls, tokens and image bytes") {
  ProviderConfig config;
  ScriptedProvider inner(config, {{{}, "resp"}});
  WiretapProvider tap(inner);

  CompletionRequest request;
  request.user_segments.push_back(ImageSegment{"img", 12345});
  request.user_segments.push_back(TextSegment{"text"});

  CHECK(tap.calls() == 0);
  auto completion = tap.complete(request);
  REQUIRE(completion.ok());
  CHECK(tap.calls() == 1);
  CHECK(tap.total_image_bytes() == 12345);
  CHECK(tap.total_tokens() == completion.value().usage.prompt_tokens +
                                  completion.value().usage.completion_tokens);
}

TEST_CASE("load_scripted_rules") {
  auto rules = load_scripted_rules("configs/oracles/contacts.ground.json");
  REQUIRE(rules.ok());
  CHECK(rules.value().size() >= 10);

  auto missing = load_scripted_rules("configs/oracles/does_not_exist.json");
  REQUIRE_FALSE(missing.ok());
  CHECK(missing.error().code == Errc::ConfigInvalid);
}
