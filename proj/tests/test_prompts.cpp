#include <doctest.h>

#include <openssl/evp.h>

#include <cstdio>
#include <map>

#include "ecoagent/prompts.hpp"
#include "ecoagent/util.hpp"

using namespace ecoagent;

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace

TEST_CASE("embedded templates match the versioned assets byte for byte") {
  for (const auto& asset : prompts::template_assets()) {
    auto file = read_file("assets/prompts/" + std::string(asset.file_name));
    REQUIRE_MESSAGE(file.has_value(), asset.file_name);
    CHECK_MESSAGE(*file == asset.content, asset.file_name);
  }
}

TEST_CASE("checksum manifest guards template drift") {
  auto manifest = read_file("assets/prompts/CHECKSUMS.sha256");
  REQUIRE(manifest.has_value());
  std::map<std::string, std::string> expected;  // file -> sha256
  for (const auto& line : split_lines(*manifest)) {
    if (trim(line).empty()) continue;
    auto hex = line.substr(0, 64);
    auto name = std::string(trim(line.substr(64)));
    expected[name] = hex;
  }
  REQUIRE(expected.size() == prompts::template_assets().size());
  for (const auto& asset : prompts::template_assets()) {
    auto it = expected.find(std::string(asset.file_name));
    REQUIRE_MESSAGE(it != expected.end(), asset.file_name);
    CHECK_MESSAGE(sha256_hex(asset.content) == it->second, asset.file_name);
  }
}

TEST_CASE("golden template hashes") {
  // Frozen once from the transcribed templates.
  CHECK(sha256_hex(prompts::planner_user_template()) ==
        "b6414c0882110da99a62a72b4e48c9a43e159ebfe00ddb48192c3e033b62572e");
  CHECK(sha256_hex(prompts::replanner_user_template()) ==
        "d93f858502e3c588c8293a1aa7367a21f618cad97aea911131b2c42899f38b4e");
}

TEST_CASE("planner template structure") {
  auto t = prompts::planner_user_template();
  CHECK(t.find("{instruction}") != std::string_view::npos);
  CHECK(t.find("Description: <") != std::string_view::npos);
  CHECK(t.find("Thought: <") != std::string_view::npos);
  CHECK(t.find("Plan: <") != std::string_view::npos);
  // The initial-planning action list stops at DELETE.
  CHECK(t.find("7. DELETE") != std::string_view::npos);
  CHECK(t.find("PRESS_BACK") == std::string_view::npos);
}

TEST_CASE("replanner template structure") {
  auto t = prompts::replanner_user_template();
  for (const char* slot : {"{instruction}", "{original_plan}", "{descriptions}",
                           "{description}", "{summary}"}) {
    CHECK_MESSAGE(t.find(slot) != std::string_view::npos, slot);
  }
  // The replanning action list adds the navigation operations.
  CHECK(t.find("8. PRESS_BACK") != std::string_view::npos);
  CHECK(t.find("9. PRESS_HOME") != std::string_view::npos);
  CHECK(t.find("No need to replan.") != std::string_view::npos);
}

TEST_CASE("render_template substitution and brace escapes") {
  CHECK(prompts::render_template("a {x} b", {{"x", "X"}}) == "a X b");
  CHECK(prompts::render_template("{{\"Step1\": {x}}}", {{"x", "V"}}) ==
        "{\"Step1\": V}");
  // Unknown slots stay verbatim.
  CHECK(prompts::render_template("keep {unknown}", {}) == "keep {unknown}");
  // The planner template renders to single-braced JSON examples.
  auto rendered = prompts::render_template(prompts::planner_user_template(),
                                           {{"instruction", "Create a new contact"}});
  CHECK(rendered.find("please help me with: Create a new contact") != std::string::npos);
  CHECK(rendered.find("{{") == std::string::npos);
  CHECK(rendered.find("\"Step1\": {\"thought\"") != std::string::npos);
}

TEST_CASE("render_plan_json emits numeric step order") {
  Plan plan;
  for (int i = 1; i <= 11; ++i) {
    plan.steps.push_back(PlanStep{i, "t", "Tap thing " + std::to_string(i), "e"});
  }
  auto rendered = prompts::render_plan_json(plan);
  CHECK(rendered.find("\"Step1\":") != std::string::npos);
  CHECK(rendered.find("\"Step11\":") != std::string::npos);
  CHECK(rendered.find("\"Step2\":") < rendered.find("\"Step10\":"));
  // Round-trips through the plan parser shape.
  CHECK(rendered.front() == '{');
  CHECK(rendered.back() == '}');
}
