#include "support/oracles.hpp"

#include <stdexcept>

namespace testsupport {

using namespace ecoagent;

std::vector<ScriptedRule> load_rules(const std::vector<std::string>& paths) {
  std::vector<ScriptedRule> rules;
  for (const auto& path : paths) {
    auto loaded = load_scripted_rules(path);
    if (!loaded.ok()) {
      throw std::runtime_error("cannot load rules: " + loaded.error().to_string());
    }
    for (auto& rule : loaded.value()) rules.push_back(std::move(rule));
  }
  return rules;
}

Oracle make_oracle(const std::string& fixture_name) {
  Oracle oracle;
  auto fixture = sim::load_fixture("fixtures/" + fixture_name + ".json");
  if (!fixture.ok()) {
    throw std::runtime_error("cannot load fixture: " + fixture.error().to_string());
  }
  oracle.fixture = std::move(fixture.value());

  const std::string base = "configs/oracles/" + fixture_name;
  ProviderConfig cloud_config{ProviderRole::Cloud, {kCloudFixedUs, 0}, 1400};
  ProviderConfig executor_config{ProviderRole::DeviceExecutor, {kDeviceFixedUs, 0}, 1400};
  ProviderConfig observer_config{ProviderRole::DeviceObserver, {kDeviceFixedUs, 0}, 1400};

  oracle.cloud = std::make_unique<ScriptedProvider>(
      cloud_config, load_rules({base + ".plan.json", base + ".verify.json"}));
  oracle.device_executor = std::make_unique<ScriptedProvider>(
      executor_config, load_rules({base + ".ground.json"}));
  oracle.device_observer = std::make_unique<ScriptedProvider>(
      observer_config, load_rules({base + ".verify.json", base + ".summaries.json"}));
  return oracle;
}

Result<Completion> SabotagedExecutor::complete(const CompletionRequest& request) {
  bool miss = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    miss = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < miss_rate_;
  }
  if (!miss) return inner_.complete(request);
  Completion completion;
  completion.text = "TAP(5,5)";  // dead corner: hits no element on any screen
  completion.usage.prompt_tokens =
      prompt_token_count(request, inner_.config().image_token_cost);
  completion.usage.completion_tokens = count_tokens(completion.text);
  completion.synthetic_latency_us =
      synthetic_latency_us(inner_.config().latency, completion.usage);
  return completion;
}

}  // namespace testsupport
