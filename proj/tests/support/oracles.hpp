#pragma once

#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "ecoagent/orchestrator.hpp"
#include "ecoagent/providers.hpp"
#include "ecoagent/simenv.hpp"

namespace testsupport {

// Default latencies mirror the bundled configs: 3 s per cloud call,
// 0.3 s per device call.
inline constexpr std::int64_t kCloudFixedUs = 3'000'000;
inline constexpr std::int64_t kDeviceFixedUs = 300'000;

std::vector<ecoagent::ScriptedRule> load_rules(const std::vector<std::string>& paths);

/// The bundled per-fixture oracle providers, wired exactly like the
/// configs/<fixture>_eval.json files.
struct Oracle {
  ecoagent::sim::WorldFixture fixture;
  std::unique_ptr<ecoagent::ScriptedProvider> cloud;
  std::unique_ptr<ecoagent::ScriptedProvider> device_executor;
  std::unique_ptr<ecoagent::ScriptedProvider> device_observer;

  ecoagent::orch::ProviderBindings bindings() {
    return {cloud.get(), device_executor.get(), device_observer.get()};
  }
};

Oracle make_oracle(const std::string& fixture_name);

/// Executor decorator that replaces a seeded fraction of groundings with a
/// TAP into dead screen space, emulating visual-grounding misses.
class SabotagedExecutor : public ecoagent::Provider {
public:
  SabotagedExecutor(ecoagent::Provider& inner, double miss_rate, std::uint64_t seed)
      : inner_(inner), miss_rate_(miss_rate), rng_(seed) {}

  ecoagent::Result<ecoagent::Completion> complete(
      const ecoagent::CompletionRequest& request) override;
  const ecoagent::ProviderConfig& config() const override { return inner_.config(); }

private:
  ecoagent::Provider& inner_;
  double miss_rate_;
  std::mutex mu_;
  std::mt19937_64 rng_;
};

}  // namespace testsupport
