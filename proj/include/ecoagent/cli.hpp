#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ecoagent/orchestrator.hpp"
#include "ecoagent/result.hpp"

namespace ecoagent::cli {

struct RunOverrides {
  std::optional<int> parallel;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_actions;
  std::optional<int> max_replans;
  std::optional<std::string> mode;  // "closed-loop" | "upload-baseline"
};

/// Everything a suite run needs, built from a config file. Providers are
/// owned here; the suite config points into this object.
struct LoadedConfig {
  sim::WorldFixture fixture;
  std::unique_ptr<Provider> cloud;
  std::unique_ptr<Provider> device_executor;
  std::unique_ptr<Provider> device_observer;
  orch::SuiteConfig suite;
  int parallelism = 1;
};

Result<std::unique_ptr<LoadedConfig>> load_config(const std::string& config_path,
                                                  const RunOverrides& overrides);

/// Runs the suite and writes report.json/report.md/report.csv plus one trace
/// per episode under <out_dir>/traces/. Exit 0 on completion regardless of
/// SR; 2 on configuration errors.
int cmd_run(const std::string& config_path, const std::string& out_dir,
            const RunOverrides& overrides = {});

/// Loads a fixture, checks every structural invariant and brute-forces task
/// reachability. Exit 0 when clean, 1 with the first violation.
int cmd_validate(const std::string& fixture_path);

/// Re-executes a recorded episode, feeding back the recorded completions, and
/// compares the regenerated event stream with the recorded one. Exit 0 on an
/// exact match, 1 naming the first divergent event.
int cmd_replay(const std::string& trace_path);

/// Runs the configured suite in closed-loop and upload-baseline modes and
/// reports uplink/MT/latency ratios. Exit codes as cmd_run.
int cmd_compare(const std::string& config_path, const std::string& out_dir,
                const RunOverrides& overrides = {});

}  // namespace ecoagent::cli
