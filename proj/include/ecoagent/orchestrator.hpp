#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ecoagent/domain.hpp"
#include "ecoagent/providers.hpp"
#include "ecoagent/simenv.hpp"
#include "ecoagent/trace.hpp"

namespace ecoagent::orch {

/// ClosedLoop verifies and summarizes on-device; UploadBaseline routes every
/// verification to the cloud with a raw-size screenshot attached and disables
/// pre-understanding (emulated screenshot-per-step architecture).
enum class Mode { ClosedLoop, UploadBaseline };

std::string_view mode_name(Mode mode);

enum class ClockKind { Virtual, Real };

struct ProviderBindings {
  Provider* cloud = nullptr;
  Provider* device_executor = nullptr;
  Provider* device_observer = nullptr;
};

struct EpisodeConfig {
  const sim::WorldFixture* fixture = nullptr;
  std::string fixture_path;  // provenance for trace replay; may be empty
  std::string task_id;
  std::uint64_t seed = 0;
  int max_total_actions = 30;
  int max_replans = 3;
  int summary_token_cap = 150;
  Mode mode = Mode::ClosedLoop;
  ClockKind clock = ClockKind::Virtual;
  ProviderBindings providers;
};

struct EpisodeResult {
  sim::WorldState final_state;
  EpisodeMetrics metrics;
  std::vector<trace::TraceEvent> trace;
  bool success_claimed = false;
  std::string termination;
};

/// Algorithm: initial summary and plan, then per step execute -> verify ->
/// compress -> memory-update; failed verifications trigger reflection-based
/// replanning that restarts at the new plan's first step. Internal faults
/// never escape; they terminate the episode with a classified failure.
EpisodeResult run_episode(const EpisodeConfig& config);

/// Reads the recorded event stream and assigns one of the four failure
/// classes. Only meaningful for unsuccessful episodes.
FailureClass classify_failure(const std::vector<trace::TraceEvent>& trace);

// ---------------------------------------------------------------------------
// Replay

/// Serves the completions recorded in a trace, in order, checking each
/// request digest against the recorded one.
class ReplayProvider : public Provider {
public:
  struct Recorded {
    std::string request_fnv;
    Completion completion;
  };

  ReplayProvider(ProviderConfig config, std::deque<Recorded> completions)
      : config_(config), completions_(std::move(completions)) {}

  Result<Completion> complete(const CompletionRequest& request) override;
  const ProviderConfig& config() const override { return config_; }

  size_t remaining() const { return completions_.size(); }

private:
  ProviderConfig config_;
  std::deque<Recorded> completions_;
};

/// Splits a recorded trace into per-role completion queues for replay.
std::map<std::string, std::deque<ReplayProvider::Recorded>> recorded_completions(
    const std::vector<trace::TraceEvent>& trace);

// ---------------------------------------------------------------------------
// Suites

struct SuiteConfig {
  const sim::WorldFixture* fixture = nullptr;
  std::string fixture_path;
  std::vector<std::string> task_ids;
  std::vector<std::uint64_t> seeds;  // one episode per (task, seed)
  int max_total_actions = 30;
  int max_replans = 3;
  int summary_token_cap = 150;
  Mode mode = Mode::ClosedLoop;
  ClockKind clock = ClockKind::Virtual;
  ProviderBindings providers;
};

struct EpisodeRow {
  std::string task_id;
  std::uint64_t seed = 0;
  bool success = false;
  int mc = 0;
  std::int64_t mt = 0;
  double mean_step_latency_us = 0.0;
  std::int64_t uplink_bytes = 0;
  int replans = 0;
  int steps_executed = 0;
  FailureClass failure_class = FailureClass::None;
};

struct SuiteReport {
  Mode mode = Mode::ClosedLoop;
  std::vector<EpisodeRow> rows;
  int episodes = 0;
  double sr = 0.0;                  // fraction in [0,1]
  double mean_mc = 0.0;
  double mean_mt = 0.0;
  double mean_step_latency_us = 0.0;  // over all steps of all episodes
  double mean_uplink_bytes = 0.0;
  std::map<std::string, int> failure_histogram;
};

struct SuiteRun {
  SuiteReport report;
  std::vector<EpisodeResult> episodes;  // same order as report.rows
};

/// Episodes are independent: fresh world state per run, providers shared.
/// The row order (tasks x seeds, input order) and therefore the report are
/// identical at any parallelism.
SuiteRun run_suite(const SuiteConfig& config, int parallelism = 1);

}  // namespace ecoagent::orch
