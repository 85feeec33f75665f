#include "ecoagent/orchestrator.hpp"

#include <atomic>
#include <thread>

#include "ecoagent/clock.hpp"
#include "ecoagent/executor.hpp"
#include "ecoagent/observer.hpp"
#include "ecoagent/planner.hpp"
#include "ecoagent/prompts.hpp"
#include "ecoagent/protocol.hpp"
#include "ecoagent/util.hpp"

namespace ecoagent::orch {

using nlohmann::json;
using protocol::UplinkKind;

std::string_view mode_name(Mode mode) {
  return mode == Mode::ClosedLoop ? "closed-loop" : "upload-baseline";
}

namespace {

std::string_view role_tag(ProviderRole role) {
  switch (role) {
    case ProviderRole::Cloud: return "cloud";
    case ProviderRole::DeviceExecutor: return "executor";
    case ProviderRole::DeviceObserver: return "observer";
  }
  return "cloud";
}

/// Shared episode bookkeeping: trace, clock, and the cloud-call counters.
struct EpisodeContext {
  Clock* clock = nullptr;
  std::vector<trace::TraceEvent> trace;
  int seq = 0;
  int mc = 0;
  std::int64_t mt = 0;
  std::int64_t uplink_bytes = 0;

  void emit(std::string kind, json payload) {
    trace.push_back(trace::TraceEvent{seq++, std::move(kind), clock->now_us(),
                                      std::move(payload)});
  }

  void send_uplink(UplinkKind kind, const std::string& task_id,
                   const CompletionRequest& request, std::int64_t image_bytes) {
    std::string user_text;
    for (const auto& segment : request.user_segments) {
      if (const auto* text = std::get_if<TextSegment>(&segment)) {
        user_text += text->text;
      }
    }
    auto message =
        protocol::make_uplink_message(kind, task_id, request.system, user_text, image_bytes);
    uplink_bytes += protocol::measure_uplink(message);
    emit("uplink", json{{"kind", std::string(protocol::uplink_kind_name(kind))},
                        {"body_bytes", static_cast<std::int64_t>(message.body.size())},
                        {"image_bytes", message.attached_image_bytes}});
  }
};

/// Provider decorator that drives the clock, records completions into the
/// trace, and accumulates MC/MT for cloud calls.
class RecordingProvider : public Provider {
public:
  RecordingProvider(Provider& inner, ProviderRole role, EpisodeContext& ctx)
      : inner_(inner), role_(role), ctx_(ctx) {}

  Result<Completion> complete(const CompletionRequest& request) override {
    if (role_ == ProviderRole::Cloud) ++ctx_.mc;
    auto result = inner_.complete(request);
    const std::string digest = fnv1a64_hex(request_text(request));
    if (result.ok()) {
      const Completion& completion = result.value();
      ctx_.clock->advance_us(completion.synthetic_latency_us);
      if (role_ == ProviderRole::Cloud) {
        ctx_.mt += completion.usage.prompt_tokens + completion.usage.completion_tokens;
      }
      ctx_.emit("completion",
                json{{"role", std::string(role_tag(role_))},
                     {"request_fnv", digest},
                     {"text", completion.text},
                     {"prompt_tokens", completion.usage.prompt_tokens},
                     {"completion_tokens", completion.usage.completion_tokens},
                     {"latency_us", completion.synthetic_latency_us}});
    } else {
      ctx_.emit("provider_error", json{{"role", std::string(role_tag(role_))},
                                       {"request_fnv", digest},
                                       {"error", result.error().to_string()}});
    }
    return result;
  }

  const ProviderConfig& config() const override { return inner_.config(); }

private:
  Provider& inner_;
  ProviderRole role_;
  EpisodeContext& ctx_;
};

json plan_to_json(const Plan& plan) {
  json steps = json::array();
  for (const auto& step : plan.steps) {
    steps.push_back(json{{"index", step.index},
                         {"thought", step.thought},
                         {"step", step.step},
                         {"expectation", step.expectation}});
  }
  return json{{"revision", plan.revision}, {"steps", std::move(steps)}};
}

constexpr const char* kBaselineSummaryText =
    "(raw screenshot uploaded; no on-device summary)";

}  // namespace

EpisodeResult run_episode(const EpisodeConfig& config) {
  VirtualClock virtual_clock;
  RealClock real_clock;
  Clock* clock = config.clock == ClockKind::Virtual
                     ? static_cast<Clock*>(&virtual_clock)
                     : static_cast<Clock*>(&real_clock);

  EpisodeContext ctx;
  ctx.clock = clock;

  RecordingProvider cloud(*config.providers.cloud, ProviderRole::Cloud, ctx);
  RecordingProvider device_executor(*config.providers.device_executor,
                                    ProviderRole::DeviceExecutor, ctx);
  RecordingProvider device_observer(*config.providers.device_observer,
                                    ProviderRole::DeviceObserver, ctx);

  const sim::WorldFixture& fixture = *config.fixture;
  const sim::Task* task = fixture.find_task(config.task_id);

  EpisodeResult result;
  result.termination = "config_error";

  ctx.emit("episode_start", json{{"task_id", config.task_id},
                                 {"fixture", fixture.name},
                                 {"fixture_path", config.fixture_path},
                                 {"seed", config.seed},
                                 {"max_total_actions", config.max_total_actions},
                                 {"max_replans", config.max_replans},
                                 {"summary_token_cap", config.summary_token_cap},
                                 {"mode", std::string(mode_name(config.mode))},
                                 {"clock", config.clock == ClockKind::Virtual
                                               ? "virtual"
                                               : "real"}});

  sim::WorldState state = sim::reset(fixture, config.seed, config.task_id);
  EpisodeMetrics metrics;
  std::string termination;
  bool success_claimed = false;

  auto finish = [&]() -> EpisodeResult& {
    metrics.mc = ctx.mc;
    metrics.mt = ctx.mt;
    metrics.uplink_bytes = ctx.uplink_bytes;
    metrics.success =
        task != nullptr && sim::evaluate_success(fixture, state, *task);
    ctx.emit("termination",
             json{{"reason", termination}, {"success_claimed", success_claimed}});
    metrics.failure_class =
        metrics.success ? FailureClass::None : classify_failure(ctx.trace);
    ctx.emit("episode_end",
             json{{"success", metrics.success},
                  {"success_claimed", success_claimed},
                  {"termination", termination},
                  {"mc", metrics.mc},
                  {"mt", metrics.mt},
                  {"uplink_bytes", metrics.uplink_bytes},
                  {"replans", metrics.replans},
                  {"steps_executed", metrics.steps_executed},
                  {"failure_class", std::string(failure_class_name(metrics.failure_class))},
                  {"final_state", state.canonical_json()}});
    result.final_state = state;
    result.metrics = metrics;
    result.trace = std::move(ctx.trace);
    result.success_claimed = success_claimed;
    result.termination = termination;
    return result;
  };

  if (task == nullptr) {
    termination = "planning_failed";
    ctx.emit("fault", json{{"code", "ConfigInvalid"},
                           {"detail", "unknown task '" + config.task_id + "'"}});
    return finish();
  }

  const Instruction instruction{task->task_id, task->instruction};
  const bool baseline = config.mode == Mode::UploadBaseline;

  // Initial screen summary: memory entry 0 exists before any planning.
  Screen screen0 = sim::current_screen(fixture, state);
  planner::MemoryStore memory;
  ScreenSummary latest_summary;

  auto compress_screen = [&](const Screen& screen) -> Result<ScreenSummary> {
    if (baseline) {
      ScreenSummary summary;
      summary.text = kBaselineSummaryText;
      summary.token_count = static_cast<int>(count_tokens(summary.text));
      ctx.emit("compress", json{{"text", summary.text},
                                {"tokens", summary.token_count},
                                {"truncated", false},
                                {"disabled", true},
                                {"screen", screen.screen_id}});
      return summary;
    }
    auto outcome =
        observer::pre_understand(screen, device_observer, config.summary_token_cap);
    if (!outcome.ok()) return outcome.error();
    ctx.emit("compress", json{{"text", outcome.value().summary.text},
                              {"tokens", outcome.value().summary.token_count},
                              {"truncated", outcome.value().truncated},
                              {"screen", screen.screen_id}});
    return outcome.value().summary;
  };

  {
    auto summary0 = compress_screen(screen0);
    if (!summary0.ok()) {
      ctx.emit("fault", json{{"code", "SummarizationFailed"},
                             {"detail", summary0.error().to_string()}});
      termination = "summarize_fault";
      return finish();
    }
    latest_summary = summary0.value();
    memory.append(MemoryEntry{0, latest_summary, std::nullopt, std::nullopt});
    ctx.emit("memory",
             json{{"entries", static_cast<int>(memory.entries().size())}});
  }

  // Initial planning: the only uplink that ever carries image bytes.
  ctx.send_uplink(UplinkKind::PlanRequest, task->task_id,
                  planner::build_initial_prompt(instruction, screen0),
                  screen0.payload_bytes);
  auto plan_result = planner::initial_plan(instruction, screen0, cloud);
  if (!plan_result.ok()) {
    ctx.emit("fault", json{{"code", "PlanningFailed"},
                           {"detail", plan_result.error().to_string()}});
    termination = "planning_failed";
    return finish();
  }
  Plan plan = std::move(plan_result.value());
  memory.original_plan = plan;
  ctx.emit("plan", plan_to_json(plan));

  size_t step_index = 1;  // 1-based within the current plan
  while (true) {
    if (step_index > plan.steps.size()) {
      termination = "completed";
      success_claimed = true;
      break;
    }
    if (metrics.steps_executed >= config.max_total_actions) {
      termination = "action_cap";
      break;
    }

    const PlanStep& step = plan.steps[step_index - 1];
    const std::int64_t step_t0 = clock->now_us();
    Screen screen_before = sim::current_screen(fixture, state);

    ++metrics.steps_executed;

    // Execute.
    VerificationResult verdict;
    bool forced_fail = false;
    bool applied_no_effect = false;
    auto action_result = executor::execute_step(screen_before, step, device_executor);
    if (action_result.ok()) {
      const Action& action = action_result.value();
      ctx.emit("execute", json{{"step_index", step.index},
                               {"revision", plan.revision},
                               {"call", protocol::render_action(action)}});
      auto applied = sim::apply_action(fixture, state, action);
      if (applied.ok()) {
        state = applied.value().state;
        applied_no_effect = applied.value().no_effect;
        ctx.emit("apply", json{{"effect", applied.value().effect},
                               {"no_effect", applied.value().no_effect},
                               {"screen", state.current_screen_id},
                               {"state_fnv", fnv1a64_hex(state.canonical_json())}});
      } else {
        // UnknownApp behaves like an action without effect.
        applied_no_effect = true;
        ctx.emit("apply", json{{"effect", applied.error().to_string()},
                               {"no_effect", true},
                               {"screen", state.current_screen_id},
                               {"state_fnv", fnv1a64_hex(state.canonical_json())}});
      }
    } else {
      ctx.emit("execute", json{{"step_index", step.index},
                               {"revision", plan.revision},
                               {"error", action_result.error().to_string()}});
      forced_fail = true;
    }

    Screen screen_after = sim::current_screen(fixture, state);

    // Verify.
    if (forced_fail) {
      verdict = VerificationResult{Verdict::Fail, "executor produced no valid action"};
      ctx.emit("verify", json{{"verdict", "Fail"},
                              {"summary", verdict.failure_summary},
                              {"forced", true}});
    } else {
      Provider& verifier = baseline ? static_cast<Provider&>(cloud)
                                    : static_cast<Provider&>(device_observer);
      if (baseline) {
        ctx.send_uplink(UplinkKind::VerifyRequest, task->task_id,
                        observer::build_verify_prompt(screen_after, step.expectation),
                        screen_after.payload_bytes);
      }
      auto verify_result = observer::verify(screen_after, step.expectation, verifier);
      if (!verify_result.ok()) {
        ctx.emit("fault", json{{"code", "VerificationFailed"},
                               {"detail", verify_result.error().to_string()}});
        termination = "verify_fault";
        break;
      }
      verdict = verify_result.value();
      ctx.emit("verify",
               json{{"verdict", verdict.verdict == Verdict::Pass ? "Pass" : "Fail"},
                    {"summary", verdict.failure_summary},
                    {"forced", false}});
    }

    // Compress (always) and update memory.
    auto summary = compress_screen(screen_after);
    if (!summary.ok()) {
      ctx.emit("fault", json{{"code", "SummarizationFailed"},
                             {"detail", summary.error().to_string()}});
      termination = "summarize_fault";
      break;
    }
    latest_summary = summary.value();
    memory.append(MemoryEntry{step.index, latest_summary,
                              action_result.ok()
                                  ? std::optional<Action>(action_result.value())
                                  : std::nullopt,
                              verdict});
    ctx.emit("memory", json{{"entries", static_cast<int>(memory.entries().size())}});

    metrics.step_latencies_us.push_back(clock->now_us() - step_t0);

    if (verdict.verdict == Verdict::Pass) {
      ++step_index;
      continue;
    }

    // Reflection and replanning.
    if (metrics.replans >= config.max_replans) {
      ctx.emit("fault",
               json{{"code", forced_fail ? "GroundingFailed" : "StepFailed"},
                    {"detail", verdict.failure_summary},
                    {"no_effect", applied_no_effect}});
      termination = "replan_cap";
      break;
    }
    ++metrics.replans;
    ctx.send_uplink(UplinkKind::ReplanRequest, task->task_id,
                    planner::build_replan_prompt(instruction, plan, memory,
                                                 latest_summary,
                                                 verdict.failure_summary),
                    /*attached_image_bytes=*/0);
    auto outcome = planner::replan(instruction, plan, memory, latest_summary,
                                   verdict.failure_summary, cloud);
    if (!outcome.ok()) {
      ctx.emit("fault", json{{"code", "ReplanningFailed"},
                             {"detail", outcome.error().to_string()}});
      termination = "replanning_failed";
      break;
    }
    if (std::holds_alternative<protocol::NoReplanNeeded>(outcome.value())) {
      ctx.emit("replan_outcome", json{{"outcome", "no_replan"}});
      termination = "no_replan_needed";
      success_claimed = true;
      break;
    }
    auto& new_plan = std::get<protocol::NewPlan>(outcome.value());
    ctx.emit("replan_outcome", json{{"outcome", "new_plan"},
                                    {"reflection", new_plan.reflection},
                                    {"revision", new_plan.plan.revision}});
    plan = std::move(new_plan.plan);
    memory.current_revision = plan.revision;
    ctx.emit("plan", plan_to_json(plan));
    step_index = 1;  // restart from the new plan's first step
  }

  return finish();
}

FailureClass classify_failure(const std::vector<trace::TraceEvent>& trace) {
  std::string reason;
  const trace::TraceEvent* last_verify = nullptr;
  const trace::TraceEvent* last_fault = nullptr;
  std::vector<const trace::TraceEvent*> applies;
  for (const auto& event : trace) {
    if (event.kind == "termination") reason = event.payload.value("reason", "");
    if (event.kind == "verify") last_verify = &event;
    if (event.kind == "fault") last_fault = &event;
    if (event.kind == "apply") applies.push_back(&event);
  }

  if (reason == "planning_failed" || reason == "replanning_failed") {
    return FailureClass::Planning;
  }
  if (reason == "verify_fault" || reason == "summarize_fault") {
    return FailureClass::Verification;
  }
  if (reason == "completed" || reason == "no_replan_needed") {
    // Success-claimed but the programmatic predicate disagreed.
    return FailureClass::Verification;
  }
  if (reason == "replan_cap") {
    if (last_verify != nullptr && last_verify->payload.value("forced", false)) {
      return FailureClass::VisualGrounding;
    }
    if (last_fault != nullptr) {
      const bool no_effect = last_fault->payload.value("no_effect", false);
      if (no_effect || last_fault->payload.value("code", "") == "GroundingFailed") {
        return FailureClass::VisualGrounding;
      }
    }
    return FailureClass::MaxSteps;
  }
  return FailureClass::MaxSteps;  // action_cap and anything unaccounted
}

// ---------------------------------------------------------------------------
// Replay

Result<Completion> ReplayProvider::complete(const CompletionRequest& request) {
  if (completions_.empty()) {
    return make_error(Errc::ProviderUnavailable, "replay queue exhausted");
  }
  Recorded next = std::move(completions_.front());
  completions_.pop_front();
  const std::string digest = fnv1a64_hex(request_text(request));
  if (digest != next.request_fnv) {
    return make_error(Errc::ProviderUnavailable,
                      "replay divergence: request digest " + digest +
                          " != recorded " + next.request_fnv);
  }
  return next.completion;
}

std::map<std::string, std::deque<ReplayProvider::Recorded>> recorded_completions(
    const std::vector<trace::TraceEvent>& trace) {
  std::map<std::string, std::deque<ReplayProvider::Recorded>> queues;
  for (const auto& event : trace) {
    if (event.kind != "completion") continue;
    ReplayProvider::Recorded recorded;
    recorded.request_fnv = event.payload.value("request_fnv", "");
    recorded.completion.text = event.payload.value("text", "");
    recorded.completion.usage.prompt_tokens =
        event.payload.value("prompt_tokens", std::int64_t{0});
    recorded.completion.usage.completion_tokens =
        event.payload.value("completion_tokens", std::int64_t{0});
    recorded.completion.synthetic_latency_us =
        event.payload.value("latency_us", std::int64_t{0});
    queues[event.payload.value("role", "")].push_back(std::move(recorded));
  }
  return queues;
}

// ---------------------------------------------------------------------------
// Suites

SuiteRun run_suite(const SuiteConfig& config, int parallelism) {
  std::vector<std::pair<std::string, std::uint64_t>> jobs;
  for (const auto& task : config.task_ids) {
    for (auto seed : config.seeds) jobs.emplace_back(task, seed);
  }

  SuiteRun run;
  run.episodes.resize(jobs.size());

  auto worker_body = [&](size_t index) {
    EpisodeConfig episode;
    episode.fixture = config.fixture;
    episode.fixture_path = config.fixture_path;
    episode.task_id = jobs[index].first;
    episode.seed = jobs[index].second;
    episode.max_total_actions = config.max_total_actions;
    episode.max_replans = config.max_replans;
    episode.summary_token_cap = config.summary_token_cap;
    episode.mode = config.mode;
    episode.clock = config.clock;
    episode.providers = config.providers;
    run.episodes[index] = run_episode(episode);
  };

  if (parallelism <= 1) {
    for (size_t i = 0; i < jobs.size(); ++i) worker_body(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    const int n = std::min<int>(parallelism, static_cast<int>(jobs.size()));
    workers.reserve(static_cast<size_t>(n));
    for (int w = 0; w < n; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          size_t index = next.fetch_add(1);
          if (index >= jobs.size()) return;
          worker_body(index);
        }
      });
    }
    for (auto& thread : workers) thread.join();
  }

  SuiteReport& report = run.report;
  report.mode = config.mode;
  report.episodes = static_cast<int>(jobs.size());

  int successes = 0;
  std::int64_t total_latency = 0;
  std::int64_t total_steps = 0;
  double total_mc = 0, total_mt = 0, total_uplink = 0;
  for (size_t i = 0; i < jobs.size(); ++i) {
    const EpisodeResult& episode = run.episodes[i];
    EpisodeRow row;
    row.task_id = jobs[i].first;
    row.seed = jobs[i].second;
    row.success = episode.metrics.success;
    row.mc = episode.metrics.mc;
    row.mt = episode.metrics.mt;
    row.uplink_bytes = episode.metrics.uplink_bytes;
    row.replans = episode.metrics.replans;
    row.steps_executed = episode.metrics.steps_executed;
    row.failure_class = episode.metrics.failure_class;
    std::int64_t episode_latency = 0;
    for (auto us : episode.metrics.step_latencies_us) episode_latency += us;
    row.mean_step_latency_us =
        episode.metrics.step_latencies_us.empty()
            ? 0.0
            : static_cast<double>(episode_latency) /
                  static_cast<double>(episode.metrics.step_latencies_us.size());
    report.rows.push_back(row);

    successes += row.success ? 1 : 0;
    total_latency += episode_latency;
    total_steps += static_cast<std::int64_t>(episode.metrics.step_latencies_us.size());
    total_mc += row.mc;
    total_mt += static_cast<double>(row.mt);
    total_uplink += static_cast<double>(row.uplink_bytes);
    if (!row.success) {
      report.failure_histogram[std::string(failure_class_name(row.failure_class))]++;
    }
  }

  const double n = report.episodes > 0 ? static_cast<double>(report.episodes) : 1.0;
  report.sr = static_cast<double>(successes) / n;
  report.mean_mc = total_mc / n;
  report.mean_mt = total_mt / n;
  report.mean_uplink_bytes = total_uplink / n;
  report.mean_step_latency_us =
      total_steps > 0 ? static_cast<double>(total_latency) / static_cast<double>(total_steps)
                      : 0.0;
  return run;
}

}  // namespace ecoagent::orch
