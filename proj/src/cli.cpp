#include "ecoagent/cli.hpp"

#include <filesystem>
#include <iostream>

#include <nlohmann/json.hpp>

#include "ecoagent/remote_provider.hpp"
#include "ecoagent/report.hpp"
#include "ecoagent/util.hpp"

namespace ecoagent::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Result<std::vector<ScriptedRule>> parse_rules_array(const json& array,
                                                    const std::string& where) {
  std::vector<ScriptedRule> rules;
  for (const auto& jr : array) {
    ScriptedRule rule;
    if (jr.contains("match")) {
      if (jr["match"].is_string()) {
        rule.match.push_back(jr["match"].get<std::string>());
      } else if (jr["match"].is_array()) {
        for (const auto& needle : jr["match"]) {
          if (!needle.is_string()) {
            return make_error(Errc::ConfigInvalid,
                              "rule 'match' entries must be strings in " + where);
          }
          rule.match.push_back(needle.get<std::string>());
        }
      } else {
        return make_error(Errc::ConfigInvalid,
                          "rule 'match' must be a string or array in " + where);
      }
    }
    if (!jr.contains("response") || !jr["response"].is_string()) {
      return make_error(Errc::ConfigInvalid, "rule lacks a string 'response' in " + where);
    }
    rule.response = jr["response"].get<std::string>();
    rules.push_back(std::move(rule));
  }
  return rules;
}


LatencyModel parse_latency(const json& j) {
  LatencyModel model;
  model.fixed_us = static_cast<std::int64_t>(j.value("fixed_ms", 0.0) * 1000.0);
  model.per_token_us = static_cast<std::int64_t>(j.value("per_token_ms", 0.0) * 1000.0);
  return model;
}

Result<std::unique_ptr<Provider>> build_provider(const json& spec, ProviderRole role,
                                                 const fs::path& config_dir) {
  if (!spec.is_object()) {
    return make_error(Errc::ConfigInvalid, "provider spec must be an object");
  }
  ProviderConfig config;
  config.role = role;
  if (spec.contains("latency")) config.latency = parse_latency(spec["latency"]);
  config.image_token_cost = spec.value("image_token_cost", std::int64_t{1400});

  const std::string type = spec.value("type", std::string{"scripted"});
  if (type == "scripted") {
    std::vector<ScriptedRule> rules;
    if (spec.contains("rules_files")) {
      for (const auto& jf : spec["rules_files"]) {
        fs::path path = jf.get<std::string>();
        if (path.is_relative()) path = config_dir / path;
        auto file_rules = load_scripted_rules(path.string());
        if (!file_rules.ok()) return file_rules.error();
        for (auto& rule : file_rules.value()) rules.push_back(std::move(rule));
      }
    }
    if (spec.contains("rules") && spec["rules"].is_array()) {
      auto inline_rules = parse_rules_array(spec["rules"], "inline rules");
      if (!inline_rules.ok()) return inline_rules.error();
      for (auto& rule : inline_rules.value()) rules.push_back(std::move(rule));
    }
    return std::unique_ptr<Provider>(
        std::make_unique<ScriptedProvider>(config, std::move(rules)));
  }
  if (type == "remote") {
    RemoteEndpoint endpoint;
    endpoint.base_url = spec.value("base_url", std::string{});
    if (endpoint.base_url.empty()) {
      return make_error(Errc::ConfigInvalid, "remote provider needs base_url");
    }
    endpoint.path = spec.value("path", endpoint.path);
    endpoint.model = spec.value("model", std::string{});
    endpoint.auth_header = spec.value("auth_header", endpoint.auth_header);
    endpoint.auth_prefix = spec.value("auth_prefix", endpoint.auth_prefix);
    endpoint.auth_env = spec.value("auth_env", endpoint.auth_env);
    endpoint.timeout_ms = spec.value("timeout_ms", endpoint.timeout_ms);
    endpoint.retries = spec.value("retries", endpoint.retries);
    return std::unique_ptr<Provider>(
        std::make_unique<RemoteProvider>(config, std::move(endpoint)));
  }
  return make_error(Errc::ConfigInvalid, "unknown provider type '" + type + "'");
}

}  // namespace

Result<std::unique_ptr<LoadedConfig>> load_config(const std::string& config_path,
                                                  const RunOverrides& overrides) {
  auto text = read_file(config_path);
  if (!text.has_value()) {
    return make_error(Errc::ConfigInvalid, "cannot read config '" + config_path + "'");
  }
  json doc = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::ConfigInvalid, "config is not a JSON object");
  }

  const fs::path config_dir = fs::path(config_path).parent_path();

  auto loaded = std::make_unique<LoadedConfig>();

  if (!doc.contains("fixture") || !doc["fixture"].is_string()) {
    return make_error(Errc::ConfigInvalid, "config needs a 'fixture' path");
  }
  fs::path fixture_path = doc["fixture"].get<std::string>();
  if (fixture_path.is_relative() && !fs::exists(fixture_path)) {
    fs::path relative = config_dir / fixture_path;
    if (fs::exists(relative)) fixture_path = relative;
  }
  auto fixture = sim::load_fixture(fixture_path.string());
  if (!fixture.ok()) {
    return make_error(Errc::ConfigInvalid, fixture.error().to_string());
  }
  loaded->fixture = std::move(fixture.value());
  loaded->suite.fixture = &loaded->fixture;
  loaded->suite.fixture_path = fixture_path.string();

  if (doc.contains("tasks")) {
    for (const auto& jt : doc["tasks"]) {
      loaded->suite.task_ids.push_back(jt.get<std::string>());
    }
  } else {
    for (const auto& task : loaded->fixture.tasks) {
      loaded->suite.task_ids.push_back(task.task_id);
    }
  }
  for (const auto& task : loaded->suite.task_ids) {
    if (loaded->fixture.find_task(task) == nullptr) {
      return make_error(Errc::ConfigInvalid, "config references unknown task '" + task + "'");
    }
  }
  if (loaded->suite.task_ids.empty()) {
    return make_error(Errc::ConfigInvalid, "no tasks to run");
  }

  if (overrides.seed.has_value()) {
    loaded->suite.seeds = {*overrides.seed};
  } else if (doc.contains("seeds")) {
    for (const auto& js : doc["seeds"]) {
      loaded->suite.seeds.push_back(js.get<std::uint64_t>());
    }
  } else {
    loaded->suite.seeds = {doc.value("seed", std::uint64_t{7})};
  }
  if (loaded->suite.seeds.empty()) {
    return make_error(Errc::ConfigInvalid, "no seeds to run");
  }

  loaded->suite.max_total_actions =
      overrides.max_actions.value_or(doc.value("max_actions", 30));
  loaded->suite.max_replans =
      overrides.max_replans.value_or(doc.value("max_replans", 3));
  loaded->suite.summary_token_cap = doc.value("summary_token_cap", 150);
  if (loaded->suite.max_total_actions < 1) {
    return make_error(Errc::ConfigInvalid, "max_actions must be >= 1");
  }
  if (loaded->suite.max_replans < 0) {
    return make_error(Errc::ConfigInvalid, "max_replans must be >= 0");
  }

  const std::string mode = overrides.mode.value_or(
      doc.value("mode", std::string{"closed-loop"}));
  if (mode == "closed-loop") {
    loaded->suite.mode = orch::Mode::ClosedLoop;
  } else if (mode == "upload-baseline") {
    loaded->suite.mode = orch::Mode::UploadBaseline;
  } else {
    return make_error(Errc::ConfigInvalid, "unknown mode '" + mode + "'");
  }

  const std::string clock = doc.value("clock", std::string{"virtual"});
  if (clock == "virtual") {
    loaded->suite.clock = orch::ClockKind::Virtual;
  } else if (clock == "real") {
    loaded->suite.clock = orch::ClockKind::Real;
  } else {
    return make_error(Errc::ConfigInvalid, "unknown clock '" + clock + "'");
  }

  if (!doc.contains("providers") || !doc["providers"].is_object()) {
    return make_error(Errc::ConfigInvalid, "config needs a 'providers' object");
  }
  const json& providers = doc["providers"];
  struct RoleSpec {
    const char* key;
    ProviderRole role;
    std::unique_ptr<Provider>* slot;
  };
  RoleSpec roles[] = {
      {"cloud", ProviderRole::Cloud, &loaded->cloud},
      {"executor", ProviderRole::DeviceExecutor, &loaded->device_executor},
      {"observer", ProviderRole::DeviceObserver, &loaded->device_observer},
  };
  for (const auto& spec : roles) {
    if (!providers.contains(spec.key)) {
      return make_error(Errc::ConfigInvalid,
                        std::string("providers lacks '") + spec.key + "'");
    }
    auto provider = build_provider(providers[spec.key], spec.role, config_dir);
    if (!provider.ok()) return provider.error();
    *spec.slot = std::move(provider.value());
  }
  loaded->suite.providers.cloud = loaded->cloud.get();
  loaded->suite.providers.device_executor = loaded->device_executor.get();
  loaded->suite.providers.device_observer = loaded->device_observer.get();

  loaded->parallelism = overrides.parallel.value_or(doc.value("parallel", 1));
  if (loaded->parallelism < 1) {
    return make_error(Errc::ConfigInvalid, "parallel must be >= 1");
  }

  return loaded;
}

namespace {

bool write_reports(const orch::SuiteRun& run, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir / "traces", ec);
  if (ec) return false;
  bool ok = true;
  ok &= write_file((out_dir / "report.md").string(), report::to_markdown(run.report));
  ok &= write_file((out_dir / "report.csv").string(), report::to_csv(run.report));
  ok &= write_file((out_dir / "report.json").string(), report::to_json(run.report));
  for (size_t i = 0; i < run.episodes.size(); ++i) {
    const auto& row = run.report.rows[i];
    fs::path trace_path = out_dir / "traces" /
        (row.task_id + "_" + std::to_string(row.seed) + ".jsonl");
    ok &= write_file(trace_path.string(), trace::to_jsonl(run.episodes[i].trace));
  }
  return ok;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const RunOverrides& overrides) {
  auto loaded = load_config(config_path, overrides);
  if (!loaded.ok()) {
    std::cerr << "config error: " << loaded.error().to_string() << "\n";
    return 2;
  }
  auto run = orch::run_suite(loaded.value()->suite, loaded.value()->parallelism);
  if (!write_reports(run, out_dir)) {
    std::cerr << "failed to write reports to " << out_dir << "\n";
    return 2;
  }
  std::cout << report::to_markdown(run.report);
  std::cout << "reports written to " << out_dir << "\n";
  return 0;
}

int cmd_validate(const std::string& fixture_path) {
  auto fixture = sim::load_fixture(fixture_path);
  if (!fixture.ok()) {
    std::cerr << "invalid fixture: " << fixture.error().to_string() << "\n";
    return 1;
  }
  auto reachability = sim::validate_fixture(fixture.value(), /*max_depth=*/24);
  if (!reachability.ok()) {
    std::cerr << "invalid fixture: " << reachability.error().to_string() << "\n";
    return 1;
  }
  bool all_reachable = true;
  for (const auto& r : reachability.value()) {
    std::cout << "task " << r.task_id << ": "
              << (r.reachable ? "reachable in " + std::to_string(r.shortest_actions) +
                                    " actions"
                              : "NOT reachable")
              << "\n";
    all_reachable &= r.reachable;
  }
  if (!all_reachable) {
    std::cerr << "fixture has unreachable tasks\n";
    return 1;
  }
  std::cout << "fixture ok: " << fixture.value().screens.size() << " screens, "
            << fixture.value().tasks.size() << " tasks\n";
  return 0;
}

int cmd_replay(const std::string& trace_path) {
  auto text = read_file(trace_path);
  if (!text.has_value()) {
    std::cerr << "cannot read trace '" << trace_path << "'\n";
    return 1;
  }
  auto events = trace::from_jsonl(*text);
  if (!events.ok()) {
    std::cerr << "invalid trace: " << events.error().to_string() << "\n";
    return 1;
  }
  const auto& recorded = events.value();
  if (recorded.front().kind != "episode_start") {
    std::cerr << "trace does not begin with episode_start\n";
    return 1;
  }
  const json& start = recorded.front().payload;

  const std::string fixture_path = start.value("fixture_path", "");
  if (fixture_path.empty()) {
    std::cerr << "trace lacks fixture_path; cannot replay\n";
    return 1;
  }
  auto fixture = sim::load_fixture(fixture_path);
  if (!fixture.ok()) {
    std::cerr << "cannot load fixture: " << fixture.error().to_string() << "\n";
    return 1;
  }

  auto queues = orch::recorded_completions(recorded);
  ProviderConfig cloud_config{ProviderRole::Cloud, {}, 1400};
  ProviderConfig executor_config{ProviderRole::DeviceExecutor, {}, 1400};
  ProviderConfig observer_config{ProviderRole::DeviceObserver, {}, 1400};
  orch::ReplayProvider cloud(cloud_config, queues["cloud"]);
  orch::ReplayProvider device_executor(executor_config, queues["executor"]);
  orch::ReplayProvider device_observer(observer_config, queues["observer"]);

  orch::EpisodeConfig config;
  config.fixture = &fixture.value();
  config.fixture_path = fixture_path;
  config.task_id = start.value("task_id", "");
  config.seed = start.value("seed", std::uint64_t{0});
  config.max_total_actions = start.value("max_total_actions", 30);
  config.max_replans = start.value("max_replans", 3);
  config.summary_token_cap = start.value("summary_token_cap", 150);
  config.mode = start.value("mode", "closed-loop") == std::string("upload-baseline")
                    ? orch::Mode::UploadBaseline
                    : orch::Mode::ClosedLoop;
  config.clock = start.value("clock", "virtual") == std::string("real")
                     ? orch::ClockKind::Real
                     : orch::ClockKind::Virtual;
  config.providers = {&cloud, &device_executor, &device_observer};

  auto replayed = orch::run_episode(config);

  // Compare kind+payload event-by-event; timestamps are excluded so that
  // real-clock traces replay too.
  const size_t n = std::min(recorded.size(), replayed.trace.size());
  for (size_t i = 0; i < n; ++i) {
    const auto& a = recorded[i];
    const auto& b = replayed.trace[i];
    if (a.kind != b.kind || a.payload != b.payload) {
      std::cerr << "divergence at event seq " << a.seq << " (" << a.kind << ")\n";
      std::cerr << "  recorded: " << a.payload.dump() << "\n";
      std::cerr << "  replayed: " << b.payload.dump() << "\n";
      return 1;
    }
    std::cout << "[" << i << "] " << a.kind << " ok\n";
  }
  if (recorded.size() != replayed.trace.size()) {
    std::cerr << "divergence: recorded " << recorded.size() << " events, replayed "
              << replayed.trace.size() << "\n";
    return 1;
  }
  std::cout << "replay ok: " << recorded.size() << " events, final state matches\n";
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                const RunOverrides& overrides) {
  RunOverrides closed = overrides;
  closed.mode = "closed-loop";
  auto closed_config = load_config(config_path, closed);
  if (!closed_config.ok()) {
    std::cerr << "config error: " << closed_config.error().to_string() << "\n";
    return 2;
  }
  RunOverrides baseline = overrides;
  baseline.mode = "upload-baseline";
  auto baseline_config = load_config(config_path, baseline);
  if (!baseline_config.ok()) {
    std::cerr << "config error: " << baseline_config.error().to_string() << "\n";
    return 2;
  }

  auto closed_run =
      orch::run_suite(closed_config.value()->suite, closed_config.value()->parallelism);
  auto baseline_run = orch::run_suite(baseline_config.value()->suite,
                                      baseline_config.value()->parallelism);

  auto comparison = report::compare(closed_run.report, baseline_run.report);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  bool ok = !ec;
  ok &= write_file((fs::path(out_dir) / "compare.md").string(),
                   report::comparison_to_markdown(comparison));
  ok &= write_file((fs::path(out_dir) / "compare.json").string(),
                   report::comparison_to_json(comparison));
  if (!ok) {
    std::cerr << "failed to write comparison to " << out_dir << "\n";
    return 2;
  }
  std::cout << report::comparison_to_markdown(comparison);
  return 0;
}

}  // namespace ecoagent::cli
