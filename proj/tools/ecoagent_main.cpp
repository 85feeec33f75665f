#include <CLI11.hpp>

#include "ecoagent/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop device-cloud mobile automation harness"};
  app.require_subcommand(1);

  ecoagent::cli::RunOverrides overrides;
  std::string config_path;
  std::string out_dir = "runs/out";
  std::string fixture_path;
  std::string trace_path;
  int parallel = 0;
  std::uint64_t seed = 0;
  int max_actions = 0;
  int max_replans = -1;
  std::string mode;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Suite config file (JSON)")->required();
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--parallel", parallel, "Worker threads for the suite");
    cmd->add_option("--seed", seed, "Override: run only this seed");
    cmd->add_option("--max-actions", max_actions, "Override: per-episode action cap");
    cmd->add_option("--max-replans", max_replans, "Override: per-episode replan cap");
    cmd->add_option("--mode", mode, "closed-loop | upload-baseline")
        ->check(CLI::IsMember({"closed-loop", "upload-baseline"}));
  };

  CLI::App* run = app.add_subcommand("run", "Run a task suite and write reports");
  add_run_flags(run);

  CLI::App* validate =
      app.add_subcommand("validate", "Check a fixture's invariants and task reachability");
  validate->add_option("fixture", fixture_path, "Fixture file (JSON)")->required();

  CLI::App* replay = app.add_subcommand("replay", "Re-execute a recorded episode trace");
  replay->add_option("trace", trace_path, "Trace file (JSONL)")->required();

  CLI::App* compare = app.add_subcommand(
      "compare", "Run closed-loop vs upload-baseline and report ratios");
  add_run_flags(compare);

  CLI11_PARSE(app, argc, argv);

  auto collect_overrides = [&](CLI::App* cmd) {
    ecoagent::cli::RunOverrides o;
    if (cmd->count("--parallel") > 0) o.parallel = parallel;
    if (cmd->count("--seed") > 0) o.seed = seed;
    if (cmd->count("--max-actions") > 0) o.max_actions = max_actions;
    if (cmd->count("--max-replans") > 0) o.max_replans = max_replans;
    if (cmd->count("--mode") > 0) o.mode = mode;
    return o;
  };

  if (run->parsed()) {
    return ecoagent::cli::cmd_run(config_path, out_dir, collect_overrides(run));
  }
  if (validate->parsed()) {
    return ecoagent::cli::cmd_validate(fixture_path);
  }
  if (replay->parsed()) {
    return ecoagent::cli::cmd_replay(trace_path);
  }
  if (compare->parsed()) {
    return ecoagent::cli::cmd_compare(config_path, out_dir, collect_overrides(compare));
  }
  return 2;
}
