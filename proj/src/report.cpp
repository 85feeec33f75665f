#include "ecoagent/report.hpp"

#include <nlohmann/json.hpp>

#include "ecoagent/util.hpp"

namespace ecoagent::report {

using nlohmann::json;
using orch::SuiteReport;

namespace {

double us_to_s(double us) { return us / 1e6; }
double bytes_to_kb(double bytes) { return bytes / 1000.0; }

std::string histogram_line(const SuiteReport& report) {
  std::string out;
  for (const auto& [name, count] : report.failure_histogram) {
    if (!out.empty()) out += ", ";
    out += name + ": " + std::to_string(count);
  }
  return out.empty() ? "(none)" : out;
}

}  // namespace

std::string to_markdown(const SuiteReport& report) {
  std::string md;
  md += "# Suite Report\n\n";
  md += "Mode: " + std::string(orch::mode_name(report.mode)) + "\n\n";
  md += "| Episodes | SR (%) | MC | MT | Latency (s) | Uplink (kB) |\n";
  md += "|---:|---:|---:|---:|---:|---:|\n";
  md += "| " + std::to_string(report.episodes);
  md += " | " + format_fixed(report.sr * 100.0, 1);
  md += " | " + format_fixed(report.mean_mc, 2);
  md += " | " + format_fixed(report.mean_mt, 1);
  md += " | " + format_fixed(us_to_s(report.mean_step_latency_us), 3);
  md += " | " + format_fixed(bytes_to_kb(report.mean_uplink_bytes), 1);
  md += " |\n\n";
  md += "Failures: " + histogram_line(report) + "\n\n";
  md += "## Episodes\n\n";
  md += "| Task | Seed | Success | MC | MT | Latency (s) | Uplink (kB) | Replans | Steps | Failure |\n";
  md += "|---|---:|---|---:|---:|---:|---:|---:|---:|---|\n";
  for (const auto& row : report.rows) {
    md += "| " + row.task_id;
    md += " | " + std::to_string(row.seed);
    md += " | " + std::string(row.success ? "yes" : "no");
    md += " | " + std::to_string(row.mc);
    md += " | " + std::to_string(row.mt);
    md += " | " + format_fixed(us_to_s(row.mean_step_latency_us), 3);
    md += " | " + format_fixed(bytes_to_kb(static_cast<double>(row.uplink_bytes)), 1);
    md += " | " + std::to_string(row.replans);
    md += " | " + std::to_string(row.steps_executed);
    md += " | " + std::string(failure_class_name(row.failure_class));
    md += " |\n";
  }
  md += "\n";
  md += std::string(kProxyTokenDisclaimer) + "\n";
  return md;
}

std::string to_csv(const SuiteReport& report) {
  std::string csv =
      "task_id,seed,success,mc,mt,mean_step_latency_s,uplink_kb,replans,steps,"
      "failure_class\n";
  for (const auto& row : report.rows) {
    csv += row.task_id;
    csv += "," + std::to_string(row.seed);
    csv += "," + std::string(row.success ? "true" : "false");
    csv += "," + std::to_string(row.mc);
    csv += "," + std::to_string(row.mt);
    csv += "," + format_fixed(us_to_s(row.mean_step_latency_us), 3);
    csv += "," + format_fixed(bytes_to_kb(static_cast<double>(row.uplink_bytes)), 1);
    csv += "," + std::to_string(row.replans);
    csv += "," + std::to_string(row.steps_executed);
    csv += "," + std::string(failure_class_name(row.failure_class));
    csv += "\n";
  }
  return csv;
}

std::string to_json(const SuiteReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back(json{
        {"task_id", row.task_id},
        {"seed", row.seed},
        {"success", row.success},
        {"mc", row.mc},
        {"mt", row.mt},
        {"mean_step_latency_s", format_fixed(us_to_s(row.mean_step_latency_us), 3)},
        {"uplink_kb", format_fixed(bytes_to_kb(static_cast<double>(row.uplink_bytes)), 1)},
        {"replans", row.replans},
        {"steps_executed", row.steps_executed},
        {"failure_class", std::string(failure_class_name(row.failure_class))},
    });
  }
  json j;
  j["mode"] = std::string(orch::mode_name(report.mode));
  j["episodes"] = report.episodes;
  j["sr_percent"] = format_fixed(report.sr * 100.0, 1);
  j["mean_mc"] = format_fixed(report.mean_mc, 2);
  j["mean_mt"] = format_fixed(report.mean_mt, 1);
  j["mean_step_latency_s"] = format_fixed(us_to_s(report.mean_step_latency_us), 3);
  j["mean_uplink_kb"] = format_fixed(bytes_to_kb(report.mean_uplink_bytes), 1);
  j["failures"] = report.failure_histogram;
  j["rows"] = std::move(rows);
  j["token_note"] = std::string(kProxyTokenDisclaimer);
  return j.dump(2) + "\n";
}

Comparison compare(const orch::SuiteReport& closed_loop,
                   const orch::SuiteReport& baseline) {
  Comparison c;
  c.closed_loop = closed_loop;
  c.baseline = baseline;
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  c.uplink_ratio = ratio(baseline.mean_uplink_bytes, closed_loop.mean_uplink_bytes);
  c.mt_ratio = ratio(baseline.mean_mt, closed_loop.mean_mt);
  c.latency_ratio =
      ratio(baseline.mean_step_latency_us, closed_loop.mean_step_latency_us);
  return c;
}

std::string comparison_to_markdown(const Comparison& comparison) {
  std::string md;
  md += "# Mode Comparison\n\n";
  md += "| Mode | SR (%) | MC | MT | Latency (s) | Uplink (kB) |\n";
  md += "|---|---:|---:|---:|---:|---:|\n";
  for (const auto* report : {&comparison.closed_loop, &comparison.baseline}) {
    md += "| " + std::string(orch::mode_name(report->mode));
    md += " | " + format_fixed(report->sr * 100.0, 1);
    md += " | " + format_fixed(report->mean_mc, 2);
    md += " | " + format_fixed(report->mean_mt, 1);
    md += " | " + format_fixed(us_to_s(report->mean_step_latency_us), 3);
    md += " | " + format_fixed(bytes_to_kb(report->mean_uplink_bytes), 1);
    md += " |\n";
  }
  md += "\n";
  md += "Uplink reduction (baseline / closed-loop): " +
        format_fixed(comparison.uplink_ratio, 1) + "x\n";
  md += "Cloud token reduction (baseline / closed-loop): " +
        format_fixed(comparison.mt_ratio, 1) + "x\n";
  md += "Per-step latency reduction (baseline / closed-loop): " +
        format_fixed(comparison.latency_ratio, 1) + "x\n\n";
  md += std::string(kProxyTokenDisclaimer) + "\n";
  md += "The upload baseline is an emulated mode of this harness, not a "
        "reimplementation of any external agent.\n";
  return md;
}

std::string comparison_to_json(const Comparison& comparison) {
  json j;
  j["closed_loop"] = json::parse(to_json(comparison.closed_loop));
  j["baseline"] = json::parse(to_json(comparison.baseline));
  j["uplink_ratio"] = format_fixed(comparison.uplink_ratio, 2);
  j["mt_ratio"] = format_fixed(comparison.mt_ratio, 2);
  j["latency_ratio"] = format_fixed(comparison.latency_ratio, 2);
  j["token_note"] = std::string(kProxyTokenDisclaimer);
  return j.dump(2) + "\n";
}

}  // namespace ecoagent::report
