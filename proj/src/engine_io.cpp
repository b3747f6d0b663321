#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "presim/engine.hpp"

namespace presim {

namespace {

std::string fmt_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

using ordered_json = nlohmann::ordered_json;

}  // namespace

std::string snapshots_csv(const RunResult& r) {
  std::string out = metrics::csv_header(r.delay_buckets);
  out += "\n";
  for (const MetricsSnapshot& s : r.snapshots) {
    out += metrics::csv_row(s);
    out += "\n";
  }
  return out;
}

std::string incidents_text(const RunResult& r) {
  std::string out;
  for (const Incident& inc : r.incidents) {
    out += "t=" + fmt_time(inc.time);
    out += " site=";
    out += inc.site == kNone ? "-" : std::to_string(inc.site);
    out += " kind=" + inc.category;
    out += " detail=\"" + inc.detail + "\"\n";
  }
  return out;
}

std::string summary_json(const RunResult& r) {
  ordered_json j;
  j["schema"] = "presim-summary/1";
  j["scenario"] = {{"name", r.scenario_name}, {"hash", r.scenario_hash}};
  j["seed"] = r.seed;
  j["horizon_years"] = r.horizon_years;

  ordered_json fin;
  const MetricsSnapshot& s = r.final;
  fin["time"] = s.time;
  fin["fraction_lost"] = s.fraction_lost;
  fin["fraction_impaired"] = s.fraction_impaired;
  fin["fraction_unreadable"] = s.fraction_unreadable;
  fin["fraction_forged"] = s.fraction_forged;
  fin["mean_intact_replicas"] = s.mean_intact_replicas;
  fin["detect_latency_mean"] = s.detect_latency_mean;
  fin["detect_latency_p95"] = s.detect_latency_p95;
  fin["detections"] = s.detections;
  fin["undetected_forgeries"] = s.undetected_forgeries;
  fin["accesses"] = s.accesses;
  fin["impaired_accesses"] = s.impaired_accesses;
  fin["failed_accesses"] = s.failed_accesses;
  fin["repairs_completed"] = s.repairs_completed;
  fin["repairs_bad"] = s.repairs_bad;
  fin["alarms"] = s.alarms;
  j["final"] = fin;

  ordered_json delays = ordered_json::array();
  for (std::size_t i = 0; i < s.delay_hist.size(); ++i) delays.push_back(s.delay_hist[i]);
  j["access_delay_histogram"] = delays;
  ordered_json buckets = ordered_json::array();
  for (double b : r.delay_buckets) buckets.push_back(b);
  j["access_delay_buckets_years"] = buckets;

  ordered_json costs;
  for (std::size_t c = 0; c < kCostCategoryCount; ++c)
    costs[to_string(static_cast<CostCategory>(c))] = r.cost_totals[c];
  costs["total"] = r.cost_grand_total;
  j["cost"] = costs;

  ordered_json events;
  for (std::size_t k = 0; k < kEventKindCount; ++k)
    if (r.event_counts[k] > 0)
      events[to_string(static_cast<EventKind>(k))] = r.event_counts[k];
  j["event_counts"] = events;
  j["incidents"] = r.incidents.size();
  return j.dump(2) + "\n";
}

void write_run_outputs(const RunResult& r, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(out_dir + "/" + name, std::ios::binary);
    if (!f) throw SimError("cannot write " + out_dir + "/" + name);
    f << content;
    if (!f) throw SimError("write failed for " + out_dir + "/" + name);
  };
  write("snapshots.csv", snapshots_csv(r));
  write("summary.json", summary_json(r));
  write("incidents.log", incidents_text(r));
}

}  // namespace presim
