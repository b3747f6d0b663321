#include "presim/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "presim/metrics.hpp"

namespace presim {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Task {
  std::size_t point;
  std::uint64_t seed;
};

std::vector<double> collect(const SweepPoint& p, double (*get)(const MetricsSnapshot&)) {
  std::vector<double> out;
  out.reserve(p.finals.size());
  for (const MetricsSnapshot& s : p.finals) out.push_back(get(s));
  return out;
}

struct NamedMetric {
  const char* name;
  double (*get)(const MetricsSnapshot&);
};

constexpr NamedMetric kMetrics[] = {
    {"fraction_lost", [](const MetricsSnapshot& s) { return s.fraction_lost; }},
    {"fraction_impaired", [](const MetricsSnapshot& s) { return s.fraction_impaired; }},
    {"fraction_unreadable", [](const MetricsSnapshot& s) { return s.fraction_unreadable; }},
    {"undetected_forgeries",
     [](const MetricsSnapshot& s) { return static_cast<double>(s.undetected_forgeries); }},
    {"repairs_completed",
     [](const MetricsSnapshot& s) { return static_cast<double>(s.repairs_completed); }},
    {"alarms", [](const MetricsSnapshot& s) { return static_cast<double>(s.alarms); }},
    {"cost_total", [](const MetricsSnapshot& s) { return s.cost_total; }},
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const cfg::Node& base_config, const std::string& filename,
                      const SweepOptions& opt) {
  SweepResult result;

  for (const std::string& value : opt.axis_values) {
    cfg::Node point_cfg = base_config;
    if (!cfg::set_path(point_cfg, opt.axis_key, value)) {
      result.errors.push_back(
          {filename, 0, "axis path '" + opt.axis_key + "' collides with a block"});
      continue;
    }
    ValidationResult vr = build_scenario(point_cfg, filename);
    if (!vr.ok()) {
      for (cfg::Diagnostic& d : vr.errors) {
        d.message = "[" + opt.axis_key + "=" + value + "] " + d.message;
        result.errors.push_back(d);
      }
      continue;
    }
    SweepPoint point;
    point.value = value;
    point.scenario = std::move(*vr.scenario);
    point.finals.resize(static_cast<std::size_t>(opt.seeds));
    result.points.push_back(std::move(point));
  }
  if (!result.ok() || result.points.empty()) return result;

  std::vector<Task> tasks;
  for (std::size_t p = 0; p < result.points.size(); ++p)
    for (int s = 0; s < opt.seeds; ++s)
      tasks.push_back({p, static_cast<std::uint64_t>(s)});

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = opt.jobs > 0 ? static_cast<unsigned>(opt.jobs) : hw;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mu;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) return;
      const Task& task = tasks[i];
      try {
        RunResult rr = run(result.points[task.point].scenario, task.seed);
        result.points[task.point].finals[task.seed] = rr.final;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mu);
        failed.store(true);
        failure = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < std::min<std::size_t>(jobs, tasks.size()); ++j)
    pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failed.load()) throw SimError("sweep run failed: " + failure);
  return result;
}

std::string sweep_aggregate_csv(const SweepResult& r, const std::string& axis_key) {
  std::string out = "point,axis_key,axis_value,seeds";
  for (const NamedMetric& m : kMetrics)
    out += std::string(",") + m.name + "_mean," + m.name + "_se";
  out += ",paired_diff_lost_vs_first_mean,paired_diff_lost_vs_first_se\n";

  for (std::size_t p = 0; p < r.points.size(); ++p) {
    const SweepPoint& point = r.points[p];
    out += std::to_string(p) + "," + axis_key + "," + point.value + "," +
           std::to_string(point.finals.size());
    for (const NamedMetric& m : kMetrics) {
      const MetricStats st = aggregate_values(collect(point, m.get));
      out += "," + fmt(st.mean) + "," + fmt(st.stderr_);
    }
    // Paired-seed difference in loss against the first point: the strategy
    // comparison the sweep exists for.
    std::vector<double> diffs;
    for (std::size_t s = 0; s < point.finals.size(); ++s)
      diffs.push_back(point.finals[s].fraction_lost -
                      r.points[0].finals[s].fraction_lost);
    const MetricStats dst = aggregate_values(diffs);
    out += "," + fmt(dst.mean) + "," + fmt(dst.stderr_) + "\n";
  }
  return out;
}

std::string sweep_point_json(const SweepResult& r, std::size_t p,
                             const std::string& axis_key) {
  const SweepPoint& point = r.points[p];
  ordered_json j;
  j["schema"] = "presim-sweep-point/1";
  j["scenario"] = {{"name", point.scenario.name}, {"hash", point.scenario.source_hash_hex}};
  j["axis"] = {{"key", axis_key}, {"value", point.value}};
  j["seeds"] = point.finals.size();
  ordered_json metrics;
  for (const NamedMetric& m : kMetrics) {
    const MetricStats st = aggregate_values(collect(point, m.get));
    metrics[m.name] = {{"mean", st.mean}, {"stderr", st.stderr_}};
  }
  j["final_metrics"] = metrics;
  std::vector<double> diffs;
  for (std::size_t s = 0; s < point.finals.size(); ++s)
    diffs.push_back(point.finals[s].fraction_lost - r.points[0].finals[s].fraction_lost);
  const MetricStats dst = aggregate_values(diffs);
  j["paired_diff_lost_vs_first"] = {{"mean", dst.mean}, {"stderr", dst.stderr_}};
  return j.dump(2) + "\n";
}

void write_sweep_outputs(const SweepResult& r, const SweepOptions& opt) {
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(opt.out_dir + "/" + name, std::ios::binary);
    if (!f) throw SimError("cannot write " + opt.out_dir + "/" + name);
    f << content;
  };
  write("aggregate.csv", sweep_aggregate_csv(r, opt.axis_key));
  for (std::size_t p = 0; p < r.points.size(); ++p)
    write("point_" + std::to_string(p) + "_summary.json",
          sweep_point_json(r, p, opt.axis_key));
}

}  // namespace presim
