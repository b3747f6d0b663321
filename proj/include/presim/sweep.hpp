#pragma once

#include <string>
#include <vector>

#include "presim/config.hpp"
#include "presim/engine.hpp"

namespace presim {

struct SweepOptions {
  std::string axis_key;                 // dotted config path
  std::vector<std::string> axis_values; // one sweep point per value
  int seeds = 1;                        // paired seed set 0..seeds-1 at every point
  int jobs = 0;                         // 0: hardware concurrency
  std::string out_dir;
};

struct SweepPoint {
  std::string value;
  Scenario scenario;
  std::vector<MetricsSnapshot> finals;  // indexed by seed
};

struct SweepResult {
  std::vector<SweepPoint> points;
  cfg::Diagnostics errors;  // per-point validation failures
  bool ok() const { return errors.empty(); }
};

// Expands the axis over the base config, validates every point, and runs the
// full (point x seed) matrix with the same seed set at every point so that
// cross-point differences are paired-seed differences. Runs may execute in
// parallel; results are deterministic regardless of the job count.
SweepResult run_sweep(const cfg::Node& base_config, const std::string& filename,
                      const SweepOptions& opt);

// Serialization of the aggregate table and per-point summaries.
std::string sweep_aggregate_csv(const SweepResult& r, const std::string& axis_key);
std::string sweep_point_json(const SweepResult& r, std::size_t point,
                             const std::string& axis_key);

void write_sweep_outputs(const SweepResult& r, const SweepOptions& opt);

}  // namespace presim
