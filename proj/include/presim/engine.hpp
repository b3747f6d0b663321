#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "presim/metrics.hpp"
#include "presim/scenario.hpp"
#include "presim/world.hpp"

namespace presim {

struct RunResult {
  std::string scenario_name;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  double horizon_years = 0.0;
  std::vector<double> delay_buckets;
  std::vector<MetricsSnapshot> snapshots;
  MetricsSnapshot final;
  std::array<std::uint64_t, kEventKindCount> event_counts{};
  std::vector<Incident> incidents;
  std::array<double, kCostCategoryCount> cost_totals{};
  double cost_grand_total = 0.0;
};

// Executes one deterministic run. Identical (scenario, seed) pairs produce
// identical results, including the byte-level serializations below.
RunResult run(const Scenario& sc, std::uint64_t seed);

// Variant for tests: `prepare` runs after world construction but before the
// event loop, and `inspect` runs after the final snapshot with the world
// still alive, so tests can inject state and examine ground truth.
RunResult run_with(const Scenario& sc, std::uint64_t seed,
                   const std::function<void(World&)>& prepare,
                   const std::function<void(World&)>& inspect = nullptr);

// Test scaffolding: processes queued events with time <= until.
void pump_events(World& w, double until);

// Serializations (byte-stable).
std::string snapshots_csv(const RunResult& r);
std::string summary_json(const RunResult& r);
std::string incidents_text(const RunResult& r);

// Writes snapshots.csv, summary.json and incidents.log under out_dir.
// Throws SimError on I/O failure.
void write_run_outputs(const RunResult& r, const std::string& out_dir);

}  // namespace presim
