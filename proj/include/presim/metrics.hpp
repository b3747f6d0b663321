#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "presim/events.hpp"
#include "presim/ledger.hpp"

namespace presim {

struct World;

struct MetricsSnapshot {
  double time = 0.0;
  std::uint32_t items_total = 0;
  double fraction_lost = 0.0;       // irrecoverable, by the loss predicate
  double fraction_impaired = 0.0;   // recoverable but not immediately servable
  double fraction_unreadable = 0.0; // bits intact, format not interpretable
  double fraction_forged = 0.0;     // ground truth: items with a forged replica
  double mean_intact_replicas = 0.0;
  std::array<std::uint64_t, 7> replica_hist{};  // intact count 0..5, 6+
  double detect_latency_mean = 0.0;
  double detect_latency_p95 = 0.0;
  std::uint64_t detections = 0;
  std::uint64_t undetected_forgeries = 0;
  std::uint64_t accesses = 0;
  std::uint64_t impaired_accesses = 0;
  std::uint64_t failed_accesses = 0;
  std::vector<std::uint64_t> delay_hist;
  std::uint64_t repairs_completed = 0;
  std::uint64_t repairs_bad = 0;
  std::uint64_t alarms = 0;
  std::array<double, kCostCategoryCount> cost{};
  double cost_total = 0.0;
  std::uint64_t events_total = 0;
};

namespace metrics {

// Evaluates the degradation metrics at `time`. Also asserts loss
// monotonicity: irrecoverable loss can never shrink within a run.
MetricsSnapshot take_snapshot(World& w, double time);

// CSV serialization; column order is part of the external contract and is
// documented in the README.
std::string csv_header(const std::vector<double>& delay_buckets);
std::string csv_row(const MetricsSnapshot& s);

}  // namespace metrics

// Cross-run aggregation for sweeps.
struct MetricStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

MetricStats aggregate_values(const std::vector<double>& values);

}  // namespace presim
