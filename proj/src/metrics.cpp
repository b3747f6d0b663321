#include "presim/metrics.hpp"

#include "presim/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "presim/economics.hpp"

namespace presim {

namespace {

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out += buf;
}

void append_u64(std::string& out, std::uint64_t v) {
  out += std::to_string(v);
}

}  // namespace

namespace metrics {

MetricsSnapshot take_snapshot(World& w, double time) {
  economics::accrue_continuous(w, time);

  MetricsSnapshot s;
  s.time = time;
  s.items_total = static_cast<std::uint32_t>(w.items.size());

  std::uint32_t lost = 0, impaired = 0, unreadable = 0, forged = 0;
  std::uint64_t intact_sum = 0;
  for (ItemId i = 0; i < w.items.size(); ++i) {
    const int intact = w.intact_count(i);
    intact_sum += static_cast<std::uint64_t>(intact);
    s.replica_hist[static_cast<std::size_t>(std::min(intact, 6))] += 1;

    bool any_forged = false;
    for (ReplicaId r : w.items[i].replicas)
      any_forged |= w.replicas[r].present && w.replicas[r].state == ReplicaState::forged;
    forged += any_forged ? 1 : 0;

    if (w.irrecoverably_lost(i)) {
      ++lost;
    } else if (intact > 0 && !w.item_readable(i)) {
      ++unreadable;
    } else if (w.item_impaired(i) || w.items[i].impaired_flagged) {
      ++impaired;
    }
  }
  const double n = std::max<double>(1.0, static_cast<double>(w.items.size()));
  s.fraction_lost = static_cast<double>(lost) / n;
  s.fraction_impaired = static_cast<double>(impaired) / n;
  s.fraction_unreadable = static_cast<double>(unreadable) / n;
  s.fraction_forged = static_cast<double>(forged) / n;
  s.mean_intact_replicas = static_cast<double>(intact_sum) / n;

  // Loss is permanent by definition; a shrinking fraction means the loss
  // predicate broke.
  if (s.fraction_lost + 1e-12 < w.last_fraction_lost)
    throw SimError("irrecoverable-loss fraction decreased within a run");
  w.last_fraction_lost = s.fraction_lost;

  s.detections = w.detection_latencies.size();
  if (!w.detection_latencies.empty()) {
    double sum = 0.0;
    for (double v : w.detection_latencies) sum += v;
    s.detect_latency_mean = sum / static_cast<double>(w.detection_latencies.size());
    std::vector<double> sorted = w.detection_latencies;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t idx = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(sorted.size()) - 1.0,
                         std::ceil(0.95 * static_cast<double>(sorted.size())) - 1.0));
    s.detect_latency_p95 = sorted[idx];
  }
  s.undetected_forgeries = w.undetected_forgeries;
  s.accesses = w.accesses;
  s.impaired_accesses = w.impaired_accesses;
  s.failed_accesses = w.failed_accesses;
  s.delay_hist = w.delay_hist;
  s.repairs_completed = w.repairs_completed;
  s.repairs_bad = w.repairs_bad;
  s.alarms = w.alarms;
  s.cost = w.ledger.totals();
  s.cost_total = w.ledger.grand_total();
  std::uint64_t ev = 0;
  for (std::uint64_t c : w.event_counts) ev += c;
  s.events_total = ev;
  return s;
}

std::string csv_header(const std::vector<double>& delay_buckets) {
  std::string h =
      "time,items_total,fraction_lost,fraction_impaired,fraction_unreadable,"
      "fraction_forged,mean_intact_replicas,items_with_0_intact,items_with_1_intact,"
      "items_with_2_intact,items_with_3_intact,items_with_4_intact,items_with_5_intact,"
      "items_with_6plus_intact,detect_latency_mean,detect_latency_p95,detections,"
      "undetected_forgeries,accesses,impaired_accesses,failed_accesses";
  for (std::size_t i = 0; i < delay_buckets.size(); ++i) {
    char buf[48];
    std::snprintf(buf, sizeof buf, ",delayed_upto_%.10g_yr", delay_buckets[i]);
    h += buf;
  }
  h += ",delayed_over_last_bucket";
  h += ",repairs_completed,repairs_bad,alarms";
  for (std::size_t c = 0; c < kCostCategoryCount; ++c)
    h += std::string(",cost_") + to_string(static_cast<CostCategory>(c));
  h += ",cost_total,events_total";
  return h;
}

std::string csv_row(const MetricsSnapshot& s) {
  std::string r;
  append_num(r, s.time);
  r += ",";
  append_u64(r, s.items_total);
  for (double v : {s.fraction_lost, s.fraction_impaired, s.fraction_unreadable,
                   s.fraction_forged, s.mean_intact_replicas}) {
    r += ",";
    append_num(r, v);
  }
  for (std::uint64_t v : s.replica_hist) {
    r += ",";
    append_u64(r, v);
  }
  r += ",";
  append_num(r, s.detect_latency_mean);
  r += ",";
  append_num(r, s.detect_latency_p95);
  for (std::uint64_t v : {s.detections, s.undetected_forgeries, s.accesses,
                          s.impaired_accesses, s.failed_accesses}) {
    r += ",";
    append_u64(r, v);
  }
  for (std::uint64_t v : s.delay_hist) {
    r += ",";
    append_u64(r, v);
  }
  for (std::uint64_t v : {s.repairs_completed, s.repairs_bad, s.alarms}) {
    r += ",";
    append_u64(r, v);
  }
  for (double v : s.cost) {
    r += ",";
    append_num(r, v);
  }
  r += ",";
  append_num(r, s.cost_total);
  r += ",";
  append_u64(r, s.events_total);
  return r;
}

}  // namespace metrics

MetricStats aggregate_values(const std::vector<double>& values) {
  MetricStats st;
  st.n = values.size();
  if (values.empty()) return st;
  double sum = 0.0;
  for (double v : values) sum += v;
  st.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    st.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
  }
  return st;
}

}  // namespace presim
