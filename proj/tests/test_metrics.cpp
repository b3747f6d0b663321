#include <cmath>
#include <numeric>

#include "presim/engine.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace presim;
using presim::test::ScenarioOpts;

TEST_CASE("a faultless world measures zero everywhere") {
  ScenarioOpts o;
  o.items = 100;
  o.horizon = 20;
  o.access_rate = 0.5;
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 1);
  CHECK(r.final.fraction_lost == 0.0);
  CHECK(r.final.fraction_impaired == 0.0);
  CHECK(r.final.fraction_unreadable == 0.0);
  CHECK(r.final.repairs_completed == 0);
  CHECK(r.final.alarms == 0);
  CHECK(r.final.failed_accesses == 0);
  CHECK(r.final.accesses > 0);
}

TEST_CASE("loss fraction is the loss predicate, exactly") {
  // 10 of 100 items with zero intact replicas and the publisher gone.
  ScenarioOpts o;
  o.items = 100;
  o.sites = 3;
  o.horizon = 5;
  o.replication = "mode = fixed\n copies = 3";
  std::string inj = "inject publisher_down {\n time = 1\n item = all\n}\n";
  for (int i = 0; i < 10; ++i)
    inj += "inject lose_replica {\n time = 2\n item = " + std::to_string(i) +
           "\n site = all\n}\n";
  o.extra = inj;
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 2);
  CHECK(r.final.fraction_lost == 0.1);
  CHECK(r.final.fraction_impaired == 0.0);
}

TEST_CASE("loss is monotone within a run") {
  ScenarioOpts o;
  o.items = 50;
  o.sites = 3;
  o.units_per_site = 1;
  o.horizon = 25;
  o.snapshot_every = 0.5;
  o.publisher_available = false;
  o.unit =
      "capacity_bytes = 1e13\n uber_per_bit = 0\n annual_hazard = 0.2\n "
      "service_life_years = 1e4";
  o.threats["media_failure"] =
      "enabled = true\n bit_errors = false\n scrub_read_coupling = false\n crashes = true";
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 3);
  double prev = 0.0;
  for (const MetricsSnapshot& s : r.snapshots) {
    CHECK(s.fraction_lost >= prev);
    prev = s.fraction_lost;
  }
  CHECK(r.final.fraction_lost > 0.0);
}

TEST_CASE("detection latency under a half-year audit cycle averages a quarter year") {
  ScenarioOpts o;
  o.items = 300;
  o.sites = 1;
  o.horizon = 5;
  o.replication = "mode = fixed\n copies = 1";
  o.algorithm_blocks = "algorithm a {\n}\n";
  o.audit_block =
      "audit {\n third_party {\n enabled = true\n interval_years = 0.5\n algorithms = a\n "
      "store = same_system\n }\n transfer_delay_years = 0.002\n}\n";
  o.extra = "inject corrupt_replica {\n time = 3\n item = all\n site = all\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 4);
  CHECK(r.final.detections == 300);
  CHECK(std::abs(r.final.detect_latency_mean - 0.25) <= 0.03);
  CHECK(r.final.detect_latency_p95 <= 0.5);
  CHECK(r.final.detect_latency_p95 >= 0.5 * 0.85);
}

TEST_CASE("delay histogram masses sum to the impaired accesses") {
  ScenarioOpts o;
  o.items = 30;
  o.sites = 2;
  o.horizon = 5;
  o.access_rate = 2.0;
  o.replication = "mode = fixed\n copies = 2";
  o.extra = "inject lose_replica {\n time = 1\n item = all\n site = all\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 5);
  CHECK(r.final.impaired_accesses > 0);
  const std::uint64_t mass =
      std::accumulate(r.final.delay_hist.begin(), r.final.delay_hist.end(),
                      std::uint64_t{0});
  CHECK(mass == r.final.impaired_accesses);
  // Publisher re-fetch is quick: everything lands in the first bucket.
  CHECK(r.final.delay_hist[0] == mass);
  CHECK(r.final.fraction_lost == 0.0);
}

TEST_CASE("aggregate statistics behave") {
  CHECK(aggregate_values({0.4}).mean == 0.4);
  CHECK(aggregate_values({0.4}).stderr_ == 0.0);
  const MetricStats same = aggregate_values({0.3, 0.3, 0.3, 0.3});
  CHECK(same.mean == doctest::Approx(0.3));
  CHECK(same.stderr_ == 0.0);
  const MetricStats spread = aggregate_values({0.0, 1.0});
  CHECK(spread.mean == doctest::Approx(0.5));
  CHECK(spread.stderr_ == doctest::Approx(0.5));
}

TEST_CASE("CSV rows line up with the header") {
  ScenarioOpts o;
  o.items = 10;
  o.horizon = 3;
  o.snapshot_every = 1;
  o.access_rate = 1.0;
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 6);
  const std::string csv = snapshots_csv(r);
  const auto count_commas = [](const std::string& line) {
    return std::count(line.begin(), line.end(), ',');
  };
  std::size_t pos = csv.find('\n');
  const auto header_commas = count_commas(csv.substr(0, pos));
  int rows = 0;
  while (pos != std::string::npos && pos + 1 < csv.size()) {
    const std::size_t next = csv.find('\n', pos + 1);
    const std::string line = csv.substr(pos + 1, next - pos - 1);
    if (!line.empty()) {
      CHECK(count_commas(line) == header_commas);
      ++rows;
    }
    pos = next;
  }
  CHECK(rows == 3);  // t=1, t=2, final
}

TEST_CASE("ground truth stays out of strategy reach: forged passes trigger no repair") {
  ScenarioOpts o;
  o.items = 1;
  o.sites = 3;
  o.horizon = 4;
  o.replication = "mode = fixed\n copies = 3";
  o.algorithm_blocks = "algorithm weak {\n broken_at = 0\n}\n";
  o.audit_block =
      "audit {\n third_party {\n enabled = true\n interval_years = 0.5\n "
      "algorithms = weak\n store = same_system\n }\n transfer_delay_years = 0.002\n}\n";
  o.extra = "inject forge_replica {\n time = 1\n item = 0\n site = 0\n algorithm = weak\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 7);
  // The simulator knows (ground truth) but the system never acted on it.
  CHECK(r.final.undetected_forgeries > 0);
  CHECK(r.final.fraction_forged > 0.0);
  CHECK(r.final.repairs_completed == 0);
}
