#include <cmath>

#include "presim/engine.hpp"
#include "presim/relcalc.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace presim;
using presim::test::ScenarioOpts;

TEST_CASE("identical scenario and seed reproduce byte-identical outputs") {
  ScenarioOpts o;
  o.items = 50;
  o.sites = 4;
  o.horizon = 10;
  o.snapshot_every = 1;
  o.access_rate = 0.5;
  o.unit =
      "capacity_bytes = 1e13\n uber_per_bit = 1e-12\n annual_hazard = 0.05\n "
      "service_life_years = 5";
  o.threats["media_failure"] =
      "enabled = true\n bit_errors = true\n scrub_read_coupling = true\n crashes = true";
  o.threats["operator_error"] =
      "enabled = true\n base_rate_per_domain_year = 0.05\n recoverable_fraction = 0.5\n "
      "stress_multiplier = 3\n stress_window_years = 0.1";
  o.algorithm_blocks = "algorithm a {\n}\n";
  o.audit_block =
      "audit {\n third_party {\n enabled = true\n interval_years = 0.5\n algorithms = a\n "
      "store = same_system\n }\n transfer_delay_years = 0.002\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  const RunResult a = run(sc, 42);
  const RunResult b = run(sc, 42);
  CHECK(summary_json(a) == summary_json(b));
  CHECK(snapshots_csv(a) == snapshots_csv(b));
  CHECK(incidents_text(a) == incidents_text(b));
  const RunResult c = run(sc, 43);
  CHECK(summary_json(a) != summary_json(c));
}

TEST_CASE("no faults, no losses: the null result is exactly null") {
  ScenarioOpts o;
  o.items = 200;
  o.horizon = 50;
  o.snapshot_every = 5;
  o.access_rate = 0.1;
  o.replication = "mode = p2p\n target_min = 3\n repair_threshold = 2";
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 1);
  CHECK(r.final.fraction_lost == 0.0);
  CHECK(r.final.fraction_impaired == 0.0);
  CHECK(r.final.repairs_completed == 0);
  CHECK(r.final.alarms == 0);
  CHECK(r.final.detections == 0);
}

TEST_CASE("empirical loss tracks the exponential-survival closed form") {
  // One item, one replica, hazard 0.1/yr, 10-year horizon, no repair. The
  // closed form (independent exponential, relcalc) is the oracle.
  ScenarioOpts o;
  o.items = 1;
  o.sites = 1;
  o.units_per_site = 1;
  o.horizon = 10;
  o.publisher_available = false;
  o.replication = "mode = fixed\n copies = 1";
  o.unit =
      "capacity_bytes = 1e13\n uber_per_bit = 0\n annual_hazard = 0.1\n "
      "service_life_years = 1e4";
  o.threats["media_failure"] =
      "enabled = true\n bit_errors = false\n scrub_read_coupling = false\n crashes = true";
  Scenario sc = presim::test::load_scenario(o);
  const int seeds = 2000;
  int lost = 0;
  for (int s = 0; s < seeds; ++s)
    lost += run(sc, static_cast<std::uint64_t>(s)).final.fraction_lost > 0.5;
  const double expected = relcalc::replica_loss_prob(1, 0.1, 10.0);
  const double se = std::sqrt(expected * (1.0 - expected) / seeds);
  CHECK(std::abs(static_cast<double>(lost) / seeds - expected) <= 3.0 * se);
}

TEST_CASE("prepare hook runs before the loop; past scheduling still aborts") {
  ScenarioOpts o;
  o.items = 1;
  Scenario sc = presim::test::load_scenario(o);
  bool threw = false;
  try {
    run_with(sc, 1, [](World& w) {
      w.queue.schedule(Event{-1.0, 0, EventKind::access, 0, kNone, kNone, 0.0, 0});
    });
  } catch (const SimError&) {
    threw = true;
  }
  CHECK(threw);
}

TEST_CASE("snapshots land on the cadence plus the horizon") {
  ScenarioOpts o;
  o.items = 5;
  o.horizon = 10;
  o.snapshot_every = 2.5;
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 2);
  REQUIRE(r.snapshots.size() == 4);  // 2.5, 5, 7.5, 10
  CHECK(r.snapshots[0].time == 2.5);
  CHECK(r.snapshots.back().time == 10.0);
}

TEST_CASE("a scenario touching every module completes and accounts for itself") {
  ScenarioOpts o;
  o.items = 100;
  o.sites = 8;
  o.zones = 4;
  o.units_per_site = 2;
  o.horizon = 30;
  o.snapshot_every = 2;
  o.access_rate = 0.2;
  o.diversity_classes = 3;
  o.publishers = 5;
  o.replication = "mode = p2p\n target_min = 5\n repair_threshold = 4";
  o.ingest = "mode = pull_crawl\n miss_probability = 0.1";
  o.rolling_replacement = 0.1;
  o.unit =
      "capacity_bytes = 1e13\n uber_per_bit = 1e-12\n annual_hazard = 0.03\n "
      "service_life_years = 6";
  o.threats["media_failure"] =
      "enabled = true\n bit_errors = true\n scrub_read_coupling = true\n crashes = true";
  o.threats["hardware_failure"] =
      "enabled = true\n transient_rate_per_site_year = 0.3\n mean_outage_years = 0.01\n "
      "fatal_rate_per_site_year = 0.02\n mean_restore_years = 0.05";
  o.threats["software_failure"] =
      "enabled = true\n rate_per_site_year = 0.1\n scope = replica";
  o.threats["communication_errors"] =
      "enabled = true\n undetected_corruption_probability = 1e-4";
  o.threats["network_service_failure"] =
      "enabled = true\n rate_per_year = 0.1\n affected_fraction = 0.05";
  o.threats["operator_error"] =
      "enabled = true\n base_rate_per_domain_year = 0.05\n recoverable_fraction = 0.6\n "
      "stress_multiplier = 3\n stress_window_years = 0.05";
  o.threats["natural_disaster"] =
      "enabled = true\n rate_per_zone_year = 0.005\n unit_crash_probability = 0.8";
  o.threats["external_attack"] =
      "enabled = true\n rate_per_class_year = 0.01\n compromise_probability = 0.9";
  o.threats["internal_attack"] =
      "enabled = true\n rate_per_domain_year = 0.002\n effect = corrupt\n "
      "compromise_probability = 0.7";
  o.threats["economic_failure"] =
      "enabled = true\n shock_rate_per_year = 0.01\n shock_multiplier = 0.5";
  o.threats["organizational_failure"] =
      "enabled = true\n rate_per_site_year = 0.003\n handoff_success_probability = 0.8";
  o.algorithm_blocks = "algorithm a {\n}\nalgorithm b {\n}\n";
  o.audit_block =
      "audit {\n third_party {\n enabled = true\n interval_years = 1\n algorithms = a, b\n "
      "store = external\n }\n mutual {\n enabled = true\n interval_years = 0.5\n "
      "quorum = 10\n landslide_fraction = 0.75\n algorithm = a\n }\n "
      "transfer_delay_years = 0.002\n}\n";
  o.digest_store =
      "zone = 0\n admin_domain = own\n units = 2\n unit {\n capacity_bytes = 1e12\n "
      "uber_per_bit = 0\n annual_hazard = 0.01\n service_life_years = 6\n }";
  o.economics_block =
      "economics {\n costs {\n permission_per_publisher = 10\n "
      "ingest_per_item_automated = 1\n hardware_per_gb_year_consumer = 0.57\n "
      "hardware_per_gb_year_enterprise = 8.2\n ops_per_replica_year = 1\n "
      "audit_per_poll = 0.01\n serving_per_access = 0.01\n auth_system_per_year = 100\n }\n "
      "budget b {\n per_site = true\n funds_per_year = 1e5\n }\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 99);
  CHECK(r.final.time == 30.0);
  CHECK(r.final.fraction_lost >= 0.0);
  CHECK(r.final.fraction_lost <= 1.0);
  CHECK(r.cost_grand_total > 0.0);
  // Determinism even for the kitchen sink.
  RunResult r2 = run(sc, 99);
  CHECK(summary_json(r) == summary_json(r2));
}
