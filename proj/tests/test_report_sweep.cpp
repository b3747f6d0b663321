#include "presim/report.hpp"
#include "presim/sweep.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace presim;
using presim::test::ScenarioOpts;

TEST_CASE("disclosure report has exactly seven sections") {
  Scenario sc = presim::test::load_scenario(ScenarioOpts{});
  const std::string text = disclosure_report(sc);
  for (int i = 1; i <= 7; ++i) {
    const std::string marker = std::to_string(i) + ". ";
    CAPTURE(i);
    CHECK(text.find("\n" + marker) != std::string::npos);
  }
  CHECK(text.find("8. ") == std::string::npos);
  // Organizational sections are marked as such.
  std::size_t marked = 0, pos = 0;
  while ((pos = text.find("organizational -- outside simulator scope", pos)) !=
         std::string::npos) {
    ++marked;
    pos += 1;
  }
  CHECK(marked == 5);
}

TEST_CASE("excluded threats are disclosed as explicitly excluded") {
  ScenarioOpts o;  // all threats excluded by default
  o.threats["media_failure"] = "enabled = true";
  Scenario sc = presim::test::load_scenario(o);
  const std::string text = disclosure_report(sc);
  CHECK(text.find("natural_disaster: EXPLICITLY EXCLUDED") != std::string::npos);
  CHECK(text.find("media_failure: INCLUDED") != std::string::npos);
}

TEST_CASE("p2p strategies name mutual audit as the damage-detection mechanism") {
  ScenarioOpts o;
  o.replication = "mode = p2p\n target_min = 7\n repair_threshold = 5";
  o.algorithm_blocks = "algorithm a {\n}\n";
  o.audit_block =
      "audit {\n mutual {\n enabled = true\n interval_years = 0.25\n quorum = 10\n "
      "landslide_fraction = 0.75\n algorithm = a\n }\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  const std::string text = disclosure_report(sc);
  const std::size_t item2 = text.find("2. REPLICA");
  const std::size_t item3 = text.find("3. INTELLECTUAL");
  REQUIRE(item2 != std::string::npos);
  const std::string section2 = text.substr(item2, item3 - item2);
  CHECK(section2.find("mutual audit") != std::string::npos);
}

TEST_CASE("sweep runs the full matrix with paired seeds and aggregates") {
  ScenarioOpts o;
  o.items = 10;
  o.sites = 6;
  o.units_per_site = 1;
  o.horizon = 10;
  o.publisher_available = false;
  o.replication = "mode = fixed\n copies = 1";
  o.unit =
      "capacity_bytes = 1e13\n uber_per_bit = 0\n annual_hazard = 0.15\n "
      "service_life_years = 1e4";
  o.threats["media_failure"] =
      "enabled = true\n bit_errors = false\n scrub_read_coupling = false\n crashes = true";
  const std::string text = presim::test::make_scenario_text(o);
  cfg::ParseResult parsed = cfg::parse_string(text, "sweep_base.scn");
  REQUIRE(parsed.ok());

  SweepOptions opt;
  opt.axis_key = "strategy.replication.copies";
  opt.axis_values = {"1", "2", "4"};
  opt.seeds = 40;
  opt.jobs = 4;
  SweepResult r = run_sweep(parsed.root, "sweep_base.scn", opt);
  REQUIRE(r.ok());
  REQUIRE(r.points.size() == 3);
  for (const SweepPoint& p : r.points) CHECK(p.finals.size() == 40);

  // More copies, less loss (common random numbers make this monotone).
  std::vector<double> means;
  for (const SweepPoint& p : r.points) {
    double sum = 0.0;
    for (const MetricsSnapshot& s : p.finals) sum += s.fraction_lost;
    means.push_back(sum / 40.0);
  }
  CHECK(means[0] >= means[1]);
  CHECK(means[1] >= means[2]);

  // Deterministic regardless of parallelism.
  opt.jobs = 1;
  SweepResult serial = run_sweep(parsed.root, "sweep_base.scn", opt);
  REQUIRE(serial.ok());
  CHECK(sweep_aggregate_csv(serial, opt.axis_key) == sweep_aggregate_csv(r, opt.axis_key));
  CHECK(sweep_point_json(serial, 2, opt.axis_key) == sweep_point_json(r, 2, opt.axis_key));

  // An invalid axis value surfaces as a located diagnostic, not a crash.
  opt.axis_values = {"1", "0"};
  SweepResult bad = run_sweep(parsed.root, "sweep_base.scn", opt);
  CHECK_FALSE(bad.ok());
}

TEST_CASE("sloth: rate-limited repair loses fewer items to cascading bad repairs") {
  // A worm rewrites a majority of each item's replicas with one payload.
  // Mutual audit then talks every intact minority copy into "repairing"
  // itself from the corrupt consensus. Unlimited repair completes that
  // destruction quickly; a tight rate limit leaves intact copies at the
  // horizon. Paired seed, deterministic comparison.
  auto lost_with_limit = [](const std::string& repairs_per_year) {
    ScenarioOpts o;
    o.items = 60;
    o.sites = 7;
    o.horizon = 6;
    o.publisher_available = false;
    o.replication = "mode = fixed\n copies = 7";
    o.rate_limits = "audits_per_site_year = 1e9\n repairs_per_site_year = " +
                    repairs_per_year + "\n crawls_per_site_year = 1e9";
    o.algorithm_blocks = "algorithm weak {\n broken_at = 0\n}\nalgorithm good {\n}\n";
    o.audit_block =
        "audit {\n mutual {\n enabled = true\n interval_years = 0.25\n quorum = 10\n "
        "landslide_fraction = 0.75\n algorithm = good\n }\n transfer_delay_years = 0.002\n}\n";
    std::string inj;
    for (int site = 0; site < 5; ++site)
      inj += "inject forge_replica {\n time = 1\n item = all\n site = " +
             std::to_string(site) + "\n algorithm = weak\n}\n";
    o.extra = inj;
    Scenario sc = presim::test::load_scenario(o);
    return run(sc, 17).final.fraction_lost;
  };
  const double limited = lost_with_limit("2");
  const double unlimited = lost_with_limit("1e9");
  CHECK(limited < unlimited);
  CHECK(unlimited > 0.9);  // the cascade really does destroy the collection
}
