#include <cmath>

#include "presim/audit.hpp"
#include "presim/engine.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace presim;
using presim::test::ScenarioOpts;

namespace {

ScenarioOpts audited_world(const std::string& algorithms_cfg,
                           const std::string& tp_algs, const std::string& store) {
  ScenarioOpts o;
  o.items = 1;
  o.sites = 7;
  o.horizon = 5;
  o.replication = "mode = fixed\n copies = 7";
  o.algorithm_blocks = algorithms_cfg;
  o.audit_block =
      "audit {\n third_party {\n enabled = true\n interval_years = 0.5\n algorithms = " +
      tp_algs + "\n store = " + store + "\n }\n transfer_delay_years = 0.002\n}\n";
  if (store == "external")
    o.digest_store =
        "zone = 0\n admin_domain = own\n units = 1\n unit {\n capacity_bytes = 1e12\n "
        "uber_per_bit = 0\n annual_hazard = 0\n service_life_years = 1e4\n }";
  return o;
}

}  // namespace

TEST_CASE("intact replica with intact records passes on every algorithm") {
  for (const char* store : {"same_system", "external"}) {
    ScenarioOpts o = audited_world("algorithm a {\n}\nalgorithm b {\n}\n", "a, b", store);
    Scenario sc = presim::test::load_scenario(o);
    World w = build_world(sc, 1);
    pump_events(w, 0.0);
    CHECK(audit::third_party_audit_replica(w, 0) == AuditVerdict::pass);
    CHECK(w.replicas[0].last_audit_pass);
    CHECK(w.undetected_forgeries == 0);
  }
}

TEST_CASE("silent corruption always yields a mismatch: no false negatives") {
  ScenarioOpts o = audited_world("algorithm a {\n}\n", "a", "same_system");
  Scenario sc = presim::test::load_scenario(o);
  World w = build_world(sc, 2);
  pump_events(w, 0.0);
  Rng nonce(7);
  for (int trial = 0; trial < 200; ++trial) {
    const ReplicaId r = static_cast<ReplicaId>(trial % 7);
    w.corrupt_replica(r, nonce.next_u64(), "test");
    CHECK(audit::third_party_audit_replica(w, r) == AuditVerdict::mismatch);
    CHECK(w.replicas[r].flagged_bad);
    // Reset for the next round.
    w.restore_replica(r, ContentToken{0, 0, kNone}, true, "test");
  }
}

TEST_CASE("a corrupt store record reads as a mismatch with ambiguous cause") {
  ScenarioOpts o = audited_world("algorithm a {\n}\n", "a", "external");
  Scenario sc = presim::test::load_scenario(o);
  World w = build_world(sc, 3);
  pump_events(w, 0.0);
  w.corrupt_store_record(w.store_index(0, 0, 0), 99, "test");
  CHECK(audit::third_party_audit_replica(w, 0) == AuditVerdict::mismatch);
  bool ambiguous = false;
  for (const Incident& inc : w.incidents)
    ambiguous |= inc.detail.find("cannot tell which") != std::string::npos;
  CHECK(ambiguous);
}

TEST_CASE("forgery under a broken algorithm defeats a single-algorithm audit") {
  ScenarioOpts o = audited_world("algorithm weak {\n broken_at = 0\n}\n", "weak",
                                 "external");
  Scenario sc = presim::test::load_scenario(o);
  World w = build_world(sc, 4);
  pump_events(w, 0.0);
  w.forge_replica(0, 1234, 0, "test");
  CHECK(audit::third_party_audit_replica(w, 0) == AuditVerdict::pass);
  CHECK(w.undetected_forgeries == 1);
  REQUIRE_FALSE(w.outcomes.empty());
  CHECK(w.outcomes.back().verdict == AuditVerdict::undetected_forgery);
}

TEST_CASE("a second unbroken algorithm catches the forgery") {
  ScenarioOpts o = audited_world(
      "algorithm weak {\n broken_at = 0\n}\nalgorithm strong {\n}\n", "weak, strong",
      "external");
  Scenario sc = presim::test::load_scenario(o);
  World w = build_world(sc, 5);
  pump_events(w, 0.0);
  w.forge_replica(0, 1234, 0, "test");
  CHECK(audit::third_party_audit_replica(w, 0) == AuditVerdict::mismatch);
  CHECK(w.undetected_forgeries == 0);
}

TEST_CASE("rollover appends the new algorithm after verifying the old one") {
  ScenarioOpts o = audited_world(
      "algorithm old_alg {\n broken_at = 4\n break_public_at = 4.5\n}\n"
      "algorithm new_alg {\n}\n",
      "old_alg", "same_system");
  o.audit_block =
      "audit {\n third_party {\n enabled = true\n interval_years = 0.5\n "
      "algorithms = old_alg\n store = same_system\n }\n rollover {\n at = 2\n "
      "from = old_alg\n to = new_alg\n }\n transfer_delay_years = 0.002\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  World w = build_world(sc, 6);
  pump_events(w, 0.0);
  for (ReplicaId r = 0; r < 7; ++r) REQUIRE(w.replicas[r].digests.size() == 1);
  pump_events(w, 2.0);
  for (ReplicaId r = 0; r < 7; ++r) {
    REQUIRE(w.replicas[r].digests.size() == 2);
    CHECK(w.replicas[r].digests[0].algorithm == 0);
    CHECK(w.replicas[r].digests[1].algorithm == 1);
    CHECK(w.replicas[r].digests[1].assured);
  }
}

TEST_CASE("rollover aborts on damaged content and repairs it first") {
  ScenarioOpts o = audited_world(
      "algorithm old_alg {\n}\nalgorithm new_alg {\n}\n", "old_alg", "same_system");
  o.audit_block =
      "audit {\n third_party {\n enabled = true\n interval_years = 10\n "
      "algorithms = old_alg\n store = same_system\n }\n rollover {\n at = 2\n "
      "from = old_alg\n to = new_alg\n }\n transfer_delay_years = 0.002\n}\n";
  o.extra = "inject corrupt_replica {\n time = 1\n item = 0\n site = 0\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  RunResult r = run(sc, 7);
  bool aborted = false;
  for (const Incident& inc : r.incidents)
    aborted |= inc.category == "rollover_abort";
  CHECK(aborted);
  CHECK(r.final.repairs_completed >= 1);
}

TEST_CASE("rollover after the public break is flagged as an assurance gap") {
  ScenarioOpts o = audited_world(
      "algorithm old_alg {\n broken_at = 1\n break_public_at = 1.5\n}\n"
      "algorithm new_alg {\n}\n",
      "old_alg", "same_system");
  o.audit_block =
      "audit {\n third_party {\n enabled = true\n interval_years = 0.5\n "
      "algorithms = old_alg\n store = same_system\n }\n rollover {\n at = 3\n "
      "from = old_alg\n to = new_alg\n }\n transfer_delay_years = 0.002\n}\n";
  Scenario sc = presim::test::load_scenario(o);
  World w = build_world(sc, 8);
  pump_events(w, 3.0);
  bool gap = false;
  for (const Incident& inc : w.incidents) gap |= inc.category == "assurance_gap";
  CHECK(gap);
  CHECK_FALSE(w.replicas[0].digests.back().assured);
}

namespace {

ScenarioOpts mutual_world(int copies) {
  ScenarioOpts o;
  o.items = 1;
  o.sites = copies;
  o.horizon = 5;
  o.replication = "mode = fixed\n copies = " + std::to_string(copies);
  o.algorithm_blocks = "algorithm a {\n}\n";
  o.audit_block =
      "audit {\n mutual {\n enabled = true\n interval_years = 1\n quorum = 10\n "
      "landslide_fraction = 0.75\n algorithm = a\n }\n transfer_delay_years = 0.002\n}\n";
  return o;
}

}  // namespace

TEST_CASE("mutual audit: all replicas agree, the round passes") {
  Scenario sc = presim::test::load_scenario(mutual_world(7));
  World w = build_world(sc, 9);
  pump_events(w, 0.0);
  CHECK(audit::mutual_audit_round(w, 0) == AuditVerdict::pass);
  CHECK(w.alarms == 0);
}

TEST_CASE("mutual audit: a corrupt poller is repaired from the winning side") {
  Scenario sc = presim::test::load_scenario(mutual_world(7));
  World w = build_world(sc, 10);
  pump_events(w, 0.0);
  // Round 0 polls via replica 0; damage exactly that copy.
  w.corrupt_replica(0, 42, "test");
  CHECK(audit::mutual_audit_round(w, 0) == AuditVerdict::repaired);
  pump_events(w, 0.01);  // let the repair transfer land
  CHECK(w.intact_count(0) == 7);
  CHECK(w.repairs_bad == 0);
}

TEST_CASE("mutual audit: an even split raises the intrusion alarm") {
  Scenario sc = presim::test::load_scenario(mutual_world(7));
  World w = build_world(sc, 11);
  pump_events(w, 0.0);
  // Poller intact; three peers carry one identical foreign payload: 3 vs 3.
  for (ReplicaId r : {1u, 2u, 3u}) w.corrupt_replica(r, 777, "test");
  CHECK(audit::mutual_audit_round(w, 0) == AuditVerdict::alarm);
  CHECK(w.alarms == 1);
  // Nobody's content was touched by the alarm.
  CHECK(w.intact_count(0) == 4);
}

TEST_CASE("mutual audit withholds content: votes are digests only") {
  // Structural property: a round with no repair moves no payload, so transfer
  // machinery stays idle even when votes disagree below thresholds.
  Scenario sc = presim::test::load_scenario(mutual_world(7));
  World w = build_world(sc, 12);
  pump_events(w, 0.0);
  for (ReplicaId r : {1u, 2u, 3u}) w.corrupt_replica(r, 777, "test");
  (void)audit::mutual_audit_round(w, 0);
  for (const Transfer& t : w.transfers) CHECK_FALSE(t.active);
}

TEST_CASE("mutual-audit safety: an outvoted corrupt poller always heals") {
  // Hand-rolled property: for any replica count and any corrupt minority
  // strictly below 1 - landslide, a corrupt poller ends the round repaired
  // to intact (no transit corruption configured).
  Rng rng(2025);
  for (int trial = 0; trial < 40; ++trial) {
    const int copies = 4 + static_cast<int>(rng.below(7));  // 4..10
    Scenario sc = presim::test::load_scenario(mutual_world(copies));
    World w = build_world(sc, 1000 + static_cast<std::uint64_t>(trial));
    pump_events(w, 0.0);
    // Corrupt the poller plus a minority of peers, each with its own damage.
    const int peers = copies - 1;
    const int max_bad_peers =
        static_cast<int>(std::ceil((1.0 - 0.75) * peers)) - 1;
    const int bad_peers = max_bad_peers > 0 ? static_cast<int>(rng.below(
                                                  static_cast<std::uint64_t>(max_bad_peers) + 1))
                                            : 0;
    w.corrupt_replica(0, rng.next_u64(), "test");
    for (int k = 0; k < bad_peers; ++k)
      w.corrupt_replica(static_cast<ReplicaId>(1 + k), rng.next_u64(), "test");
    const AuditVerdict v = audit::mutual_audit_round(w, 0);
    CAPTURE(copies);
    CAPTURE(bad_peers);
    CHECK(v == AuditVerdict::repaired);
    pump_events(w, 0.01);
    CHECK(w.replicas[0].state == ReplicaState::intact);
  }
}

TEST_CASE("mutual audit defers without enough reachable peers") {
  Scenario sc = presim::test::load_scenario(mutual_world(2));
  World w = build_world(sc, 13);
  pump_events(w, 0.0);
  w.lose_replica(1, "test");
  CHECK(audit::mutual_audit_round(w, 0) == AuditVerdict::deferred);
}

TEST_CASE("dual audit mechanisms dominate either alone under algorithm breakage") {
  // Paired seeds across three configurations of the same stormy world: a
  // forging attacker (broken algorithm), plus background bit rot. Bad
  // outcomes = irrecoverably lost + still-forged items at the horizon.
  auto bad_outcomes = [](bool third, bool mutual, std::uint64_t seed) {
    ScenarioOpts o;
    o.items = 60;
    o.sites = 7;
    o.horizon = 8;
    o.publisher_available = false;
    o.replication = "mode = fixed\n copies = 5";
    o.unit =
        "capacity_bytes = 1e13\n uber_per_bit = 1e-13\n annual_hazard = 0\n "
        "service_life_years = 1e4";
    o.threats["media_failure"] =
        "enabled = true\n bit_errors = true\n scrub_read_coupling = false\n crashes = false";
    o.threats["external_attack"] =
        "enabled = true\n rate_per_class_year = 0.15\n compromise_probability = 1\n "
        "forged_algorithm = weak";
    o.algorithm_blocks = "algorithm weak {\n broken_at = 0\n}\nalgorithm strong {\n}\n";
    o.digest_store =
        "zone = 0\n admin_domain = own\n units = 1\n unit {\n capacity_bytes = 1e12\n "
        "uber_per_bit = 0\n annual_hazard = 0\n service_life_years = 1e4\n }";
    std::string audit = "audit {\n";
    if (third)
      audit +=
          " third_party {\n enabled = true\n interval_years = 0.5\n algorithms = weak\n "
          "store = external\n }\n";
    if (mutual)
      audit +=
          " mutual {\n enabled = true\n interval_years = 0.5\n quorum = 10\n "
          "landslide_fraction = 0.75\n algorithm = strong\n }\n";
    audit += " transfer_delay_years = 0.002\n}\n";
    o.audit_block = audit;
    Scenario sc = presim::test::load_scenario(o);
    const RunResult r = run(sc, seed);
    return r.final.fraction_lost + r.final.fraction_forged;
  };
  double third_only = 0, mutual_only = 0, both = 0;
  const int seeds = 12;
  for (int s = 0; s < seeds; ++s) {
    third_only += bad_outcomes(true, false, static_cast<std::uint64_t>(s));
    mutual_only += bad_outcomes(false, true, static_cast<std::uint64_t>(s));
    both += bad_outcomes(true, true, static_cast<std::uint64_t>(s));
  }
  CHECK(both <= third_only + 1e-9);
  CHECK(both <= mutual_only + 1e-9);
}
