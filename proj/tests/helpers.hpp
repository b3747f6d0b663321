#pragma once

#include <map>
#include <string>

#include "presim/scenario.hpp"

#include <doctest.h>

namespace presim::test {

// Assembles a complete scenario text from overridable pieces. Defaults are
// the quietest possible world: every threat explicitly excluded, no audits,
// no accesses, one snapshot at the horizon, unconstrained rate limits.
struct ScenarioOpts {
  std::string name = "test";
  double horizon = 10.0;
  double snapshot_every = 1e6;  // only the final snapshot
  double maintenance_interval = 1.0;
  int items = 10;
  std::string size_bytes = "1e9";
  int publishers = 1;
  bool publisher_available = true;
  std::string format_blocks =
      "format fmt {\n obsolete_at = none\n migration_target = none\n emulated = false\n}\n";
  std::string item_format = "fmt";
  int sites = 5;
  int zones = 1;
  std::string admin_domains = "per_site";
  std::string grade = "consumer";
  int units_per_site = 2;
  std::string unit =
      "capacity_bytes = 1e13\n uber_per_bit = 0\n annual_hazard = 0\n "
      "service_life_years = 1e4";
  std::string digest_store;  // inner block body, empty = none
  std::map<std::string, std::string> threats;  // per-threat body overrides
  std::string replication = "mode = fixed\n copies = 3";
  std::string ingest = "mode = push";
  std::string migration = "mode = none";
  bool preserve_original = false;
  std::string refresh_interval = "none";
  double rolling_replacement = 0.0;
  int diversity_classes = 1;
  std::string rate_limits =
      "audits_per_site_year = 1e9\n repairs_per_site_year = 1e9\n "
      "crawls_per_site_year = 1e9";
  std::string repair_vetting = "audited";
  std::string algorithm_blocks;
  std::string audit_block;
  std::string economics_block;
  double access_rate = 0.0;
  std::string extra;  // injections and anything else appended at top level
};

inline std::string make_scenario_text(const ScenarioOpts& o) {
  static const char* kThreatNames[] = {
      "media_failure",        "hardware_failure",      "software_failure",
      "communication_errors", "network_service_failure", "media_hw_obsolescence",
      "software_obsolescence", "operator_error",       "natural_disaster",
      "external_attack",      "internal_attack",       "economic_failure",
      "organizational_failure"};
  std::string s;
  s += "name = " + o.name + "\n";
  s += "horizon_years = " + std::to_string(o.horizon) + "\n";
  s += "snapshot_every_years = " + std::to_string(o.snapshot_every) + "\n";
  s += "maintenance_interval_years = " + std::to_string(o.maintenance_interval) + "\n";
  s += "items {\n count = " + std::to_string(o.items) + "\n size_bytes = " + o.size_bytes +
       "\n format = " + o.item_format + "\n publishers = " + std::to_string(o.publishers) +
       "\n publisher_available = " + (o.publisher_available ? "true" : "false") + "\n}\n";
  s += o.format_blocks;
  s += "sites {\n count = " + std::to_string(o.sites) + "\n zones = " +
       std::to_string(o.zones) + "\n admin_domains = " + o.admin_domains +
       "\n grade = " + o.grade +
       "\n units_per_site = " + std::to_string(o.units_per_site) + "\n unit {\n " +
       o.unit + "\n }\n";
  if (!o.digest_store.empty()) s += " digest_store {\n " + o.digest_store + "\n }\n";
  s += "}\n";
  s += "threats {\n";
  for (const char* name : kThreatNames) {
    auto it = o.threats.find(name);
    s += std::string(" ") + name + " {\n";
    s += it == o.threats.end() ? " excluded = true\n" : " " + it->second + "\n";
    s += " }\n";
  }
  s += "}\n";
  s += "strategy {\n replication {\n " + o.replication + "\n }\n ingest {\n " + o.ingest +
       "\n }\n migration {\n " + o.migration + "\n }\n preserve_original = " +
       (o.preserve_original ? "true" : "false") +
       "\n media_refresh_interval_years = " + o.refresh_interval +
       "\n rolling_replacement_fraction = " + std::to_string(o.rolling_replacement) +
       "\n diversity_classes = " + std::to_string(o.diversity_classes) +
       "\n rate_limits {\n " + o.rate_limits + "\n }\n repair_vetting = " +
       o.repair_vetting + "\n}\n";
  s += o.algorithm_blocks;
  if (!o.audit_block.empty()) s += o.audit_block;
  if (!o.economics_block.empty()) s += o.economics_block;
  s += "access {\n rate_per_item_year = " + std::to_string(o.access_rate) + "\n}\n";
  s += o.extra;
  return s;
}

inline Scenario load_scenario(const ScenarioOpts& o) {
  ValidationResult vr = load_scenario_string(make_scenario_text(o), o.name + ".scn");
  for (const auto& d : vr.errors) MESSAGE(d.str());
  REQUIRE(vr.ok());
  return std::move(*vr.scenario);
}

}  // namespace presim::test
