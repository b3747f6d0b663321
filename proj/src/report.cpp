#include "presim/report.hpp"

#include <cstdio>

namespace presim {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void line(std::string& out, const std::string& text) {
  out += text;
  out += "\n";
}

std::string replication_phrase(const Scenario& sc) {
  if (sc.strategy.replication == ReplicationMode::fixed)
    return "a fixed " + std::to_string(sc.strategy.copies) +
           " replicas created automatically at ingest across distinct sites";
  return "dynamic peer replication, target " + std::to_string(sc.strategy.target_min) +
         " copies with new replicas established when fewer than " +
         std::to_string(sc.strategy.repair_threshold) + " can be located";
}

std::string detection_phrase(const Scenario& sc) {
  std::string s;
  if (sc.audit.mutual_enabled)
    s = "mutual audit: each replica is regularly compared against the consensus "
        "of its peers by exchanging digests (interval " +
        num(sc.audit.mutual_interval_years) + " yr, quorum " +
        std::to_string(sc.audit.quorum) + ", landslide fraction " +
        num(sc.audit.landslide_fraction) + ")";
  if (sc.audit.third_party_enabled) {
    if (!s.empty()) s += "; additionally ";
    s += "third-party digest audit against previously stored digests (interval " +
         num(sc.audit.third_party_interval_years) + " yr, " +
         std::to_string(sc.audit.third_party_algorithms.size()) +
         " algorithm(s), records kept " +
         (sc.audit.store == StoreKind::external_store ? "in an external digest store"
                                                      : "inside the system itself") +
         ")";
  }
  if (s.empty()) s = "no scheduled audits are configured; damage surfaces only on access";
  return s;
}

void threat_entry(std::string& out, const Scenario& sc, ThreatClass cls,
                  const std::string& params, const std::string& handling) {
  const bool on = sc.threats.on(cls);
  line(out, std::string("  ") + to_string(cls) + ": " +
                (on ? "INCLUDED" : "EXPLICITLY EXCLUDED"));
  if (on) {
    if (!params.empty()) line(out, "    parameters: " + params);
    line(out, "    handling: " + handling);
  }
}

}  // namespace

std::string disclosure_report(const Scenario& sc) {
  std::string out;
  const ThreatSpec& t = sc.threats;
  line(out, "DISCLOSURE REPORT: " + sc.name);
  line(out, "scenario hash " + sc.source_hash_hex);
  line(out, "");

  line(out, "1. THREAT MODEL");
  line(out,
       "  Disposition of every threat in the taxonomy (nothing is silently "
       "defaulted off):");
  threat_entry(out, sc, ThreatClass::media_failure,
               std::string(t.media_failure.bit_errors ? "unrecoverable bit errors on reads"
                                                      : "bit errors disabled") +
                   (t.media_failure.crashes ? "; catastrophic unit loss per-unit hazard"
                                            : "; crashes disabled"),
               replication_phrase(sc) + "; damage found by " + detection_phrase(sc));
  threat_entry(out, sc, ThreatClass::hardware_failure,
               "transient rate " + num(t.hardware_failure.transient_rate_per_site_year) +
                   "/site-yr, fatal rate " +
                   num(t.hardware_failure.fatal_rate_per_site_year) + "/site-yr",
               "outages ride out on surviving replicas; fatal failures repaired via "
               "maintenance");
  threat_entry(out, sc, ThreatClass::software_failure,
               "rate " + num(t.software_failure.rate_per_site_year) + "/site-yr",
               "software diversity across " + std::to_string(sc.strategy.diversity_classes) +
                   " vulnerability class(es); corruption caught by audits");
  threat_entry(out, sc, ThreatClass::communication_errors,
               "undetected corruption probability " +
                   num(t.communication_errors.undetected_corruption_probability) +
                   " per transfer",
               "every transfer lands as a new replica state subject to the same audits");
  threat_entry(out, sc, ThreatClass::network_service_failure,
               "rate " + num(t.network_service_failure.rate_per_year) + "/yr affecting " +
                   num(t.network_service_failure.affected_fraction * 100) + "% of references",
               "preservation does not depend on the publisher after ingest; loss of "
               "resolvability only removes a repair source");
  threat_entry(out, sc, ThreatClass::media_hw_obsolescence, "reader-availability cutoffs",
               sc.strategy.media_refresh_interval_years
                   ? "media refreshed every " + num(*sc.strategy.media_refresh_interval_years) +
                         " yr, ahead of reader obsolescence"
                   : "service-life replacement plus rolling replacement of " +
                         num(sc.strategy.rolling_replacement_fraction * 100) + "%/yr");
  {
    std::string mig;
    switch (sc.strategy.migration) {
      case MigrationMode::none: mig = "no format migration configured"; break;
      case MigrationMode::normalize_on_ingest: mig = "normalization to a preferred format at ingest"; break;
      case MigrationMode::batch: mig = "batch format migration ahead of announced obsolescence"; break;
      case MigrationMode::on_access: mig = "transparent on-access format migration"; break;
      case MigrationMode::emulation: mig = "emulation keeps obsolete formats interpretable"; break;
    }
    if (sc.strategy.preserve_original) mig += "; originals preserved alongside";
    threat_entry(out, sc, ThreatClass::software_obsolescence, "per-format obsolescence times", mig);
  }
  const std::string domain_phrase =
      sc.sites.admin_domains == 0 ? std::string("one per site")
                                  : std::to_string(sc.sites.admin_domains) + " domains";
  threat_entry(out, sc, ThreatClass::operator_error,
               "base rate " + num(t.operator_error.base_rate_per_domain_year) +
                   "/domain-yr, stress multiplier " + num(t.operator_error.stress_multiplier),
               "separate administrative domains (" + domain_phrase +
                   "); an error touches at most one domain");
  threat_entry(out, sc, ThreatClass::natural_disaster,
               "rate " + num(t.natural_disaster.rate_per_zone_year) + "/zone-yr",
               "replicas dispersed over " + std::to_string(sc.sites.zones) +
                   " geographic zone(s)");
  threat_entry(out, sc, ThreatClass::external_attack,
               "rate " + num(t.external_attack.rate_per_class_year) + "/class-yr" +
                   (t.external_attack.forged_algorithm.empty()
                        ? ""
                        : ", capable of forging digests under " +
                              t.external_attack.forged_algorithm),
               std::to_string(sc.strategy.diversity_classes) +
                   " vulnerability class(es) limit shared-exploit blast radius; " +
                   detection_phrase(sc));
  threat_entry(out, sc, ThreatClass::internal_attack,
               "rate " + num(t.internal_attack.rate_per_domain_year) + "/domain-yr",
               "no single credential spans administrative domains; cross-domain "
               "replicas survive an insider");
  threat_entry(out, sc, ThreatClass::economic_failure,
               "shock rate " + num(t.economic_failure.shock_rate_per_year) +
                   "/yr, multiplier " + num(t.economic_failure.shock_multiplier),
               std::string(sc.budgets.size() == 1 && sc.budgets[0].per_site
                               ? "independent per-site budget streams"
                               : "budget stream(s) per configuration") +
                   "; triage defers audits, then maintenance, then sheds newest replicas");
  threat_entry(out, sc, ThreatClass::organizational_failure,
               "rate " + num(t.organizational_failure.rate_per_site_year) +
                   "/site-yr, handoff success " +
                   num(t.organizational_failure.handoff_success_probability),
               "collections transfer to a successor site when one can be arranged");
  line(out, "");

  line(out, "2. REPLICA CREATION, ADMINISTRATION, DETECTION AND REPAIR");
  line(out, "  creation: " + std::string(sc.strategy.ingest_mode == IngestMode::push
                                             ? "publisher-push ingest"
                                             : "pull ingest by independent crawling, "
                                               "reconciled against what the publisher "
                                               "is publishing") +
                "; " + replication_phrase(sc));
  line(out, "  administration: " +
                std::string(sc.sites.admin_domains == 0
                                ? "every site is its own administrative domain"
                                : std::to_string(sc.sites.admin_domains) +
                                      " administrative domains") +
                ", " + std::to_string(sc.sites.zones) + " zone(s), " +
                to_string(sc.sites.grade) + "-grade hardware");
  line(out, "  damage detection: " + detection_phrase(sc));
  line(out,
       "  repair: damaged replicas are re-fetched from the original publisher when "
       "it is still available, otherwise from a replica that passed its most recent "
       "audit; repairs, audits and crawls are rate-limited (" +
           num(sc.strategy.repairs_per_site_year) + ", " +
           num(sc.strategy.audits_per_site_year) + ", " +
           num(sc.strategy.crawls_per_site_year) +
           " per site-year) so the system runs no faster than necessary");
  line(out, "");

  line(out, "3. INTELLECTUAL PROPERTY PROTECTION");
  line(out, "  organizational -- outside simulator scope.");
  line(out,
       "  (permission costs are carried as scalars: per publisher " +
           num(sc.costs.permission_per_publisher) + ", per item " +
           num(sc.costs.permission_per_item) + ")");
  line(out, "");
  line(out, "4. EXTERNAL INTERFACES (SIP/DIP SPECIFICATIONS)");
  line(out, "  organizational -- outside simulator scope.");
  line(out, "");
  line(out, "5. SOURCE CODE ACCESS AND PRESERVATION POLICY");
  line(out, "  organizational -- outside simulator scope.");
  line(out, "");
  line(out, "6. WHO CONDUCTS AUDITS, HOW, AND WHO SEES RESULTS");
  line(out, "  organizational -- outside simulator scope.");
  line(out, "  (mechanisms configured here: " + detection_phrase(sc) + ")");
  line(out, "");
  line(out, "7. INCIDENT HANDLING AND DATA-LOSS REPORTING POLICY");
  line(out, "  organizational -- outside simulator scope.");
  line(out, "  (every run emits a timestamped incident log for this purpose)");
  return out;
}

}  // namespace presim
