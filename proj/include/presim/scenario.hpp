#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "presim/config.hpp"
#include "presim/content.hpp"

namespace presim {

// ---------------------------------------------------------------------------
// Threats. The taxonomy has thirteen entries; validation rejects a scenario
// unless every one of them is either enabled with parameters or explicitly
// excluded. There is no silent default-off.
// ---------------------------------------------------------------------------

enum class ThreatClass : std::uint8_t {
  media_failure,
  hardware_failure,
  software_failure,
  communication_errors,
  network_service_failure,
  media_hw_obsolescence,
  software_obsolescence,
  operator_error,
  natural_disaster,
  external_attack,
  internal_attack,
  economic_failure,
  organizational_failure,
  kCount
};
inline constexpr std::size_t kThreatClassCount =
    static_cast<std::size_t>(ThreatClass::kCount);
const char* to_string(ThreatClass t);

enum class SoftwareBugScope : std::uint8_t { replica, unit, site };
enum class InternalAttackEffect : std::uint8_t { corrupt, destroy };

struct ThreatSpec {
  struct MediaFailure {
    bool bit_errors = true;          // unrecoverable bit errors on reads
    bool scrub_read_coupling = true; // audit reads are also exposed
    bool crashes = true;             // catastrophic unit loss
    std::optional<double> uber_override;    // else per-unit spec applies
    std::optional<double> hazard_override;  // else per-unit spec applies
  };
  struct HardwareFailure {
    double transient_rate_per_site_year = 0.0;
    double mean_outage_years = 0.01;
    double fatal_rate_per_site_year = 0.0;
    double mean_restore_years = 0.05;
  };
  struct SoftwareFailure {
    double rate_per_site_year = 0.0;
    SoftwareBugScope scope = SoftwareBugScope::replica;
  };
  struct CommunicationErrors {
    double undetected_corruption_probability = 0.0;  // per transfer
  };
  struct NetworkServiceFailure {
    double rate_per_year = 0.0;
    double affected_fraction = 0.0;  // of items per failure event
  };
  struct MediaHwObsolescence {
    // Readers for a media generation become unavailable at the given time.
    // Units deployed within `transition_years` before that time (or later)
    // already use the succeeding generation and stay readable, which is what
    // makes refresh and rolling replacement effective defenses.
    std::optional<double> consumer_reader_unavailable_at;
    std::optional<double> enterprise_reader_unavailable_at;
    double transition_years = 5.0;
  };
  struct OperatorError {
    double base_rate_per_domain_year = 0.0;
    double recoverable_fraction = 0.5;  // else the mistake destroys the replica
    double stress_multiplier = 1.0;     // per concurrent incident
    double stress_window_years = 0.1;
  };
  struct NaturalDisaster {
    double rate_per_zone_year = 0.0;
    double unit_crash_probability = 1.0;  // else unit survives with corrupted contents
  };
  struct ExternalAttack {
    double rate_per_class_year = 0.0;
    double compromise_probability = 1.0;       // per site sharing the class
    double sites_per_year = 0.0;               // 0: instantaneous compromise
    std::string forged_algorithm;              // empty: plain corruption
    AlgorithmId forged_algorithm_id = kNone;   // resolved at validation
  };
  struct InternalAttack {
    double rate_per_domain_year = 0.0;
    InternalAttackEffect effect = InternalAttackEffect::corrupt;
    double compromise_probability = 1.0;
    std::string forged_algorithm;
    AlgorithmId forged_algorithm_id = kNone;
  };
  struct EconomicFailure {
    double shock_rate_per_year = 0.0;  // per budget stream
    double shock_multiplier = 0.0;     // funds *= multiplier at each shock
  };
  struct OrganizationalFailure {
    double rate_per_site_year = 0.0;
    double handoff_success_probability = 1.0;
  };

  std::array<bool, kThreatClassCount> enabled{};
  MediaFailure media_failure;
  HardwareFailure hardware_failure;
  SoftwareFailure software_failure;
  CommunicationErrors communication_errors;
  NetworkServiceFailure network_service_failure;
  MediaHwObsolescence media_hw_obsolescence;
  OperatorError operator_error;
  NaturalDisaster natural_disaster;
  ExternalAttack external_attack;
  InternalAttack internal_attack;
  EconomicFailure economic_failure;
  OrganizationalFailure organizational_failure;

  bool on(ThreatClass t) const { return enabled[static_cast<std::size_t>(t)]; }
};

// ---------------------------------------------------------------------------
// Strategy.
// ---------------------------------------------------------------------------

enum class ReplicationMode : std::uint8_t { fixed, p2p };
enum class IngestMode : std::uint8_t { push, pull_crawl };
enum class MigrationMode : std::uint8_t {
  none,
  normalize_on_ingest,
  batch,
  on_access,
  emulation
};
enum class TriageStage : std::uint8_t { defer_audits, defer_maintenance, decommission };
enum class RepairVetting : std::uint8_t { audited, any };

struct StrategySpec {
  ReplicationMode replication = ReplicationMode::fixed;
  int copies = 3;            // fixed mode
  int target_min = 7;        // p2p mode
  int repair_threshold = 5;  // p2p mode

  IngestMode ingest_mode = IngestMode::push;
  double crawl_miss_probability = 0.0;

  MigrationMode migration = MigrationMode::none;
  double batch_lead_years = 1.0;  // batch migration runs this long before obsolescence
  bool preserve_original = false;

  std::optional<double> media_refresh_interval_years;
  double rolling_replacement_fraction = 0.0;  // of each site's units per year

  int diversity_classes = 1;

  double audits_per_site_year = 1e9;
  double repairs_per_site_year = 1e9;
  double crawls_per_site_year = 1e9;

  RepairVetting repair_vetting = RepairVetting::audited;
  // Open knob: when set, each repair action is routed through an operator and
  // botched (payload corrupted) with this probability.
  std::optional<double> operator_mediated_botch_probability;
};

// ---------------------------------------------------------------------------
// Audit.
// ---------------------------------------------------------------------------

struct DigestAlgorithm {
  std::string label;
  double broken_at = -1.0;        // < 0: never broken
  double break_public_at = -1.0;  // knowledge lag; >= broken_at

  bool is_broken(double now) const { return broken_at >= 0.0 && now >= broken_at; }
  bool is_publicly_broken(double now) const {
    return break_public_at >= 0.0 && now >= break_public_at;
  }
};

struct RolloverPlan {
  double at = 0.0;
  AlgorithmId from = kNone;
  AlgorithmId to = kNone;
};

struct AuditParams {
  bool third_party_enabled = false;
  double third_party_interval_years = 1.0;
  std::vector<AlgorithmId> third_party_algorithms;
  StoreKind store = StoreKind::external_store;

  bool mutual_enabled = false;
  double mutual_interval_years = 1.0;
  int quorum = 10;  // or all peers when fewer
  double landslide_fraction = 0.75;
  AlgorithmId mutual_algorithm = kNone;

  std::vector<RolloverPlan> rollovers;
  double transfer_delay_years = 0.002;  // repair/fetch latency (~17.5 h)
};

// ---------------------------------------------------------------------------
// Economics.
// ---------------------------------------------------------------------------

struct CostModel {
  // ingest
  double permission_per_publisher = 0.0;
  double permission_per_item = 0.0;
  double ingest_per_item_automated = 0.0;
  double ingest_per_item_manual = 0.0;
  bool ingest_manual = false;
  double metadata_per_item = 0.0;
  // preservation
  double hardware_per_gb_year_consumer = 0.0;
  double hardware_per_gb_year_enterprise = 0.0;
  double ops_per_replica_year = 0.0;
  double audit_per_poll = 0.0;
  double migration_batch_per_item = 0.0;
  double migration_on_access_per_item = 0.0;
  // dissemination
  double auth_system_per_year = 0.0;
  double serving_per_access = 0.0;

  double hardware_per_gb_year(Grade g) const {
    return g == Grade::consumer ? hardware_per_gb_year_consumer
                                : hardware_per_gb_year_enterprise;
  }
};

struct BudgetSpec {
  std::string label;
  double funds_per_year = 0.0;
  bool per_site = false;  // expand to one stream per site
};

// Triage ladder: what gets cut, in order, when a budget runs short. The
// distinction is the classic one between preserving less content
// (decommission) and taking greater risks with it (defer and rot in place).
inline const std::vector<TriageStage> kDefaultTriage = {
    TriageStage::defer_audits, TriageStage::defer_maintenance,
    TriageStage::decommission};

// ---------------------------------------------------------------------------
// Scripted fault injections: deterministic events for experiments and tests.
// ---------------------------------------------------------------------------

enum class InjectionKind : std::uint8_t {
  corrupt_replica,
  forge_replica,
  lose_replica,
  publisher_down,
  defund_budget,
  kill_site
};

struct Injection {
  InjectionKind kind;
  double time = 0.0;
  std::uint32_t item = kNone;  // kNone: all items
  std::uint32_t site = kNone;  // kNone: all sites (where applicable)
  std::string algorithm;       // forge_replica: algorithm to forge against
  AlgorithmId algorithm_id = kNone;
  std::string budget;          // defund_budget
  BudgetId budget_id = kNone;
};

// ---------------------------------------------------------------------------
// Site / item population description.
// ---------------------------------------------------------------------------

struct UnitSpec {
  double capacity_bytes = 2e11;
  double uber_per_bit = 0.0;
  double annual_hazard = 0.0;
  double service_life_years = 5.0;
};

struct SiteLayout {
  int count = 0;
  int zones = 1;
  int admin_domains = 0;  // 0: one domain per site
  Grade grade = Grade::consumer;
  int units_per_site = 1;
  UnitSpec unit;
  std::string budget;  // budget stream label; empty with per_site budgets
};

struct DigestStoreLayout {
  int zone = 0;
  int admin_domain = -1;  // -1: its own domain
  UnitSpec unit;
  int units = 1;
};

enum class SizeDistKind : std::uint8_t { fixed, uniform, lognormal };

struct ItemLayout {
  int count = 0;
  SizeDistKind size_kind = SizeDistKind::fixed;
  double size_a = 1e9;  // fixed value, uniform lo, or lognormal mu
  double size_b = 0.0;  // uniform hi or lognormal sigma
  std::string format;
  FormatId format_id = kNone;
  int publishers = 1;
  bool publisher_available = true;
};

struct FormatSpec {
  std::string label;
  double obsolete_at = -1.0;
  std::string migration_target;  // label; resolved during validation
  FormatId migration_target_id = kNone;
  bool emulated = false;
};

// ---------------------------------------------------------------------------
// The full declarative experiment.
// ---------------------------------------------------------------------------

struct Scenario {
  std::string name;
  double horizon_years = 0.0;
  double snapshot_every_years = 1.0;
  double maintenance_interval_years = 1.0;
  double budget_review_interval_years = 1.0;

  ItemLayout items;
  std::vector<FormatSpec> formats;
  SiteLayout sites;
  std::optional<DigestStoreLayout> digest_store;

  ThreatSpec threats;
  std::array<bool, kThreatClassCount> threat_disposed{};  // mentioned at all

  StrategySpec strategy;

  std::vector<DigestAlgorithm> algorithms;
  AuditParams audit;

  CostModel costs;
  std::vector<BudgetSpec> budgets;
  std::vector<TriageStage> triage = kDefaultTriage;

  double access_rate_per_item_year = 0.0;
  std::vector<double> delay_buckets_years;  // upper edges; overflow bucket implied

  std::vector<Injection> injections;

  std::string source_hash_hex;  // FNV-1a of the canonical config text

  AlgorithmId algorithm_by_label(const std::string& label) const;
  FormatId format_by_label(const std::string& label) const;
};

struct ValidationResult {
  std::optional<Scenario> scenario;
  cfg::Diagnostics errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Builds a Scenario from a parsed config tree, collecting the complete list
// of violations rather than stopping at the first.
ValidationResult build_scenario(const cfg::Node& root, const std::string& filename);

// Convenience: parse + validate a scenario file or string.
ValidationResult load_scenario_file(const std::string& path);
ValidationResult load_scenario_string(const std::string& text, const std::string& name);

}  // namespace presim
