#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "presim/content.hpp"
#include "presim/events.hpp"
#include "presim/ledger.hpp"
#include "presim/metrics.hpp"
#include "presim/rng.hpp"
#include "presim/scenario.hpp"

namespace presim {

struct BudgetState {
  std::string label;
  double funds_per_year = 0.0;
  SiteId scope_site = kNone;  // kNone: shared stream
  double window_spend = 0.0;  // spend since the last review
};

// ---------------------------------------------------------------------------
// Audit bookkeeping.
// ---------------------------------------------------------------------------

enum class AuditMechanism : std::uint8_t { third_party, mutual, rollover };
enum class AuditVerdict : std::uint8_t {
  pass,
  mismatch,
  repaired,
  alarm,
  deferred,
  undetected_forgery  // ground truth only; never visible to strategy logic
};
const char* to_string(AuditMechanism m);
const char* to_string(AuditVerdict v);

struct AuditOutcome {
  double time = 0.0;
  ItemId item = kNone;
  ReplicaId replica = kNone;  // kNone for item-level outcomes (mutual rounds)
  AuditMechanism mechanism = AuditMechanism::third_party;
  AuditVerdict verdict = AuditVerdict::pass;
  double latency = -1.0;  // ground truth: detection time minus corruption time
};

enum class StoreRecordState : std::uint8_t { ok, corrupt, lost, missing };

// External digest store cell, one per (item, algorithm).
struct StoreRecord {
  std::uint64_t value = 0;
  StoreRecordState state = StoreRecordState::missing;
};

// ---------------------------------------------------------------------------
// Transfers: every content movement (ingest fetch, repair, migration copy,
// unit replacement, organizational handoff) is a Transfer with a payload
// captured at dispatch. In-flight intact payloads count as external sources
// for the loss predicate.
// ---------------------------------------------------------------------------

enum class TransferKind : std::uint8_t {
  ingest,
  refetch,       // publisher re-fetch during reconciliation or repair
  repair,        // peer-sourced repair
  replication,   // p2p creating a new replica
  unit_copy,     // media refresh / replacement / handoff move
  kCount
};

struct Transfer {
  bool active = false;
  std::uint64_t gen = 0;  // guards queued completion events across slot reuse
  TransferKind kind = TransferKind::kCount;
  ItemId item = kNone;
  ReplicaId target = kNone;     // existing replica being overwritten, or kNone
  SiteId dest_site = kNone;     // for new replicas
  FormatId format = kNone;      // format of a newly created replica
  ContentToken payload;
  bool payload_intact = false;   // ground truth for the captured payload
  bool payload_partial = false;  // incomplete re-crawl
  double completes_at = 0.0;
};

// ---------------------------------------------------------------------------
// Per-domain operator stress.
// ---------------------------------------------------------------------------

struct StressState {
  int active_incidents = 0;
  std::uint64_t reschedule_gen = 0;  // invalidates queued operator-error draws
};

// ---------------------------------------------------------------------------
// Incident log.
// ---------------------------------------------------------------------------

struct Incident {
  double time = 0.0;
  SiteId site = kNone;
  std::string category;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Rate limiting: per-site yearly windows per activity.
// ---------------------------------------------------------------------------

enum class Activity : std::uint8_t { audit, repair, crawl, kCount };

struct RateWindow {
  std::int64_t year = -1;
  double used = 0.0;
};

struct SiteRateState {
  std::array<RateWindow, static_cast<std::size_t>(Activity::kCount)> windows{};
};

// ---------------------------------------------------------------------------
// Per-entity RNG streams (common-random-numbers discipline).
// ---------------------------------------------------------------------------

struct SiteStreams {
  Rng hw_transient{0};
  Rng hw_fatal{0};
  Rng software{0};
  Rng organizational{0};
  Rng comm{0};  // transfer corruption draws for transfers arriving here
};

struct ItemStreams {
  Rng access{0};
  Rng mutual{0};
  Rng repair{0};
};

// ---------------------------------------------------------------------------
// The world: complete state of one simulation run.
// ---------------------------------------------------------------------------

struct World {
  const Scenario* sc = nullptr;
  RngFactory rng{0};
  EventQueue queue;

  std::vector<Format> formats;
  std::vector<ContentItem> items;
  std::vector<Site> sites;
  std::vector<MediaUnit> units;
  std::vector<Replica> replicas;

  SiteId store_site = kNone;  // pseudo-site holding the external digest store
  std::vector<StoreRecord> store_records;  // item * num_algorithms + algorithm

  std::vector<BudgetState> budgets;
  Ledger ledger;

  std::vector<StressState> stress;  // per admin domain
  int admin_domain_count = 0;
  int zone_count = 0;

  std::vector<SiteStreams> site_streams;
  std::vector<ItemStreams> item_streams;
  Rng netsvc_rng{0};
  std::vector<Rng> class_rng;          // external attack, per vulnerability class
  std::vector<Rng> zone_rng;           // natural disaster
  std::vector<Rng> budget_rng;         // economic shocks
  std::vector<Rng> domain_op_rng;      // operator error, per admin domain
  std::vector<Rng> domain_attack_rng;  // internal attack, per admin domain

  std::vector<SiteRateState> rate_state;
  std::vector<Transfer> transfers;
  std::vector<std::uint32_t> free_transfers;

  std::vector<std::uint32_t> mutual_round_counter;  // per item, for poller rotation
  std::vector<double> site_ops_accrued_to;          // ops/hardware accrual watermark
  double auth_accrued_to = 0.0;

  // Algorithms currently checked by third-party audits; rollover extends it.
  std::vector<AlgorithmId> active_tp_algorithms;
  std::vector<bool> publishers_charged;

  // Run telemetry.
  std::vector<MetricsSnapshot> snapshots;
  std::vector<Incident> incidents;
  std::vector<AuditOutcome> outcomes;  // non-pass outcomes only
  std::array<std::uint64_t, kEventKindCount> event_counts{};
  std::uint64_t audit_pass_count = 0;
  std::uint64_t repairs_completed = 0;
  std::uint64_t repairs_bad = 0;  // ground truth: repair delivered damaged payload
  std::uint64_t alarms = 0;
  std::uint64_t undetected_forgeries = 0;
  std::uint64_t accesses = 0;
  std::uint64_t failed_accesses = 0;
  std::uint64_t impaired_accesses = 0;
  std::vector<std::uint64_t> delay_hist;  // buckets + overflow
  std::vector<double> detection_latencies;
  std::uint64_t replicas_created = 0;
  std::uint64_t replicas_lost_events = 0;
  std::uint64_t replicas_decommissioned = 0;
  double last_fraction_lost = 0.0;

  std::uint64_t next_unit_uid = 1;

  double now() const { return queue.now(); }
  double horizon() const { return sc->horizon_years; }

  // Schedules only events that land within the horizon.
  void schedule(double time, EventKind kind, std::uint32_t a = kNone,
                std::uint32_t b = kNone, std::uint32_t c = kNone, double x = 0.0,
                std::uint64_t n = 0) {
    if (time > horizon()) return;
    Event e;
    e.time = time;
    e.kind = kind;
    e.a = a;
    e.b = b;
    e.c = c;
    e.x = x;
    e.n = n;
    queue.schedule(e);
  }

  void log(double time, SiteId site, std::string category, std::string detail) {
    incidents.push_back({time, site, std::move(category), std::move(detail)});
  }

  // --- replica state transitions (the only mutation paths) ---
  void corrupt_replica(ReplicaId r, std::uint64_t nonce, const char* cause);
  void forge_replica(ReplicaId r, std::uint64_t payload_nonce, AlgorithmId broken_alg,
                     const char* cause);
  void lose_replica(ReplicaId r, const char* cause);
  void restore_replica(ReplicaId r, const ContentToken& payload, bool payload_intact,
                       const char* cause);
  void decommission_replica(ReplicaId r, const char* cause);

  // Reads a replica's content; with read-coupled bit errors enabled this can
  // corrupt it (and the corruption is what the caller then sees).
  ContentToken read_replica(ReplicaId r, bool is_scrub);

  MediaUnit& unit_of(ReplicaId r) { return units[replicas[r].unit]; }

  // --- predicates ---
  int intact_count(ItemId item) const;
  int observable_count(ItemId item) const;  // what strategy logic may act on
  bool has_external_source(ItemId item) const;
  bool irrecoverably_lost(ItemId item) const;
  bool replica_accessible(ReplicaId r) const;  // site up, unit readable, present
  bool replica_servable(ReplicaId r) const;    // accessible and format readable
  bool item_readable(ItemId item) const;       // some replica in a readable format
  bool item_impaired(ItemId item) const;

  double effective_uber(const MediaUnit& u) const;
  double effective_hazard(const MediaUnit& u) const;

  // Record ground-truth detection of damage on a replica (first time only).
  void note_detection(ReplicaId r, double time);

  // Budget / cost helpers.
  BudgetState& budget_of_site(SiteId s) { return budgets[sites[s].budget]; }
  void charge(double time, SiteId site, CostCategory cat, double amount);

  // Brings a site's time-proportional costs (hardware GB-years, ops
  // replica-years) up to `now`. Must run before any change to what the site
  // stores so partial periods are charged at the old rate.
  void accrue_site(SiteId s, double now);

  // External digest store addressing: records live in fixed slots striped
  // across the store site's unit slots. Two lineages per (item, algorithm):
  // the original submission and (when produced) the migrated version.
  std::size_t store_index(ItemId item, AlgorithmId alg, std::uint32_t version) const {
    const std::size_t lineage = version == 0 ? 0 : 1;
    return (static_cast<std::size_t>(item) * sc->algorithms.size() + alg) * 2 + lineage;
  }
  void corrupt_store_record(std::size_t index, std::uint64_t nonce, const char* cause);
  void lose_store_records_on_slot(std::size_t unit_slot, const char* cause);
};

// Constructs the initial world and schedules ingest, threat generators,
// audits, maintenance, reviews and snapshots.
World build_world(const Scenario& sc, std::uint64_t seed);

}  // namespace presim
