#include "presim/world.hpp"

#include <cmath>

#include "presim/audit.hpp"
#include "presim/economics.hpp"
#include "presim/relcalc.hpp"
#include "presim/strategy.hpp"
#include "presim/threats.hpp"

namespace presim {

const char* to_string(CostCategory c) {
  switch (c) {
    case CostCategory::ingest_permission: return "ingest_permission";
    case CostCategory::ingest_transfer: return "ingest_transfer";
    case CostCategory::ingest_metadata: return "ingest_metadata";
    case CostCategory::storage_hardware: return "storage_hardware";
    case CostCategory::ops: return "ops";
    case CostCategory::audit: return "audit";
    case CostCategory::migration: return "migration";
    case CostCategory::dissemination_auth: return "dissemination_auth";
    case CostCategory::dissemination_serving: return "dissemination_serving";
    case CostCategory::kCount: break;
  }
  return "?";
}

const char* to_string(AuditMechanism m) {
  switch (m) {
    case AuditMechanism::third_party: return "third_party";
    case AuditMechanism::mutual: return "mutual";
    case AuditMechanism::rollover: return "rollover";
  }
  return "?";
}

const char* to_string(AuditVerdict v) {
  switch (v) {
    case AuditVerdict::pass: return "pass";
    case AuditVerdict::mismatch: return "mismatch";
    case AuditVerdict::repaired: return "repaired";
    case AuditVerdict::alarm: return "alarm";
    case AuditVerdict::deferred: return "deferred";
    case AuditVerdict::undetected_forgery: return "undetected_forgery";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Replica transitions.
// ---------------------------------------------------------------------------

void World::corrupt_replica(ReplicaId r, std::uint64_t nonce, const char* cause) {
  Replica& rep = replicas[r];
  if (!rep.present || rep.state == ReplicaState::lost) return;
  if (rep.state == ReplicaState::intact) rep.corrupted_since = now();
  rep.state = ReplicaState::silently_corrupt;
  rep.content.nonce = nonce == 0 ? 1 : nonce;
  rep.content.forged_against = kNone;
  rep.damage_detected = false;
  log(now(), rep.site, cause, "replica of item " + std::to_string(rep.item) + " corrupted");
}

void World::forge_replica(ReplicaId r, std::uint64_t payload_nonce,
                          AlgorithmId broken_alg, const char* cause) {
  Replica& rep = replicas[r];
  if (!rep.present || rep.state == ReplicaState::lost) return;
  if (rep.state == ReplicaState::intact) rep.corrupted_since = now();
  rep.state = ReplicaState::forged;
  rep.content.nonce = payload_nonce == 0 ? 1 : payload_nonce;
  rep.content.forged_against = broken_alg;
  rep.damage_detected = false;
  log(now(), rep.site, cause, "replica of item " + std::to_string(rep.item) + " forged");
}

void World::lose_replica(ReplicaId r, const char* cause) {
  Replica& rep = replicas[r];
  if (!rep.present || rep.state == ReplicaState::lost) return;
  accrue_site(rep.site, now());
  rep.state = ReplicaState::lost;
  rep.corrupted_since = -1.0;
  rep.damage_detected = false;
  MediaUnit& u = units[rep.unit];
  const std::uint64_t bytes = items[rep.item].size_bytes;
  u.used_bytes = u.used_bytes > bytes ? u.used_bytes - bytes : 0;
  if (sites[rep.site].stored_replicas > 0) --sites[rep.site].stored_replicas;
  ++replicas_lost_events;
  log(now(), rep.site, cause, "replica of item " + std::to_string(rep.item) + " lost");
}

void World::restore_replica(ReplicaId r, const ContentToken& payload,
                            bool payload_intact, const char* cause) {
  Replica& rep = replicas[r];
  if (!rep.present) return;
  if (rep.state == ReplicaState::lost)
    throw SimError("restore_replica: lost replicas are re-created, not repaired");
  rep.content = payload;
  rep.state = payload_intact ? ReplicaState::intact : ReplicaState::silently_corrupt;
  rep.corrupted_since = payload_intact ? -1.0 : now();
  rep.damage_detected = false;
  rep.flagged_bad = false;
  rep.partial = false;
  rep.repair_in_flight = false;
  ++repairs_completed;
  if (!payload_intact) ++repairs_bad;
  log(now(), rep.site, cause,
      std::string("replica of item ") + std::to_string(rep.item) + " repaired" +
          (payload_intact ? "" : " (payload damaged in transit)"));
}

void World::decommission_replica(ReplicaId r, const char* cause) {
  Replica& rep = replicas[r];
  if (!rep.present) return;
  accrue_site(rep.site, now());
  if (rep.state != ReplicaState::lost) {
    MediaUnit& u = units[rep.unit];
    const std::uint64_t bytes = items[rep.item].size_bytes;
    u.used_bytes = u.used_bytes > bytes ? u.used_bytes - bytes : 0;
    if (sites[rep.site].stored_replicas > 0) --sites[rep.site].stored_replicas;
  }
  rep.present = false;
  ++replicas_decommissioned;
  log(now(), rep.site, cause,
      "replica of item " + std::to_string(rep.item) + " decommissioned");
}

ContentToken World::read_replica(ReplicaId r, bool is_scrub) {
  Replica& rep = replicas[r];
  const ThreatSpec& t = sc->threats;
  if (t.on(ThreatClass::media_failure) && t.media_failure.bit_errors &&
      (!is_scrub || t.media_failure.scrub_read_coupling) &&
      rep.state != ReplicaState::lost) {
    MediaUnit& u = units[rep.unit];
    const double uber = effective_uber(u);
    if (uber > 0.0) {
      const double p = relcalc::full_read_error_prob(
          static_cast<double>(items[rep.item].size_bytes), uber);
      if (u.read_rng.bernoulli(p)) {
        corrupt_replica(r, u.read_rng.next_u64(), "media_bit_error");
      }
    }
  }
  return rep.content;
}

// ---------------------------------------------------------------------------
// Predicates.
// ---------------------------------------------------------------------------

int World::intact_count(ItemId item) const {
  int n = 0;
  for (ReplicaId r : items[item].replicas) {
    const Replica& rep = replicas[r];
    if (rep.present && rep.state == ReplicaState::intact) ++n;
  }
  return n;
}

int World::observable_count(ItemId item) const {
  // What a peer could locate: present, reachable, not known-bad. Silent
  // corruption is invisible here on purpose; strategies act on audit
  // findings, never on ground truth.
  int n = 0;
  const double t = now();
  for (ReplicaId r : items[item].replicas) {
    const Replica& rep = replicas[r];
    if (rep.present && rep.state != ReplicaState::lost && !rep.flagged_bad &&
        sites[rep.site].up(t) && rep.content.version == items[item].version)
      ++n;
  }
  return n;
}

bool World::has_external_source(ItemId item) const {
  if (items[item].publisher_available) return true;
  for (const Transfer& tr : transfers)
    if (tr.active && tr.item == item && tr.payload_intact) return true;
  return false;
}

bool World::irrecoverably_lost(ItemId item) const {
  if (intact_count(item) > 0 || has_external_source(item)) return false;
  // An incomplete crawl copy still holds most of the content; such items are
  // permanently impaired without a publisher, but not destroyed.
  for (ReplicaId r : items[item].replicas) {
    const Replica& rep = replicas[r];
    if (rep.present && rep.state != ReplicaState::lost && rep.partial) return false;
  }
  return true;
}

bool World::replica_accessible(ReplicaId r) const {
  const Replica& rep = replicas[r];
  return rep.present && rep.state != ReplicaState::lost && sites[rep.site].up(now());
}

namespace {

bool format_readable(const World& w, FormatId f, double t) {
  const Format& fmt = w.formats[f];
  if (!fmt.obsolete(t)) return true;
  if (fmt.emulated) return true;
  if (w.sc->strategy.migration == MigrationMode::emulation) return true;
  if (w.sc->strategy.migration == MigrationMode::on_access &&
      fmt.migration_target != kNone)
    return true;
  return false;
}

}  // namespace

bool World::replica_servable(ReplicaId r) const {
  return replica_accessible(r) && format_readable(*this, replicas[r].format, now());
}

bool World::item_readable(ItemId item) const {
  const double t = now();
  for (ReplicaId r : items[item].replicas) {
    const Replica& rep = replicas[r];
    if (rep.present && rep.state == ReplicaState::intact &&
        format_readable(*this, rep.format, t))
      return true;
  }
  return false;
}

bool World::item_impaired(ItemId item) const {
  if (irrecoverably_lost(item)) return false;
  const double t = now();
  for (ReplicaId r : items[item].replicas) {
    const Replica& rep = replicas[r];
    if (rep.present && rep.state == ReplicaState::intact &&
        sites[rep.site].up(t) && format_readable(*this, rep.format, t))
      return false;  // immediately servable
  }
  return true;  // recoverable (intact copy elsewhere, in flight, or re-fetchable)
}

double World::effective_uber(const MediaUnit& u) const {
  const auto& mf = sc->threats.media_failure;
  if (!sc->threats.on(ThreatClass::media_failure) || !mf.bit_errors) return 0.0;
  return mf.uber_override ? *mf.uber_override : u.uber_per_bit;
}

double World::effective_hazard(const MediaUnit& u) const {
  const auto& mf = sc->threats.media_failure;
  if (!sc->threats.on(ThreatClass::media_failure) || !mf.crashes) return 0.0;
  return mf.hazard_override ? *mf.hazard_override : u.annual_hazard;
}

void World::note_detection(ReplicaId r, double time) {
  Replica& rep = replicas[r];
  if (rep.corrupted_since >= 0.0 && !rep.damage_detected) {
    detection_latencies.push_back(time - rep.corrupted_since);
    rep.damage_detected = true;
  }
}

void World::charge(double time, SiteId site, CostCategory cat, double amount) {
  if (amount == 0.0) return;
  ledger.add(time, site, cat, amount);
  if (site != kNone) budgets[sites[site].budget].window_spend += amount;
}

void World::corrupt_store_record(std::size_t index, std::uint64_t nonce,
                                 const char* cause) {
  StoreRecord& rec = store_records[index];
  if (rec.state != StoreRecordState::ok) return;
  rec.state = StoreRecordState::corrupt;
  rec.value = mix_u64(rec.value, nonce == 0 ? 1 : nonce);
  log(now(), store_site, cause,
      "digest-store record " + std::to_string(index) + " corrupted");
}

void World::lose_store_records_on_slot(std::size_t unit_slot, const char* cause) {
  const std::size_t slots = sites[store_site].units.size();
  std::size_t lost = 0;
  for (std::size_t i = unit_slot; i < store_records.size(); i += slots) {
    if (store_records[i].state == StoreRecordState::ok ||
        store_records[i].state == StoreRecordState::corrupt) {
      store_records[i].state = StoreRecordState::lost;
      ++lost;
    }
  }
  log(now(), store_site, cause,
      std::to_string(lost) + " digest-store records lost with their unit");
}

void World::accrue_site(SiteId s, double now_t) {
  Site& site = sites[s];
  double& mark = site_ops_accrued_to[s];
  const double dt = now_t - mark;
  if (dt <= 0.0) return;
  mark = now_t;
  if (site.removed) return;
  std::uint64_t stored_bytes = 0;
  for (UnitId u : site.units)
    if (!units[u].retired) stored_bytes += units[u].used_bytes;
  const double gb = static_cast<double>(stored_bytes) / 1e9;
  charge(now_t, s, CostCategory::storage_hardware,
         gb * sc->costs.hardware_per_gb_year(site.grade) * dt);
  charge(now_t, s, CostCategory::ops,
         static_cast<double>(site.stored_replicas) * sc->costs.ops_per_replica_year * dt);
}

// ---------------------------------------------------------------------------
// World construction.
// ---------------------------------------------------------------------------

namespace {

MediaUnit make_unit(World& w, SiteId site, const UnitSpec& spec, Grade grade,
                    double deployed_at) {
  MediaUnit u;
  u.site = site;
  u.uid = w.next_unit_uid++;
  u.capacity_bytes = static_cast<std::uint64_t>(spec.capacity_bytes);
  u.uber_per_bit = spec.uber_per_bit;
  u.annual_hazard = spec.annual_hazard;
  u.service_life_years = spec.service_life_years;
  u.deployed_at = deployed_at;
  u.grade = grade;
  u.read_rng = w.rng.stream("unit_read", u.uid);
  return u;
}

}  // namespace

World build_world(const Scenario& sc, std::uint64_t seed) {
  World w;
  w.sc = &sc;
  w.rng = RngFactory(seed);

  // Formats.
  w.formats.reserve(sc.formats.size());
  for (const FormatSpec& f : sc.formats) {
    Format fmt;
    fmt.label = f.label;
    fmt.obsolete_at = sc.threats.on(ThreatClass::software_obsolescence) ? f.obsolete_at : -1.0;
    fmt.migration_target = f.migration_target_id;
    fmt.emulated = f.emulated;
    w.formats.push_back(fmt);
  }

  // Sites, domains, zones, classes.
  const int site_count = sc.sites.count;
  w.zone_count = sc.sites.zones;
  const int classes = sc.strategy.diversity_classes;
  w.sites.reserve(static_cast<std::size_t>(site_count) + 1);
  for (int i = 0; i < site_count; ++i) {
    Site s;
    s.zone = static_cast<ZoneId>(i % sc.sites.zones);
    s.admin_domain = sc.sites.admin_domains == 0
                         ? static_cast<DomainId>(i)
                         : static_cast<DomainId>(i % sc.sites.admin_domains);
    s.vulnerability_classes.push_back(static_cast<ClassId>(i % classes));
    s.grade = sc.sites.grade;
    w.sites.push_back(s);
  }
  w.admin_domain_count =
      sc.sites.admin_domains == 0 ? site_count : sc.sites.admin_domains;

  // Budget streams.
  bool per_site_budget = false;
  for (const BudgetSpec& b : sc.budgets) per_site_budget |= b.per_site;
  if (per_site_budget) {
    const BudgetSpec& tmpl = sc.budgets.front();
    for (int i = 0; i < site_count; ++i) {
      BudgetState bs;
      bs.label = "site_" + std::to_string(i);
      bs.funds_per_year = tmpl.funds_per_year;
      bs.scope_site = static_cast<SiteId>(i);
      w.budgets.push_back(bs);
      w.sites[static_cast<std::size_t>(i)].budget = static_cast<BudgetId>(i);
    }
  } else {
    for (const BudgetSpec& b : sc.budgets)
      w.budgets.push_back({b.label, b.funds_per_year, kNone, 0.0});
    BudgetId site_budget = 0;
    if (!sc.sites.budget.empty()) {
      for (std::size_t i = 0; i < sc.budgets.size(); ++i)
        if (sc.budgets[i].label == sc.sites.budget)
          site_budget = static_cast<BudgetId>(i);
    }
    for (Site& s : w.sites) s.budget = site_budget;
  }

  // Units.
  for (int i = 0; i < site_count; ++i) {
    for (int k = 0; k < sc.sites.units_per_site; ++k) {
      w.units.push_back(make_unit(w, static_cast<SiteId>(i), sc.sites.unit,
                                  sc.sites.grade, 0.0));
      w.sites[static_cast<std::size_t>(i)].units.push_back(
          static_cast<UnitId>(w.units.size() - 1));
    }
  }

  // External digest store pseudo-site: its own failure exposure, its own
  // administrative domain by default, outside every vulnerability class.
  if (sc.digest_store) {
    Site store;
    store.is_digest_store = true;
    store.zone = static_cast<ZoneId>(sc.digest_store->zone % std::max(1, w.zone_count));
    store.admin_domain = sc.digest_store->admin_domain < 0
                             ? static_cast<DomainId>(w.admin_domain_count)
                             : static_cast<DomainId>(sc.digest_store->admin_domain);
    if (sc.digest_store->admin_domain < 0) ++w.admin_domain_count;
    store.grade = sc.sites.grade;
    w.sites.push_back(store);
    w.store_site = static_cast<SiteId>(w.sites.size() - 1);
    for (int k = 0; k < sc.digest_store->units; ++k) {
      w.units.push_back(make_unit(w, w.store_site, sc.digest_store->unit,
                                  sc.sites.grade, 0.0));
      w.sites[w.store_site].units.push_back(static_cast<UnitId>(w.units.size() - 1));
    }
    BudgetState bs;
    bs.label = "digest_store";
    bs.funds_per_year = 1e30;
    w.budgets.push_back(bs);
    w.sites[w.store_site].budget = static_cast<BudgetId>(w.budgets.size() - 1);
  }

  // Items.
  Rng size_rng = w.rng.stream("item_size");
  w.items.reserve(static_cast<std::size_t>(sc.items.count));
  for (int i = 0; i < sc.items.count; ++i) {
    ContentItem item;
    switch (sc.items.size_kind) {
      case SizeDistKind::fixed:
        item.size_bytes = static_cast<std::uint64_t>(sc.items.size_a);
        break;
      case SizeDistKind::uniform:
        item.size_bytes =
            static_cast<std::uint64_t>(size_rng.uniform(sc.items.size_a, sc.items.size_b));
        break;
      case SizeDistKind::lognormal:
        item.size_bytes = static_cast<std::uint64_t>(
            std::max(1.0, size_rng.lognormal(sc.items.size_a, sc.items.size_b)));
        break;
    }
    item.format = sc.items.format_id;
    item.origin = sc.strategy.ingest_mode == IngestMode::push ? Origin::push : Origin::pull;
    item.publisher = static_cast<PublisherId>(i % sc.items.publishers);
    item.publisher_available = sc.items.publisher_available;
    w.items.push_back(item);
  }

  // Store records: one cell per (item, algorithm, lineage).
  if (w.store_site != kNone)
    w.store_records.resize(w.items.size() * std::max<std::size_t>(1, sc.algorithms.size()) * 2);
  w.active_tp_algorithms = sc.audit.third_party_algorithms;
  w.publishers_charged.resize(static_cast<std::size_t>(sc.items.publishers), false);

  // Streams.
  w.site_streams.reserve(w.sites.size());
  for (std::size_t i = 0; i < w.sites.size(); ++i) {
    SiteStreams s;
    s.hw_transient = w.rng.stream("hw_transient", i);
    s.hw_fatal = w.rng.stream("hw_fatal", i);
    s.software = w.rng.stream("software_bug", i);
    s.organizational = w.rng.stream("org_failure", i);
    s.comm = w.rng.stream("comm_error", i);
    w.site_streams.push_back(s);
  }
  w.item_streams.reserve(w.items.size());
  for (std::size_t i = 0; i < w.items.size(); ++i) {
    ItemStreams s;
    s.access = w.rng.stream("access", i);
    s.mutual = w.rng.stream("mutual_poll", i);
    s.repair = w.rng.stream("repair_choice", i);
    w.item_streams.push_back(s);
  }
  w.netsvc_rng = w.rng.stream("network_service");
  for (int c = 0; c < classes; ++c) w.class_rng.push_back(w.rng.stream("external_attack", c));
  for (int z = 0; z < w.zone_count; ++z) w.zone_rng.push_back(w.rng.stream("natural_disaster", z));
  for (std::size_t b = 0; b < w.budgets.size(); ++b)
    w.budget_rng.push_back(w.rng.stream("economic_shock", b));

  w.stress.resize(static_cast<std::size_t>(w.admin_domain_count));
  w.rate_state.resize(w.sites.size());
  w.mutual_round_counter.resize(w.items.size(), 0);
  w.site_ops_accrued_to.resize(w.sites.size(), 0.0);
  w.delay_hist.resize(sc.delay_buckets_years.size() + 1, 0);

  // Initial event population.
  strategy::schedule_initial(w);
  threats::schedule_initial(w);
  audit::schedule_initial(w);
  economics::schedule_initial(w);

  for (double t = sc.snapshot_every_years; t < sc.horizon_years;
       t += sc.snapshot_every_years)
    w.schedule(t, EventKind::snapshot);

  return w;
}

}  // namespace presim
