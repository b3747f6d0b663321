#include "presim/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "presim/audit.hpp"
#include "presim/threats.hpp"

namespace presim::strategy {

namespace {

double limit_for(const World& w, Activity a) {
  switch (a) {
    case Activity::audit: return w.sc->strategy.audits_per_site_year;
    case Activity::repair: return w.sc->strategy.repairs_per_site_year;
    case Activity::crawl: return w.sc->strategy.crawls_per_site_year;
    case Activity::kCount: break;
  }
  return 0.0;
}

int replicas_wanted(const World& w) {
  return w.sc->strategy.replication == ReplicationMode::fixed ? w.sc->strategy.copies
                                                              : w.sc->strategy.target_min;
}

ReplicaId create_replica(World& w, ItemId item, SiteId site, UnitId unit,
                         FormatId format, const ContentToken& token) {
  w.accrue_site(site, w.now());
  Replica rep;
  rep.item = item;
  rep.site = site;
  rep.unit = unit;
  rep.format = format;
  rep.content = token;
  rep.state = token.pristine() ? ReplicaState::intact : ReplicaState::silently_corrupt;
  rep.corrupted_since = token.pristine() ? -1.0 : w.now();
  rep.created_at = w.now();
  w.replicas.push_back(rep);
  const ReplicaId rid = static_cast<ReplicaId>(w.replicas.size() - 1);
  w.items[item].replicas.push_back(rid);
  w.units[unit].used_bytes += w.items[item].size_bytes;
  w.sites[site].stored_replicas += 1;
  ++w.replicas_created;
  return rid;
}

std::uint32_t start_transfer(World& w, TransferKind kind, ItemId item,
                             ReplicaId target, SiteId dest_site,
                             const ContentToken& payload, double completes_at,
                             FormatId format = kNone) {
  std::uint32_t idx;
  if (!w.free_transfers.empty()) {
    idx = w.free_transfers.back();
    w.free_transfers.pop_back();
  } else {
    w.transfers.push_back({});
    idx = static_cast<std::uint32_t>(w.transfers.size() - 1);
  }
  Transfer& tr = w.transfers[idx];
  const std::uint64_t gen = tr.gen + 1;
  tr = Transfer{};
  tr.active = true;
  tr.gen = gen;
  tr.kind = kind;
  tr.item = item;
  tr.target = target;
  tr.dest_site = dest_site;
  tr.format = format;
  tr.payload = payload;
  tr.payload_intact = payload.pristine();
  tr.completes_at = completes_at;
  w.schedule(completes_at, EventKind::transfer_complete, idx, kNone, kNone, 0.0, gen);
  if (target != kNone) w.replicas[target].repair_in_flight = true;
  return idx;
}

// Publisher-sourced payload: pristine content at the requested lineage (the
// publisher serves the original; normalization happens on arrival), exposed
// to transit corruption on the way in.
ContentToken publisher_payload(World& w, std::uint32_t version, SiteId dest) {
  ContentToken token;
  token.version = version;
  if (threats::comm_corrupts(w, dest))
    token.nonce = w.site_streams[dest].comm.next_u64() | 1;
  return token;
}

// Peer-sourced payload: a read of the source replica (with bit-error
// exposure), then transit, then the optional operator-mediated botch.
ContentToken peer_payload(World& w, ReplicaId source, SiteId dest, ItemId item) {
  ContentToken token = w.read_replica(source, false);
  if (threats::comm_corrupts(w, dest))
    token = ContentToken{token.version, w.site_streams[dest].comm.next_u64() | 1, kNone};
  if (auto botch = w.sc->strategy.operator_mediated_botch_probability) {
    if (w.item_streams[item].repair.bernoulli(*botch)) {
      token = ContentToken{token.version, w.item_streams[item].repair.next_u64() | 1, kNone};
      w.log(w.now(), dest, "operator_error", "operator-mediated repair botched");
    }
  }
  return token;
}

// Vetted repair source for the given content lineage: a replica that passed
// its most recent audit (or any locatable one under `any` vetting). Never
// consults ground truth.
ReplicaId pick_source(World& w, ItemId item, ReplicaId exclude, std::uint32_t version) {
  std::vector<ReplicaId> candidates;
  for (ReplicaId r : w.items[item].replicas) {
    const Replica& rep = w.replicas[r];
    if (r == exclude || !rep.present || rep.state == ReplicaState::lost) continue;
    if (!w.sites[rep.site].up(w.now())) continue;
    if (rep.flagged_bad) continue;
    if (rep.content.version != version) continue;
    if (w.sc->strategy.repair_vetting == RepairVetting::audited && !rep.last_audit_pass)
      continue;
    candidates.push_back(r);
  }
  if (candidates.empty()) return kNone;
  return candidates[w.item_streams[item].repair.below(candidates.size())];
}

void ingest_one_site(World& w, ItemId item, SiteId site);

void do_ingest(World& w, ItemId item) {
  const StrategySpec& st = w.sc->strategy;
  ContentItem& it = w.items[item];

  // Per-item ingest charges, plus the one-time permission negotiation for
  // this item's publisher.
  const CostModel& cm = w.sc->costs;
  if (!w.publishers_charged[it.publisher]) {
    w.publishers_charged[it.publisher] = true;
    w.charge(w.now(), kNone, CostCategory::ingest_permission, cm.permission_per_publisher);
  }
  w.charge(w.now(), kNone, CostCategory::ingest_permission, cm.permission_per_item);
  w.charge(w.now(), kNone, CostCategory::ingest_transfer,
           cm.ingest_manual ? cm.ingest_per_item_manual : cm.ingest_per_item_automated);
  w.charge(w.now(), kNone, CostCategory::ingest_metadata, cm.metadata_per_item);

  // Normalization happens before replication: the stored object is the
  // converted one (originals too when preserve_original is set).
  if (st.migration == MigrationMode::normalize_on_ingest &&
      w.formats[it.format].migration_target != kNone) {
    it.version += 1;
    it.format = w.formats[it.format].migration_target;
    w.charge(w.now(), kNone, CostCategory::migration, cm.migration_batch_per_item);
    w.log(w.now(), kNone, "migration", "item " + std::to_string(item) + " normalized at ingest");
  }

  const int wanted = replicas_wanted(w);
  int placed = 0;
  for (std::uint32_t j = 0; j < w.sites.size() && placed < wanted; ++j) {
    const SiteId site = static_cast<SiteId>((item + j) % w.sites.size());
    const Site& s = w.sites[site];
    if (s.removed || s.is_digest_store || !s.up(w.now())) continue;
    ingest_one_site(w, item, site);
    ++placed;
  }
  if (placed < wanted)
    w.log(w.now(), kNone, "ingest_deferred",
          "item " + std::to_string(item) + ": only " + std::to_string(placed) + " of " +
              std::to_string(wanted) + " replicas placed");

  if (st.ingest_mode == IngestMode::pull_crawl)
    w.schedule(w.now() + w.sc->audit.transfer_delay_years, EventKind::reconcile_ingest, item);
}

void ingest_one_site(World& w, ItemId item, SiteId site) {
  const StrategySpec& st = w.sc->strategy;
  ContentItem& it = w.items[item];

  const UnitId unit = pick_unit(w, site, it.size_bytes);
  if (unit == kNone) {
    w.log(w.now(), site, "ingest_deferred", "no unit with capacity for item " +
                                                 std::to_string(item));
    return;
  }

  ContentToken token;
  token.version = it.version;
  bool partial = false;
  if (st.ingest_mode == IngestMode::pull_crawl) {
    if (!it.publisher_available) {
      w.log(w.now(), site, "ingest_deferred",
            "nothing to crawl: publisher unavailable for item " + std::to_string(item));
      return;
    }
    double retry = 0.0;
    if (!rate_allow(w, site, Activity::crawl, &retry)) {
      w.log(w.now(), site, "rate_deferred", "ingest crawl deferred");
      return;  // picked up by reconciliation re-crawls
    }
    Rng miss = w.rng.stream("ingest_miss", (static_cast<std::uint64_t>(item) << 20) | site);
    if (miss.bernoulli(st.crawl_miss_probability)) {
      token.nonce = miss.next_u64() | 1;  // incomplete crawl, site-specific gaps
      partial = true;
    }
  }
  if (threats::comm_corrupts(w, site))
    token.nonce = w.site_streams[site].comm.next_u64() | 1;

  const ReplicaId rid = create_replica(w, item, site, unit, it.format, token);
  w.replicas[rid].partial = partial;
  // External store records are the publisher's own SIP digests (end-to-end);
  // same-system records are computed from whatever actually arrived.
  audit::install_digests(w, rid, w.sc->audit.store == StoreKind::external_store);

  if (st.preserve_original && st.migration == MigrationMode::normalize_on_ingest &&
      it.version > 0) {
    const UnitId u2 = pick_unit(w, site, it.size_bytes);
    if (u2 != kNone) {
      ContentToken orig;
      orig.version = 0;
      if (threats::comm_corrupts(w, site))
        orig.nonce = w.site_streams[site].comm.next_u64() | 1;
      // Original format lineage: find the format that migrates to the
      // current one (the pre-normalization format).
      FormatId orig_fmt = it.format;
      for (FormatId f = 0; f < w.formats.size(); ++f)
        if (w.formats[f].migration_target == it.format) orig_fmt = f;
      const ReplicaId orig_rid = create_replica(w, item, site, u2, orig_fmt, orig);
      audit::install_digests(w, orig_rid, w.sc->audit.store == StoreKind::external_store);
    }
  }
}

// Ingest reconciliation: compare the replicas' digests, re-fetch everything
// that disagrees with what the publisher is currently serving, and repeat
// until the copies agree. Without a publisher, disagreement is a dead end.
void do_reconcile(World& w, ItemId item) {
  ContentItem& it = w.items[item];
  std::vector<ReplicaId> present;
  for (ReplicaId r : it.replicas) {
    const Replica& rep = w.replicas[r];
    if (rep.present && rep.state != ReplicaState::lost &&
        rep.content.version == it.version && w.sites[rep.site].up(w.now()))
      present.push_back(r);
  }
  if (present.empty()) return;

  if (!it.publisher_available) {
    // Consensus among the copies is all we have; divergent minorities are
    // unfixable until (if ever) the publisher returns.
    bool all_agree = true;
    for (ReplicaId r : present)
      all_agree &= w.replicas[r].content == w.replicas[present[0]].content;
    if (!all_agree) {
      it.impaired_flagged = true;
      w.log(w.now(), kNone, "ingest_impaired",
            "item " + std::to_string(item) +
                ": replicas disagree and the publisher is gone");
    }
    return;
  }

  ContentToken reference;  // what the publisher is publishing
  reference.version = it.version;
  bool dispatched = false;
  double last_completion = w.now();
  for (ReplicaId r : present) {
    if (w.replicas[r].content == reference) continue;
    if (w.replicas[r].repair_in_flight) {
      dispatched = true;
      continue;
    }
    double retry = 0.0;
    if (!rate_allow(w, w.replicas[r].site, Activity::crawl, &retry)) {
      w.log(w.now(), w.replicas[r].site, "rate_deferred", "reconcile re-crawl deferred");
      dispatched = true;
      last_completion = std::max(last_completion, retry);
      continue;
    }
    ContentToken payload = publisher_payload(w, it.version, w.replicas[r].site);
    // Re-crawls can also come back incomplete.
    Rng& miss = w.item_streams[item].repair;
    bool partial = false;
    if (miss.bernoulli(w.sc->strategy.crawl_miss_probability) && payload.pristine()) {
      payload.nonce = miss.next_u64() | 1;
      partial = true;
    }
    const double done = w.now() + w.sc->audit.transfer_delay_years;
    const std::uint32_t tidx =
        start_transfer(w, TransferKind::refetch, item, r, w.replicas[r].site, payload, done);
    w.transfers[tidx].payload_partial = partial;
    last_completion = std::max(last_completion, done);
    dispatched = true;
  }
  if (dispatched)
    w.schedule(last_completion + w.sc->audit.transfer_delay_years,
               EventKind::reconcile_ingest, item);
  else
    it.impaired_flagged = false;
}

void do_batch_migration(World& w, FormatId format) {
  const Format& fmt = w.formats[format];
  if (fmt.migration_target == kNone) return;
  const FormatId target = fmt.migration_target;
  int migrated = 0;
  for (ItemId i = 0; i < w.items.size(); ++i) {
    ContentItem& it = w.items[i];
    if (it.format != format) continue;
    const std::uint32_t new_version = it.version + 1;
    bool any = false;
    const std::size_t replica_count = it.replicas.size();  // appended ones are new copies
    for (std::size_t k = 0; k < replica_count; ++k) {
      const ReplicaId r = it.replicas[k];
      Replica& rep = w.replicas[r];
      if (!rep.present || rep.state == ReplicaState::lost) continue;
      if (rep.content.version != it.version || rep.format != format) continue;
      ContentToken converted = w.read_replica(r, false);
      converted.version = new_version;
      if (w.sc->strategy.preserve_original) {
        const UnitId unit = pick_unit(w, rep.site, it.size_bytes);
        if (unit == kNone) {
          w.log(w.now(), rep.site, "migration_deferred",
                "no capacity for migrated copy of item " + std::to_string(i));
          continue;
        }
        const ReplicaId mig = create_replica(w, i, rep.site, unit, target, converted);
        audit::install_digests(w, mig, false);
      } else {
        rep.content = converted;
        rep.format = target;
        rep.state = converted.pristine() ? ReplicaState::intact
                                         : ReplicaState::silently_corrupt;
        if (!converted.pristine() && rep.corrupted_since < 0)
          rep.corrupted_since = w.now();
        audit::install_digests(w, r, false);
      }
      any = true;
    }
    if (any) {
      it.version = new_version;
      it.format = target;
      w.charge(w.now(), kNone, CostCategory::migration,
               w.sc->costs.migration_batch_per_item);
      ++migrated;
    }
  }
  w.log(w.now(), kNone, "migration",
        "batch migration " + fmt.label + " -> " + w.formats[target].label + ": " +
            std::to_string(migrated) + " items converted");
}

void do_maintenance(World& w) {
  const StrategySpec& st = w.sc->strategy;
  const double now = w.now();

  for (SiteId s = 0; s < w.sites.size(); ++s) {
    Site& site = w.sites[s];
    if (site.removed) continue;
    if (site.maintenance_deferred) {
      w.log(now, s, "economic_degradation", "maintenance deferred for lack of funds");
      continue;
    }
    if (site.restore_pending) {
      site.outage_gen++;
      const double restore = w.site_streams[s].hw_fatal.exponential(
          1.0 / std::max(1e-9, w.sc->threats.hardware_failure.mean_restore_years));
      w.schedule(now + restore, EventKind::hardware_restore, s, kNone, kNone, 0.0,
                 site.outage_gen);
      site.restore_pending = false;
    }

    // Slot re-provisioning: crashed or obsolete units are replaced by empty
    // current-generation hardware.
    const UnitSpec& spec = site.is_digest_store && w.sc->digest_store
                               ? w.sc->digest_store->unit
                               : w.sc->sites.unit;
    for (std::size_t slot = 0; slot < site.units.size(); ++slot) {
      if (w.units[site.units[slot]].retired) {
        w.units.push_back(MediaUnit{});
        MediaUnit& nu = w.units.back();
        nu.site = s;
        nu.uid = w.next_unit_uid++;
        nu.capacity_bytes = static_cast<std::uint64_t>(spec.capacity_bytes);
        nu.uber_per_bit = spec.uber_per_bit;
        nu.annual_hazard = spec.annual_hazard;
        nu.service_life_years = spec.service_life_years;
        nu.deployed_at = now;
        nu.grade = site.grade;
        nu.read_rng = w.rng.stream("unit_read", nu.uid);
        site.units[slot] = static_cast<UnitId>(w.units.size() - 1);
        threats::arm_unit_crash(w, site.units[slot]);
        w.log(now, s, "maintenance", "retired unit slot re-provisioned");
      }
    }

    // End-of-life and refresh replacement.
    for (std::size_t slot = 0; slot < site.units.size(); ++slot) {
      const UnitId u = site.units[slot];
      const MediaUnit& unit = w.units[u];
      if (unit.retired) continue;
      const double age = now - unit.deployed_at;
      const bool eol = age >= unit.service_life_years;
      const bool refresh =
          st.media_refresh_interval_years && age >= *st.media_refresh_interval_years;
      if (eol || refresh) replace_unit(w, u, eol ? "end_of_service_life" : "media_refresh");
    }

    // Rolling replacement: a fixed fraction of the fleet per year, oldest
    // first, keeps hardware flowing through the system.
    if (st.rolling_replacement_fraction > 0.0 && !site.is_digest_store) {
      std::vector<UnitId> live;
      for (UnitId u : site.units)
        if (!w.units[u].retired && w.units[u].deployed_at < now) live.push_back(u);
      std::sort(live.begin(), live.end(), [&](UnitId a, UnitId b) {
        if (w.units[a].deployed_at != w.units[b].deployed_at)
          return w.units[a].deployed_at < w.units[b].deployed_at;
        return a < b;
      });
      const int n = static_cast<int>(st.rolling_replacement_fraction *
                                     static_cast<double>(live.size()) *
                                     w.sc->maintenance_interval_years);
      for (int k = 0; k < n && k < static_cast<int>(live.size()); ++k)
        replace_unit(w, live[static_cast<std::size_t>(k)], "rolling_replacement");
    }
  }

  // Peer replication: establish more replicas when too few can be located.
  if (st.replication == ReplicationMode::p2p) {
    for (ItemId i = 0; i < w.items.size(); ++i) {
      const int observable = w.observable_count(i);
      if (observable >= st.repair_threshold) continue;
      int deficit = st.target_min - observable;
      for (std::uint32_t j = 0; j < w.sites.size() && deficit > 0; ++j) {
        const SiteId site = static_cast<SiteId>((i + j) % w.sites.size());
        Site& s = w.sites[site];
        if (s.removed || s.is_digest_store || !s.up(now) || s.maintenance_deferred)
          continue;
        bool has_current = false;
        for (ReplicaId r : w.items[i].replicas) {
          const Replica& rep = w.replicas[r];
          if (rep.present && rep.site == site && rep.state != ReplicaState::lost &&
              rep.content.version == w.items[i].version)
            has_current = true;
        }
        if (has_current) continue;
        if (pick_unit(w, site, w.items[i].size_bytes) == kNone) continue;
        ReplicaId src = kNone;
        if (!w.items[i].publisher_available || w.items[i].version != 0) {
          src = pick_source(w, i, kNone, w.items[i].version);
          if (src == kNone) {
            w.log(now, site, "repair_deferred",
                  "no vetted source to re-replicate item " + std::to_string(i));
            break;
          }
        }
        double retry = 0.0;
        if (!rate_allow(w, site, Activity::repair, &retry)) continue;
        const ContentToken payload = src == kNone ? publisher_payload(w, 0, site)
                                                  : peer_payload(w, src, site, i);
        start_transfer(w, TransferKind::replication, i, kNone, site, payload,
                       now + w.sc->audit.transfer_delay_years, w.items[i].format);
        --deficit;
      }
    }
  }
}

}  // namespace

bool rate_allow(World& w, SiteId site, Activity activity, double* retry_at) {
  const double limit = limit_for(w, activity);
  RateWindow& win = w.rate_state[site].windows[static_cast<std::size_t>(activity)];
  const std::int64_t year = static_cast<std::int64_t>(std::floor(w.now()));
  if (win.year != year) {
    win.year = year;
    win.used = 0.0;
  }
  if (win.used + 1.0 <= limit) {
    win.used += 1.0;
    return true;
  }
  if (retry_at) *retry_at = static_cast<double>(year + 1);
  return false;
}

UnitId pick_unit(World& w, SiteId site, std::uint64_t bytes) {
  UnitId best = kNone;
  std::uint64_t best_free = 0;
  for (UnitId u : w.sites[site].units) {
    const MediaUnit& unit = w.units[u];
    if (unit.retired) continue;
    const std::uint64_t free =
        unit.capacity_bytes > unit.used_bytes ? unit.capacity_bytes - unit.used_bytes : 0;
    if (free >= bytes && free > best_free) {
      best_free = free;
      best = u;
    }
  }
  return best;
}

bool schedule_repair(World& w, ReplicaId target, const char* why) {
  Replica& rep = w.replicas[target];
  if (rep.repair_in_flight) return true;
  if (!rep.present || rep.state == ReplicaState::lost) return false;
  const ItemId item = rep.item;
  double retry = 0.0;
  if (!rate_allow(w, rep.site, Activity::repair, &retry)) {
    w.log(w.now(), rep.site, "rate_deferred",
          std::string("repair deferred (") + why + ")");
    return false;
  }
  ContentToken payload;
  if (w.items[item].publisher_available && rep.content.version == 0) {
    payload = publisher_payload(w, 0, rep.site);
  } else {
    const ReplicaId src = pick_source(w, item, target, rep.content.version);
    if (src == kNone) {
      w.log(w.now(), rep.site, "repair_deferred",
            std::string("no vetted repair source (") + why + ")");
      return false;
    }
    payload = peer_payload(w, src, rep.site, item);
  }
  start_transfer(w, TransferKind::repair, item, target, rep.site, payload,
                 w.now() + w.sc->audit.transfer_delay_years);
  return true;
}

void start_repair_transfer(World& w, ItemId item, ReplicaId target,
                           const ContentToken& payload) {
  start_transfer(w, TransferKind::repair, item, target, w.replicas[target].site,
                 payload, w.now() + w.sc->audit.transfer_delay_years);
}

void finish_transfer(World& w, std::uint32_t idx) {
  const Transfer tr = w.transfers[idx];
  w.transfers[idx].active = false;
  w.free_transfers.push_back(idx);

  if (tr.target != kNone) {
    Replica& rep = w.replicas[tr.target];
    rep.repair_in_flight = false;
    if (!rep.present || w.sites[rep.site].removed) {
      w.log(w.now(), tr.dest_site, "stale_event", "repair arrived for a gone replica");
      return;
    }
    if (rep.state == ReplicaState::lost) {
      w.log(w.now(), rep.site, "repair_dropped",
            "repair payload arrived after the replica's unit was lost");
      return;
    }
    w.restore_replica(tr.target, tr.payload, tr.payload.pristine(),
                      tr.kind == TransferKind::refetch ? "reconcile_refetch" : "repair");
    w.replicas[tr.target].partial = tr.payload_partial;
    // Digest records are recomputed from the repaired copy; a re-fetch from
    // the publisher also re-establishes the external store entry.
    audit::install_digests(w, tr.target,
                           tr.kind == TransferKind::refetch &&
                               w.sc->audit.store == StoreKind::external_store);
    return;
  }

  // New replica (p2p replication or organizational handoff).
  if (tr.dest_site == kNone || w.sites[tr.dest_site].removed ||
      !w.sites[tr.dest_site].up(w.now())) {
    w.log(w.now(), tr.dest_site, "stale_event", "transfer arrived at an unusable site");
    return;
  }
  const UnitId unit = pick_unit(w, tr.dest_site, w.items[tr.item].size_bytes);
  if (unit == kNone) {
    w.log(w.now(), tr.dest_site, "transfer_dropped", "no capacity on arrival");
    return;
  }
  const FormatId fmt = tr.format != kNone ? tr.format : w.items[tr.item].format;
  const ReplicaId rid = create_replica(w, tr.item, tr.dest_site, unit, fmt, tr.payload);
  audit::install_digests(w, rid, false);
  if (tr.kind == TransferKind::replication) {
    ++w.repairs_completed;
    if (!tr.payload.pristine()) ++w.repairs_bad;
  }
  w.log(w.now(), tr.dest_site,
        tr.kind == TransferKind::unit_copy ? "handoff" : "replication",
        "new replica of item " + std::to_string(tr.item));
}

void replace_unit(World& w, UnitId unit_id, const char* why) {
  MediaUnit& old = w.units[unit_id];
  const SiteId s = old.site;
  Site& site = w.sites[s];
  w.accrue_site(s, w.now());

  const UnitSpec& spec = site.is_digest_store && w.sc->digest_store
                             ? w.sc->digest_store->unit
                             : w.sc->sites.unit;
  w.units.push_back(MediaUnit{});
  MediaUnit& nu = w.units.back();
  nu.site = s;
  nu.uid = w.next_unit_uid++;
  nu.capacity_bytes = static_cast<std::uint64_t>(spec.capacity_bytes);
  nu.uber_per_bit = spec.uber_per_bit;
  nu.annual_hazard = spec.annual_hazard;
  nu.service_life_years = spec.service_life_years;
  nu.deployed_at = w.now();
  nu.grade = site.grade;
  nu.read_rng = w.rng.stream("unit_read", nu.uid);
  const UnitId new_id = static_cast<UnitId>(w.units.size() - 1);

  for (std::size_t slot = 0; slot < site.units.size(); ++slot)
    if (site.units[slot] == unit_id) site.units[slot] = new_id;

  if (!site.is_digest_store) {
    for (ItemId i = 0; i < w.items.size(); ++i) {
      for (ReplicaId r : w.items[i].replicas) {
        Replica& rep = w.replicas[r];
        if (rep.unit != unit_id || !rep.present || rep.state == ReplicaState::lost)
          continue;
        // Copy to the new unit: a full read plus a local transfer.
        ContentToken moved = w.read_replica(r, false);
        if (threats::comm_corrupts(w, s))
          moved = ContentToken{moved.version, w.site_streams[s].comm.next_u64() | 1, kNone};
        if (!(moved == rep.content)) {
          rep.content = moved;
          if (rep.state == ReplicaState::intact) {
            rep.state = ReplicaState::silently_corrupt;
            rep.corrupted_since = w.now();
            rep.damage_detected = false;
          }
        }
        rep.unit = new_id;
        w.units[new_id].used_bytes += w.items[i].size_bytes;
      }
    }
  }
  old.retired = true;
  old.used_bytes = 0;
  threats::arm_unit_crash(w, new_id);
  w.log(w.now(), s, "maintenance",
        std::string(why) + ": unit " + std::to_string(old.uid) + " replaced by " +
            std::to_string(nu.uid));
}

void hand_off_site(World& w, SiteId site_id, bool handoff_succeeded) {
  Site& site = w.sites[site_id];
  w.accrue_site(site_id, w.now());
  int moved = 0, dropped = 0;
  for (ItemId i = 0; i < w.items.size(); ++i) {
    for (ReplicaId r : w.items[i].replicas) {
      Replica& rep = w.replicas[r];
      if (rep.site != site_id || !rep.present) continue;
      if (rep.state == ReplicaState::lost) {
        rep.present = false;
        continue;
      }
      SiteId dest = kNone;
      std::uint64_t best_free = 0;
      if (handoff_succeeded) {
        for (SiteId s = 0; s < w.sites.size(); ++s) {
          const Site& cand = w.sites[s];
          if (s == site_id || cand.removed || cand.is_digest_store || !cand.up(w.now()))
            continue;
          for (UnitId u : cand.units) {
            const MediaUnit& unit = w.units[u];
            if (unit.retired) continue;
            const std::uint64_t free = unit.capacity_bytes > unit.used_bytes
                                           ? unit.capacity_bytes - unit.used_bytes
                                           : 0;
            if (free >= w.items[i].size_bytes && free > best_free) {
              best_free = free;
              dest = s;
            }
          }
        }
      }
      if (dest == kNone) {
        w.lose_replica(r, "organizational_failure");
        w.decommission_replica(r, "organizational_failure");
        ++dropped;
        continue;
      }
      ContentToken payload = peer_payload(w, r, dest, i);
      start_transfer(w, TransferKind::unit_copy, i, kNone, dest, payload,
                     w.now() + w.sc->audit.transfer_delay_years, rep.format);
      w.decommission_replica(r, "organizational_handoff");
      ++moved;
    }
  }
  for (UnitId u : site.units) w.units[u].retired = true;
  site.removed = true;
  w.log(w.now(), site_id, "organizational_failure",
        std::to_string(moved) + " replicas handed off, " + std::to_string(dropped) +
            " lost");
}

void schedule_initial(World& w) {
  for (ItemId i = 0; i < w.items.size(); ++i)
    w.schedule(0.0, EventKind::ingest_item, i);

  for (double t = w.sc->maintenance_interval_years; t <= w.horizon();
       t += w.sc->maintenance_interval_years)
    w.schedule(t, EventKind::maintenance_tick);

  if (w.sc->strategy.migration == MigrationMode::batch) {
    for (FormatId f = 0; f < w.formats.size(); ++f) {
      const Format& fmt = w.formats[f];
      if (fmt.obsolete_at >= 0.0 && fmt.migration_target != kNone)
        w.schedule(std::max(0.0, fmt.obsolete_at - w.sc->strategy.batch_lead_years),
                   EventKind::migration_batch, f);
    }
  }
}

void handle(World& w, const Event& e) {
  switch (e.kind) {
    case EventKind::ingest_item:
      if (e.b != kNone)
        ingest_one_site(w, e.a, e.b);
      else
        do_ingest(w, e.a);
      return;
    case EventKind::reconcile_ingest:
      do_reconcile(w, e.a);
      return;
    case EventKind::migration_batch:
      do_batch_migration(w, e.a);
      return;
    case EventKind::maintenance_tick:
      do_maintenance(w);
      return;
    case EventKind::transfer_complete:
      if (e.a < w.transfers.size() && w.transfers[e.a].active &&
          w.transfers[e.a].gen == e.n)
        finish_transfer(w, e.a);
      return;
    default:
      throw SimError(std::string("strategy handler got unexpected event ") +
                     to_string(e.kind));
  }
}

}  // namespace presim::strategy
