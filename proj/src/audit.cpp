#include "presim/audit.hpp"

#include <algorithm>

#include "presim/strategy.hpp"
#include "presim/threats.hpp"

namespace presim::audit {

namespace {

bool store_reachable(const World& w) {
  if (w.sc->audit.store != StoreKind::external_store) return true;
  return w.store_site != kNone && w.sites[w.store_site].up(w.now());
}

// Ground-truth bookkeeping shared by both mechanisms: an audited replica that
// is damaged but passes is an undetected forgery/corruption; one that fails
// gets its detection latency recorded.
void account_outcome(World& w, ReplicaId r, AuditMechanism mech, bool passed) {
  Replica& rep = w.replicas[r];
  if (passed) {
    if (rep.corrupted_since >= 0.0 || rep.state == ReplicaState::forged) {
      ++w.undetected_forgeries;
      w.outcomes.push_back({w.now(), rep.item, r, mech,
                            AuditVerdict::undetected_forgery, -1.0});
    }
  } else {
    w.note_detection(r, w.now());
  }
}

void record(World& w, ItemId item, ReplicaId r, AuditMechanism mech, AuditVerdict v,
            double latency = -1.0) {
  w.outcomes.push_back({w.now(), item, r, mech, v, latency});
}

struct CheckResult {
  bool checked_any = false;
  bool mismatch = false;
};

// Compares the replica's current content against one stored digest record.
CheckResult check_against_external(World& w, ReplicaId r, const ContentToken& token,
                                   AlgorithmId alg) {
  CheckResult res;
  Replica& rep = w.replicas[r];
  const StoreRecord& cell =
      w.store_records[w.store_index(rep.item, alg, token.version)];
  switch (cell.state) {
    case StoreRecordState::missing:
      return res;
    case StoreRecordState::lost:
      w.log(w.now(), rep.site, "store_record_missing",
            "no surviving stored digest for item " + std::to_string(rep.item));
      return res;
    case StoreRecordState::corrupt:
      // The comparison still runs; a damaged record reads as a mismatch and
      // the auditor cannot tell which side is at fault.
      res.checked_any = true;
      res.mismatch = digest_of(rep.item, token, alg) != cell.value;
      return res;
    case StoreRecordState::ok:
      res.checked_any = true;
      res.mismatch = digest_of(rep.item, token, alg) != cell.value;
      return res;
  }
  return res;
}

CheckResult check_against_local(World& w, ReplicaId r, const ContentToken& token,
                                AlgorithmId alg) {
  CheckResult res;
  Replica& rep = w.replicas[r];
  const DigestRecord* latest = nullptr;
  for (const DigestRecord& d : rep.digests)
    if (d.algorithm == alg) latest = &d;
  if (!latest) return res;
  res.checked_any = true;
  res.mismatch = digest_of(rep.item, token, alg) != latest->value;
  return res;
}

}  // namespace

void install_digests(World& w, ReplicaId r, bool publisher_digests) {
  Replica& rep = w.replicas[r];
  if (!w.sc->audit.third_party_enabled) return;
  ContentToken basis = rep.content;
  if (publisher_digests) basis = ContentToken{rep.content.version, 0, kNone};

  if (w.sc->audit.store == StoreKind::external_store) {
    if (w.store_site == kNone) return;
    for (AlgorithmId alg : w.active_tp_algorithms) {
      StoreRecord& cell = w.store_records[w.store_index(rep.item, alg, basis.version)];
      // A publisher-sourced install is authoritative; otherwise only fill
      // cells that have nothing usable (first install or re-baseline after
      // the store lost them).
      if (publisher_digests || cell.state == StoreRecordState::missing ||
          cell.state == StoreRecordState::lost) {
        cell.value = digest_of(rep.item, basis, alg);
        cell.state = StoreRecordState::ok;
      }
    }
    return;
  }
  rep.digests.clear();
  for (AlgorithmId alg : w.active_tp_algorithms) {
    DigestRecord d;
    d.algorithm = alg;
    d.value = digest_of(rep.item, basis, alg);
    d.computed_at = w.now();
    d.stored_in = StoreKind::same_system;
    rep.digests.push_back(d);
  }
}

AuditVerdict third_party_audit_replica(World& w, ReplicaId r) {
  Replica& rep = w.replicas[r];
  if (!rep.present || rep.state == ReplicaState::lost) return AuditVerdict::deferred;

  w.charge(w.now(), rep.site, CostCategory::audit, w.sc->costs.audit_per_poll);
  const ContentToken token = w.read_replica(r, true);

  bool checked = false;
  bool mismatch = false;
  for (AlgorithmId alg : w.active_tp_algorithms) {
    const CheckResult res = w.sc->audit.store == StoreKind::external_store
                                ? check_against_external(w, r, token, alg)
                                : check_against_local(w, r, token, alg);
    checked |= res.checked_any;
    mismatch |= res.mismatch;
  }
  rep.last_audited = w.now();
  if (!checked) {
    // Every stored digest for this replica is gone (the store is itself a
    // preservation system and can fail). Re-baseline from the current bytes:
    // auditing resumes, but whatever state the content is in now is what the
    // new records describe.
    install_digests(w, r, false);
    w.log(w.now(), rep.site, "audit_rebaseline",
          "stored digests for item " + std::to_string(rep.item) +
              " re-established from current content without assurance");
    return AuditVerdict::deferred;
  }
  if (mismatch) {
    rep.last_audit_pass = false;
    rep.flagged_bad = true;
    account_outcome(w, r, AuditMechanism::third_party, false);
    record(w, rep.item, r, AuditMechanism::third_party, AuditVerdict::mismatch,
           rep.corrupted_since >= 0.0 ? w.now() - rep.corrupted_since : -1.0);
    w.log(w.now(), rep.site, "audit_mismatch",
          "item " + std::to_string(rep.item) +
              ": content or stored digest corrupt (cannot tell which)");
    strategy::schedule_repair(w, r, "third_party_mismatch");
    return AuditVerdict::mismatch;
  }
  rep.last_audit_pass = true;
  ++w.audit_pass_count;
  account_outcome(w, r, AuditMechanism::third_party, true);
  return AuditVerdict::pass;
}

AuditVerdict mutual_audit_round(World& w, ItemId item) {
  const AuditParams& au = w.sc->audit;
  ContentItem& it = w.items[item];

  // Voters: locatable current-version replicas at reachable sites. Content
  // never moves during a poll, only digests.
  std::vector<ReplicaId> holders;
  for (ReplicaId r : it.replicas) {
    const Replica& rep = w.replicas[r];
    if (rep.present && rep.state != ReplicaState::lost &&
        rep.content.version == it.version && w.sites[rep.site].up(w.now()))
      holders.push_back(r);
  }
  const std::uint32_t round = w.mutual_round_counter[item]++;
  if (holders.size() < 2) {
    w.log(w.now(), kNone, "poll_deferred",
          "item " + std::to_string(item) + ": not enough reachable peers");
    record(w, item, kNone, AuditMechanism::mutual, AuditVerdict::deferred);
    return AuditVerdict::deferred;
  }

  const ReplicaId poller = holders[round % holders.size()];
  const SiteId poller_site = w.replicas[poller].site;
  if (w.sites[poller_site].audits_deferred) {
    w.log(w.now(), poller_site, "economic_degradation", "mutual poll deferred: no funds");
    record(w, item, poller, AuditMechanism::mutual, AuditVerdict::deferred);
    return AuditVerdict::deferred;
  }
  double retry = 0.0;
  if (!strategy::rate_allow(w, poller_site, Activity::audit, &retry)) {
    w.log(w.now(), poller_site, "rate_deferred", "mutual poll deferred");
    record(w, item, poller, AuditMechanism::mutual, AuditVerdict::deferred);
    return AuditVerdict::deferred;
  }
  w.charge(w.now(), poller_site, CostCategory::audit, w.sc->costs.audit_per_poll);

  std::vector<ReplicaId> peers;
  for (ReplicaId r : holders)
    if (r != poller) peers.push_back(r);
  const std::size_t sample_size =
      std::min<std::size_t>(static_cast<std::size_t>(au.quorum), peers.size());
  Rng& rng = w.item_streams[item].mutual;
  for (std::size_t k = 0; k < sample_size; ++k) {
    const std::size_t j = k + rng.below(peers.size() - k);
    std::swap(peers[k], peers[j]);
  }
  peers.resize(sample_size);

  const ContentToken own = w.read_replica(poller, true);
  const std::uint64_t own_vote = digest_of(item, own, au.mutual_algorithm);

  std::vector<std::uint64_t> votes;
  votes.reserve(peers.size());
  for (ReplicaId r : peers) {
    const ContentToken token = w.read_replica(r, true);
    std::uint64_t v = digest_of(item, token, au.mutual_algorithm);
    if (threats::comm_corrupts(w, poller_site))
      v = mix_u64(v, w.site_streams[poller_site].comm.next_u64() | 1);
    votes.push_back(v);
  }

  std::size_t agree = 0;
  for (std::uint64_t v : votes) agree += v == own_vote ? 1 : 0;
  std::uint64_t winning_value = 0;
  std::size_t winning_count = 0;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] == own_vote) continue;
    std::size_t c = 0;
    for (std::uint64_t v : votes) c += v == votes[i] ? 1 : 0;
    if (c > winning_count) {
      winning_count = c;
      winning_value = votes[i];
    }
  }
  const double n = static_cast<double>(votes.size());
  const double agree_frac = static_cast<double>(agree) / n;
  const double other_frac = static_cast<double>(winning_count) / n;

  if (agree_frac >= au.landslide_fraction) {
    w.replicas[poller].last_audited = w.now();
    w.replicas[poller].last_audit_pass = true;
    ++w.audit_pass_count;
    account_outcome(w, poller, AuditMechanism::mutual, true);
    return AuditVerdict::pass;
  }
  if (other_frac >= au.landslide_fraction) {
    // The poller is off-consensus: repair from the publisher if it still
    // exists, else from a peer on the winning side.
    Replica& rep = w.replicas[poller];
    rep.last_audit_pass = false;
    rep.flagged_bad = true;
    account_outcome(w, poller, AuditMechanism::mutual, false);

    bool dispatched = false;
    if (!rep.repair_in_flight) {
      double rretry = 0.0;
      if (strategy::rate_allow(w, poller_site, Activity::repair, &rretry)) {
        ContentToken payload;
        if (it.publisher_available && it.version == 0) {
          payload = ContentToken{0, 0, kNone};
          if (threats::comm_corrupts(w, poller_site))
            payload.nonce = w.site_streams[poller_site].comm.next_u64() | 1;
        } else {
          std::vector<ReplicaId> winners;
          for (std::size_t i = 0; i < peers.size(); ++i)
            if (votes[i] == winning_value) winners.push_back(peers[i]);
          const ReplicaId src = winners[rng.below(winners.size())];
          payload = w.read_replica(src, false);
          if (threats::comm_corrupts(w, poller_site))
            payload = ContentToken{payload.version,
                                   w.site_streams[poller_site].comm.next_u64() | 1, kNone};
        }
        strategy::start_repair_transfer(w, item, poller, payload);
        dispatched = true;
      } else {
        w.log(w.now(), poller_site, "rate_deferred", "poll-triggered repair deferred");
      }
    } else {
      dispatched = true;
    }
    const AuditVerdict v = dispatched ? AuditVerdict::repaired : AuditVerdict::deferred;
    record(w, item, poller, AuditMechanism::mutual, v,
           rep.corrupted_since >= 0.0 ? w.now() - rep.corrupted_since : -1.0);
    w.log(w.now(), poller_site, "poll_repair",
          "item " + std::to_string(item) + ": replica disagrees with the consensus");
    return v;
  }
  // No landslide either way: treat as possible intrusion, raise the alarm
  // and leave the content alone for investigation.
  ++w.alarms;
  record(w, item, poller, AuditMechanism::mutual, AuditVerdict::alarm);
  w.log(w.now(), poller_site, "poll_alarm",
        "item " + std::to_string(item) + ": vote split without a landslide");
  return AuditVerdict::alarm;
}

namespace {

void do_rollover(World& w, std::uint32_t plan_index) {
  const RolloverPlan& plan = w.sc->audit.rollovers[plan_index];
  const DigestAlgorithm& from = w.sc->algorithms[plan.from];
  const bool late = from.is_publicly_broken(w.now());
  if (late)
    w.log(w.now(), kNone, "assurance_gap",
          "rollover from " + from.label + " after its public break: new digests "
          "inherit no assurance");

  bool active = false;
  for (AlgorithmId a : w.active_tp_algorithms) active |= a == plan.to;
  if (!active) w.active_tp_algorithms.push_back(plan.to);

  bool any_unrolled = false;
  for (ItemId item = 0; item < w.items.size(); ++item) {
    for (ReplicaId r : w.items[item].replicas) {
      Replica& rep = w.replicas[r];
      if (!rep.present || rep.state == ReplicaState::lost) continue;
      if (rep.flagged_bad) {
        // Already known-bad and awaiting repair; retry after it heals.
        any_unrolled = true;
        continue;
      }
      if (!w.sites[rep.site].up(w.now())) {
        any_unrolled = true;
        continue;
      }
      w.charge(w.now(), rep.site, CostCategory::audit, w.sc->costs.audit_per_poll);
      const ContentToken token = w.read_replica(r, true);

      // Verify against the old algorithm first; only verified content gets a
      // digest under the new algorithm appended.
      const CheckResult res = w.sc->audit.store == StoreKind::external_store
                                  ? check_against_external(w, r, token, plan.from)
                                  : check_against_local(w, r, token, plan.from);
      if (!res.checked_any) {
        // Nothing left to verify against; re-baseline and retry the rollover
        // once records exist again.
        install_digests(w, r, false);
        w.log(w.now(), rep.site, "audit_rebaseline",
              "rollover found no usable records for item " + std::to_string(item));
        any_unrolled = true;
        continue;
      }
      if (res.mismatch) {
        rep.flagged_bad = true;
        rep.last_audit_pass = false;
        account_outcome(w, r, AuditMechanism::rollover, false);
        record(w, item, r, AuditMechanism::rollover, AuditVerdict::mismatch);
        w.log(w.now(), rep.site, "rollover_abort",
              "item " + std::to_string(item) + ": verification failed; repair first");
        strategy::schedule_repair(w, r, "rollover_mismatch");
        any_unrolled = true;
        continue;
      }
      if (w.sc->audit.store == StoreKind::external_store) {
        StoreRecord& cell =
            w.store_records[w.store_index(item, plan.to, token.version)];
        if (cell.state == StoreRecordState::missing ||
            cell.state == StoreRecordState::lost) {
          cell.value = digest_of(item, token, plan.to);
          cell.state = StoreRecordState::ok;
        }
      } else {
        bool have = false;
        for (const DigestRecord& d : rep.digests) have |= d.algorithm == plan.to;
        if (!have) {
          DigestRecord d;
          d.algorithm = plan.to;
          d.value = digest_of(item, token, plan.to);
          d.computed_at = w.now();
          d.stored_in = StoreKind::same_system;
          d.assured = !late;
          rep.digests.push_back(d);
        }
      }
    }
  }
  if (any_unrolled)
    w.schedule(w.now() + 0.25, EventKind::digest_rollover, plan_index);
}

}  // namespace

void schedule_initial(World& w) {
  const AuditParams& au = w.sc->audit;
  if (au.third_party_enabled) {
    for (ItemId i = 0; i < w.items.size(); ++i) {
      Rng phase = w.rng.stream("tp_phase", i);
      w.schedule(phase.uniform(0.0, au.third_party_interval_years),
                 EventKind::audit_third_party, i);
    }
  }
  if (au.mutual_enabled) {
    for (ItemId i = 0; i < w.items.size(); ++i) {
      Rng phase = w.rng.stream("mutual_phase", i);
      w.schedule(phase.uniform(0.0, au.mutual_interval_years),
                 EventKind::audit_mutual, i);
    }
  }
  for (std::uint32_t p = 0; p < au.rollovers.size(); ++p)
    w.schedule(au.rollovers[p].at, EventKind::digest_rollover, p);
}

void handle(World& w, const Event& e) {
  switch (e.kind) {
    case EventKind::audit_third_party: {
      const ItemId item = e.a;
      if (!store_reachable(w)) {
        w.log(e.time, kNone, "audit_deferred", "digest store unreachable");
      } else {
        for (ReplicaId r : w.items[item].replicas) {
          const Replica& rep = w.replicas[r];
          if (!rep.present || rep.state == ReplicaState::lost) continue;
          if (!w.sites[rep.site].up(w.now())) continue;
          if (w.sites[rep.site].audits_deferred) {
            w.log(e.time, rep.site, "economic_degradation", "audit deferred: no funds");
            continue;
          }
          double retry = 0.0;
          if (!strategy::rate_allow(w, rep.site, Activity::audit, &retry)) {
            w.log(e.time, rep.site, "rate_deferred", "third-party audit deferred");
            continue;
          }
          third_party_audit_replica(w, r);
        }
      }
      w.schedule(e.time + w.sc->audit.third_party_interval_years,
                 EventKind::audit_third_party, item);
      return;
    }
    case EventKind::audit_mutual: {
      const ItemId item = e.a;
      if (!w.items[item].replicas.empty()) mutual_audit_round(w, item);
      w.schedule(e.time + w.sc->audit.mutual_interval_years, EventKind::audit_mutual,
                 item);
      return;
    }
    case EventKind::digest_rollover:
      do_rollover(w, e.a);
      return;
    default:
      throw SimError(std::string("audit handler got unexpected event ") +
                     to_string(e.kind));
  }
}

}  // namespace presim::audit
