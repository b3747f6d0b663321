#include "presim/threats.hpp"

#include <cmath>

#include "presim/strategy.hpp"

namespace presim::threats {

namespace {

constexpr double kForever = 1e18;

bool unit_event_stale(World& w, const Event& e) {
  if (e.a >= w.units.size()) return true;
  const MediaUnit& u = w.units[e.a];
  return u.retired || u.uid != e.n || w.sites[u.site].removed;
}

std::vector<ReplicaId> replicas_at_site(const World& w, SiteId s) {
  std::vector<ReplicaId> out;
  for (ItemId i = 0; i < w.items.size(); ++i) {
    for (ReplicaId r : w.items[i].replicas) {
      const Replica& rep = w.replicas[r];
      if (rep.site == s && rep.present && rep.state != ReplicaState::lost)
        out.push_back(r);
    }
  }
  return out;
}

void reschedule_operator_error(World& w, DomainId domain) {
  if (!w.sc->threats.on(ThreatClass::operator_error)) return;
  StressState& st = w.stress[domain];
  const std::uint64_t gen = ++st.reschedule_gen;
  const double rate = operator_error_rate(w, domain);
  const double dt = w.domain_op_rng[domain].exponential(rate);
  if (std::isfinite(dt))
    w.schedule(w.now() + dt, EventKind::operator_error, domain, kNone, kNone, 0.0, gen);
}

// Crash handling is shared between endogenous unit failure, disasters and
// scripted paths. Store-site units hold digest records instead of replicas.
void apply_unit_crash(World& w, UnitId unit_id, const char* cause) {
  MediaUnit& u = w.units[unit_id];
  Site& site = w.sites[u.site];
  if (site.is_digest_store) {
    std::size_t slot = 0;
    for (std::size_t k = 0; k < site.units.size(); ++k)
      if (site.units[k] == unit_id) slot = k;
    w.lose_store_records_on_slot(slot, cause);
  } else {
    for (ItemId i = 0; i < w.items.size(); ++i) {
      for (ReplicaId r : w.items[i].replicas) {
        const Replica& rep = w.replicas[r];
        if (rep.unit == unit_id && rep.present && rep.state != ReplicaState::lost)
          w.lose_replica(r, cause);
      }
    }
  }
  u.retired = true;
  w.log(w.now(), u.site, cause, "media unit " + std::to_string(u.uid) + " destroyed");
  raise_stress(w, site.admin_domain);
}

void corrupt_unit_contents(World& w, UnitId unit_id, Rng& rng, const char* cause) {
  MediaUnit& u = w.units[unit_id];
  Site& site = w.sites[u.site];
  if (site.is_digest_store) {
    std::size_t slot = 0;
    for (std::size_t k = 0; k < site.units.size(); ++k)
      if (site.units[k] == unit_id) slot = k;
    for (std::size_t i = slot; i < w.store_records.size(); i += site.units.size())
      if (w.store_records[i].state == StoreRecordState::ok)
        w.corrupt_store_record(i, rng.next_u64(), cause);
    return;
  }
  for (ItemId i = 0; i < w.items.size(); ++i) {
    for (ReplicaId r : w.items[i].replicas) {
      const Replica& rep = w.replicas[r];
      if (rep.unit == unit_id && rep.present && rep.state != ReplicaState::lost)
        w.corrupt_replica(r, rng.next_u64(), cause);
    }
  }
}

// Rewrites the same-system digest records of a tampered replica so they match
// the planted content. An attacker with write access to the replica has write
// access to digests stored beside it; this is exactly why the external store
// exists.
void attacker_rewrites_local_digests(World& w, ReplicaId r) {
  if (w.sc->audit.store != StoreKind::same_system) return;
  Replica& rep = w.replicas[r];
  for (DigestRecord& d : rep.digests)
    d.value = digest_of(rep.item, rep.content, d.algorithm);
}

void compromise_site(World& w, SiteId site_id, ClassId cls, std::uint64_t payload_base,
                     bool internal) {
  const auto& ext = w.sc->threats.external_attack;
  const auto& inl = w.sc->threats.internal_attack;
  const AlgorithmId forge_alg =
      internal ? inl.forged_algorithm_id : ext.forged_algorithm_id;
  const bool forge = forge_alg != kNone && forge_alg < w.sc->algorithms.size() &&
                     w.sc->algorithms[forge_alg].is_broken(w.now());
  const bool destroy = internal && inl.effect == InternalAttackEffect::destroy;
  const double per_replica_p = internal ? inl.compromise_probability : 1.0;
  Rng& rng = internal ? w.domain_attack_rng[w.sites[site_id].admin_domain]
                      : w.class_rng[cls];
  const char* cause = internal ? "internal_attack" : "external_attack";

  if (w.sites[site_id].is_digest_store) {
    // The attacker reaches the digest store itself: records become garbage.
    for (std::size_t i = 0; i < w.store_records.size(); ++i)
      if (w.store_records[i].state == StoreRecordState::ok && rng.bernoulli(per_replica_p))
        w.corrupt_store_record(i, rng.next_u64(), cause);
    return;
  }
  for (ReplicaId r : replicas_at_site(w, site_id)) {
    if (!rng.bernoulli(per_replica_p)) continue;
    Replica& rep = w.replicas[r];
    if (destroy) {
      w.lose_replica(r, cause);
      continue;
    }
    // One payload per (attack, item): every compromised site ends up with the
    // same planted bytes, so replicas damaged by one attack agree with each
    // other under every digest algorithm.
    const std::uint64_t payload = mix_u64(payload_base, rep.item);
    if (forge)
      w.forge_replica(r, payload, forge_alg, cause);
    else
      w.corrupt_replica(r, payload, cause);
    attacker_rewrites_local_digests(w, r);
  }
}

void apply_injection(World& w, const Injection& inj) {
  auto each_target = [&](auto&& fn) {
    for (ItemId i = 0; i < w.items.size(); ++i) {
      if (inj.item != kNone && inj.item != i) continue;
      for (ReplicaId r : w.items[i].replicas) {
        const Replica& rep = w.replicas[r];
        if (!rep.present || rep.state == ReplicaState::lost) continue;
        if (inj.site != kNone && rep.site != inj.site) continue;
        fn(r);
      }
    }
  };
  switch (inj.kind) {
    case InjectionKind::corrupt_replica:
      each_target([&](ReplicaId r) {
        w.corrupt_replica(r, mix_u64(0xfeed, r), "injected_corruption");
      });
      break;
    case InjectionKind::forge_replica:
      // Pure cryptographic forgery: the planted content collides with the
      // stored digest under the broken algorithm, but no stored records are
      // touched (unlike a privileged attacker inside the system).
      each_target([&](ReplicaId r) {
        w.forge_replica(r, mix_u64(0xf0f0, w.replicas[r].item), inj.algorithm_id,
                        "injected_forgery");
      });
      break;
    case InjectionKind::lose_replica:
      each_target([&](ReplicaId r) { w.lose_replica(r, "injected_loss"); });
      break;
    case InjectionKind::publisher_down:
      for (ItemId i = 0; i < w.items.size(); ++i)
        if (inj.item == kNone || inj.item == i)
          w.items[i].publisher_available = false;
      w.log(w.now(), kNone, "injected_publisher_down", "publisher marked unavailable");
      break;
    case InjectionKind::defund_budget:
      for (BudgetState& b : w.budgets) {
        if (b.label == inj.budget) {
          b.funds_per_year = 0.0;
          w.log(w.now(), b.scope_site, "injected_defund",
                "budget stream " + b.label + " set to zero");
          w.schedule(w.now(), EventKind::budget_review);
        }
      }
      break;
    case InjectionKind::kill_site:
      if (inj.site != kNone && inj.site < w.sites.size() && !w.sites[inj.site].removed) {
        for (ReplicaId r : replicas_at_site(w, inj.site))
          w.lose_replica(r, "injected_site_kill");
        for (UnitId u : w.sites[inj.site].units) w.units[u].retired = true;
        w.sites[inj.site].removed = true;
        w.log(w.now(), inj.site, "injected_site_kill", "site removed");
      }
      break;
  }
}

}  // namespace

double operator_error_rate(const World& w, DomainId domain) {
  const auto& oe = w.sc->threats.operator_error;
  const int incidents = w.stress[domain].active_incidents;
  return oe.base_rate_per_domain_year * std::pow(oe.stress_multiplier, incidents);
}

void raise_stress(World& w, DomainId domain) {
  const auto& oe = w.sc->threats.operator_error;
  if (!w.sc->threats.on(ThreatClass::operator_error)) return;
  if (oe.stress_multiplier == 1.0) return;  // stress would not change anything
  w.stress[domain].active_incidents += 1;
  w.schedule(w.now() + oe.stress_window_years, EventKind::stress_expiry, domain);
  reschedule_operator_error(w, domain);
}

bool comm_corrupts(World& w, SiteId dest_site) {
  const auto& ce = w.sc->threats.communication_errors;
  if (!w.sc->threats.on(ThreatClass::communication_errors)) return false;
  return w.site_streams[dest_site].comm.bernoulli(ce.undetected_corruption_probability);
}

void arm_unit_crash(World& w, UnitId unit_id) {
  MediaUnit& u = w.units[unit_id];
  const double hazard = w.effective_hazard(u);
  if (hazard <= 0.0) return;
  Rng crash = w.rng.stream("media_crash", u.uid);
  const double t = u.deployed_at + crash.exponential(hazard);
  w.schedule(t, EventKind::media_crash, unit_id, kNone, kNone, 0.0, u.uid);
}

void schedule_initial(World& w) {
  const ThreatSpec& t = w.sc->threats;

  for (UnitId u = 0; u < w.units.size(); ++u) arm_unit_crash(w, u);

  if (t.on(ThreatClass::hardware_failure)) {
    for (SiteId s = 0; s < w.sites.size(); ++s) {
      const double dt1 =
          w.site_streams[s].hw_transient.exponential(t.hardware_failure.transient_rate_per_site_year);
      if (std::isfinite(dt1)) w.schedule(dt1, EventKind::hardware_transient, s);
      const double dt2 =
          w.site_streams[s].hw_fatal.exponential(t.hardware_failure.fatal_rate_per_site_year);
      if (std::isfinite(dt2)) w.schedule(dt2, EventKind::hardware_fatal, s);
    }
  }
  if (t.on(ThreatClass::software_failure)) {
    for (SiteId s = 0; s < w.sites.size(); ++s) {
      const double dt = w.site_streams[s].software.exponential(t.software_failure.rate_per_site_year);
      if (std::isfinite(dt)) w.schedule(dt, EventKind::software_bug, s);
    }
  }
  if (t.on(ThreatClass::network_service_failure)) {
    const double dt = w.netsvc_rng.exponential(t.network_service_failure.rate_per_year);
    if (std::isfinite(dt)) w.schedule(dt, EventKind::network_service_failure, kNone);
  }
  if (t.on(ThreatClass::media_hw_obsolescence)) {
    if (auto at = t.media_hw_obsolescence.consumer_reader_unavailable_at)
      w.schedule(*at, EventKind::media_obsolete, static_cast<std::uint32_t>(Grade::consumer));
    if (auto at = t.media_hw_obsolescence.enterprise_reader_unavailable_at)
      w.schedule(*at, EventKind::media_obsolete, static_cast<std::uint32_t>(Grade::enterprise));
  }
  if (t.on(ThreatClass::software_obsolescence)) {
    for (FormatId f = 0; f < w.formats.size(); ++f)
      if (w.formats[f].obsolete_at >= 0.0)
        w.schedule(w.formats[f].obsolete_at, EventKind::format_obsolete, f);
  }
  if (t.on(ThreatClass::operator_error)) {
    for (DomainId d = 0; d < static_cast<DomainId>(w.stress.size()); ++d)
      w.domain_op_rng.push_back(w.rng.stream("operator_error", d));
    for (DomainId d = 0; d < static_cast<DomainId>(w.stress.size()); ++d)
      reschedule_operator_error(w, d);
  } else {
    for (DomainId d = 0; d < static_cast<DomainId>(w.stress.size()); ++d)
      w.domain_op_rng.push_back(Rng(0));
  }
  for (DomainId d = 0; d < static_cast<DomainId>(w.stress.size()); ++d)
    w.domain_attack_rng.push_back(w.rng.stream("internal_attack", d));

  if (t.on(ThreatClass::natural_disaster)) {
    for (ZoneId z = 0; z < static_cast<ZoneId>(w.zone_rng.size()); ++z) {
      const double dt = w.zone_rng[z].exponential(t.natural_disaster.rate_per_zone_year);
      if (std::isfinite(dt)) w.schedule(dt, EventKind::natural_disaster, z);
    }
  }
  if (t.on(ThreatClass::external_attack)) {
    for (ClassId c = 0; c < static_cast<ClassId>(w.class_rng.size()); ++c) {
      const double dt = w.class_rng[c].exponential(t.external_attack.rate_per_class_year);
      if (std::isfinite(dt)) w.schedule(dt, EventKind::external_attack, c);
    }
  }
  if (t.on(ThreatClass::internal_attack)) {
    for (DomainId d = 0; d < static_cast<DomainId>(w.stress.size()); ++d) {
      const double dt = w.domain_attack_rng[d].exponential(t.internal_attack.rate_per_domain_year);
      if (std::isfinite(dt)) w.schedule(dt, EventKind::internal_attack, d);
    }
  }
  if (t.on(ThreatClass::economic_failure)) {
    for (BudgetId b = 0; b < static_cast<BudgetId>(w.budgets.size()); ++b) {
      const double dt = w.budget_rng[b].exponential(t.economic_failure.shock_rate_per_year);
      if (std::isfinite(dt)) w.schedule(dt, EventKind::economic_shock, b);
    }
  }
  if (t.on(ThreatClass::organizational_failure)) {
    for (SiteId s = 0; s < w.sites.size(); ++s) {
      const double dt =
          w.site_streams[s].organizational.exponential(t.organizational_failure.rate_per_site_year);
      if (std::isfinite(dt)) w.schedule(dt, EventKind::organizational_failure, s);
    }
  }

  for (std::size_t i = 0; i < w.sc->injections.size(); ++i)
    w.schedule(w.sc->injections[i].time, EventKind::scripted_injection,
               static_cast<std::uint32_t>(i));
}

void handle(World& w, const Event& e) {
  const ThreatSpec& t = w.sc->threats;
  switch (e.kind) {
    case EventKind::media_crash: {
      if (unit_event_stale(w, e)) {
        w.log(e.time, e.a < w.units.size() ? w.units[e.a].site : kNone, "stale_event",
              "media_crash for a retired or replaced unit ignored");
        return;
      }
      apply_unit_crash(w, e.a, "media_crash");
      return;
    }
    case EventKind::media_bit_error: {
      // Spontaneous flavor (scripted/testing); read-coupled errors happen in
      // read_replica.
      if (e.a < w.replicas.size())
        w.corrupt_replica(e.a, mix_u64(0xb17e, e.n), "media_bit_error");
      return;
    }
    case EventKind::hardware_transient: {
      Site& s = w.sites[e.a];
      if (!s.removed) {
        const double outage =
            w.site_streams[e.a].hw_transient.exponential(1.0 / std::max(1e-9, t.hardware_failure.mean_outage_years));
        s.down_until = std::max(s.down_until, w.now() + outage);
        w.log(e.time, e.a, "hardware_transient",
              "site offline until t=" + std::to_string(s.down_until));
        raise_stress(w, s.admin_domain);
      }
      const double dt =
          w.site_streams[e.a].hw_transient.exponential(t.hardware_failure.transient_rate_per_site_year);
      if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::hardware_transient, e.a);
      return;
    }
    case EventKind::hardware_fatal: {
      Site& s = w.sites[e.a];
      if (!s.removed) {
        s.down_until = kForever;
        s.restore_pending = true;
        s.outage_gen++;
        w.log(e.time, e.a, "hardware_fatal", "site down pending hardware replacement");
        raise_stress(w, s.admin_domain);
        if (!s.maintenance_deferred) {
          const double restore =
              w.site_streams[e.a].hw_fatal.exponential(1.0 / std::max(1e-9, t.hardware_failure.mean_restore_years));
          w.schedule(w.now() + restore, EventKind::hardware_restore, e.a, kNone, kNone,
                     0.0, s.outage_gen);
        }
      }
      const double dt =
          w.site_streams[e.a].hw_fatal.exponential(t.hardware_failure.fatal_rate_per_site_year);
      if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::hardware_fatal, e.a);
      return;
    }
    case EventKind::hardware_restore: {
      Site& s = w.sites[e.a];
      if (!s.removed && s.restore_pending && s.outage_gen == e.n) {
        s.down_until = w.now();
        s.restore_pending = false;
        w.log(e.time, e.a, "hardware_restore", "site back online");
      }
      return;
    }
    case EventKind::software_bug: {
      Site& s = w.sites[e.a];
      Rng& rng = w.site_streams[e.a].software;
      if (!s.removed) {
        raise_stress(w, s.admin_domain);
        if (s.is_digest_store) {
          // A bug in the store corrupts one record.
          std::vector<std::size_t> live;
          for (std::size_t i = 0; i < w.store_records.size(); ++i)
            if (w.store_records[i].state == StoreRecordState::ok) live.push_back(i);
          if (!live.empty())
            w.corrupt_store_record(live[rng.below(live.size())], rng.next_u64(),
                                   "software_bug");
        } else {
          switch (t.software_failure.scope) {
            case SoftwareBugScope::replica: {
              auto victims = replicas_at_site(w, e.a);
              if (!victims.empty())
                w.corrupt_replica(victims[rng.below(victims.size())], rng.next_u64(),
                                  "software_bug");
              break;
            }
            case SoftwareBugScope::unit: {
              std::vector<UnitId> live;
              for (UnitId u : s.units)
                if (!w.units[u].retired) live.push_back(u);
              if (!live.empty())
                corrupt_unit_contents(w, live[rng.below(live.size())], rng, "software_bug");
              break;
            }
            case SoftwareBugScope::site:
              for (ReplicaId r : replicas_at_site(w, e.a))
                w.corrupt_replica(r, rng.next_u64(), "software_bug");
              break;
          }
        }
      }
      const double dt = rng.exponential(t.software_failure.rate_per_site_year);
      if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::software_bug, e.a);
      return;
    }
    case EventKind::network_service_failure: {
      int hit = 0;
      for (ItemId i = 0; i < w.items.size(); ++i) {
        if (w.items[i].publisher_available &&
            w.netsvc_rng.bernoulli(t.network_service_failure.affected_fraction)) {
          w.items[i].publisher_available = false;
          ++hit;
        }
      }
      w.log(e.time, kNone, "network_service_failure",
            std::to_string(hit) + " item references stopped resolving");
      const double dt = w.netsvc_rng.exponential(t.network_service_failure.rate_per_year);
      if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::network_service_failure, kNone);
      return;
    }
    case EventKind::media_obsolete: {
      const Grade grade = static_cast<Grade>(e.a);
      // Units deployed inside the last transition window already sit on the
      // succeeding media generation; everything older is now unreadable
      // (theoretically intact, practically gone without a reader).
      const double generation_cutoff =
          e.time - t.media_hw_obsolescence.transition_years;
      w.log(e.time, kNone, "media_obsolete",
            std::string("no readers remain for ") + to_string(grade) +
                " media deployed before t=" + std::to_string(generation_cutoff));
      for (UnitId u = 0; u < w.units.size(); ++u) {
        MediaUnit& unit = w.units[u];
        if (!unit.retired && unit.grade == grade &&
            unit.deployed_at < generation_cutoff && !w.sites[unit.site].removed)
          apply_unit_crash(w, u, "media_obsolete");
      }
      return;
    }
    case EventKind::format_obsolete: {
      w.log(e.time, kNone, "format_obsolete",
            "format " + w.formats[e.a].label + " is no longer interpretable");
      return;
    }
    case EventKind::operator_error: {
      if (e.a >= w.stress.size() || w.stress[e.a].reschedule_gen != e.n) return;
      Rng& rng = w.domain_op_rng[e.a];
      // Victim: one replica (or store record) within this admin domain only.
      if (w.store_site != kNone && w.sites[w.store_site].admin_domain == e.a) {
        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < w.store_records.size(); ++i)
          if (w.store_records[i].state == StoreRecordState::ok) live.push_back(i);
        if (!live.empty()) {
          const std::size_t victim = live[rng.below(live.size())];
          if (rng.bernoulli(t.operator_error.recoverable_fraction))
            w.corrupt_store_record(victim, rng.next_u64(), "operator_error");
          else
            w.store_records[victim].state = StoreRecordState::lost;
        }
      } else {
        std::vector<ReplicaId> victims;
        for (SiteId s = 0; s < w.sites.size(); ++s)
          if (!w.sites[s].removed && w.sites[s].admin_domain == e.a &&
              !w.sites[s].is_digest_store)
            for (ReplicaId r : replicas_at_site(w, s)) victims.push_back(r);
        if (!victims.empty()) {
          const ReplicaId victim = victims[rng.below(victims.size())];
          if (rng.bernoulli(t.operator_error.recoverable_fraction))
            w.corrupt_replica(victim, rng.next_u64(), "operator_error");
          else
            w.lose_replica(victim, "operator_error");
        }
      }
      reschedule_operator_error(w, e.a);
      return;
    }
    case EventKind::stress_expiry: {
      StressState& st = w.stress[e.a];
      if (st.active_incidents > 0) --st.active_incidents;
      reschedule_operator_error(w, e.a);
      return;
    }
    case EventKind::natural_disaster: {
      Rng& rng = w.zone_rng[e.a];
      w.log(e.time, kNone, "natural_disaster", "zone " + std::to_string(e.a) + " struck");
      for (SiteId s = 0; s < w.sites.size(); ++s) {
        Site& site = w.sites[s];
        if (site.removed || site.zone != e.a) continue;
        raise_stress(w, site.admin_domain);
        for (UnitId u : site.units) {
          if (w.units[u].retired) continue;
          // Every unit in the struck zone is hit at this same timestamp:
          // crash (bulk loss) or damage (contents corrupted).
          if (rng.bernoulli(t.natural_disaster.unit_crash_probability))
            w.schedule(w.now(), EventKind::media_crash, u, kNone, kNone, 0.0,
                       w.units[u].uid);
          else
            corrupt_unit_contents(w, u, rng, "natural_disaster");
        }
      }
      const double dt = rng.exponential(t.natural_disaster.rate_per_zone_year);
      if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::natural_disaster, e.a);
      return;
    }
    case EventKind::external_attack: {
      Rng& rng = w.class_rng[e.a];
      const std::uint64_t payload_base = rng.next_u64();
      w.log(e.time, kNone, "external_attack",
            "worm exploiting vulnerability class " + std::to_string(e.a));
      std::vector<SiteId> hit;
      for (SiteId s = 0; s < w.sites.size(); ++s)
        if (!w.sites[s].removed && w.sites[s].in_class(e.a) &&
            rng.bernoulli(t.external_attack.compromise_probability))
          hit.push_back(s);
      if (t.external_attack.sites_per_year <= 0.0) {
        for (SiteId s : hit) compromise_site(w, s, e.a, payload_base, false);
      } else {
        // Finite attack speed: compromises land one after another, giving
        // rate-limited defenses a window to react.
        for (std::size_t k = 0; k < hit.size(); ++k)
          w.schedule(w.now() + static_cast<double>(k) / t.external_attack.sites_per_year,
                     EventKind::attack_step, hit[k], e.a, kNone, 0.0, payload_base);
      }
      const double dt = rng.exponential(t.external_attack.rate_per_class_year);
      if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::external_attack, e.a);
      return;
    }
    case EventKind::attack_step: {
      if (w.sites[e.a].removed) {
        w.log(e.time, e.a, "stale_event", "attack step against a removed site ignored");
        return;
      }
      compromise_site(w, e.a, e.b, e.n, false);
      return;
    }
    case EventKind::internal_attack: {
      Rng& rng = w.domain_attack_rng[e.a];
      const std::uint64_t payload_base = rng.next_u64();
      w.log(e.time, kNone, "internal_attack",
            "insider abuse within admin domain " + std::to_string(e.a));
      for (SiteId s = 0; s < w.sites.size(); ++s)
        if (!w.sites[s].removed && w.sites[s].admin_domain == e.a)
          compromise_site(w, s, kNone, payload_base, true);
      const double dt = rng.exponential(t.internal_attack.rate_per_domain_year);
      if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::internal_attack, e.a);
      return;
    }
    case EventKind::economic_shock: {
      BudgetState& b = w.budgets[e.a];
      b.funds_per_year *= t.economic_failure.shock_multiplier;
      w.log(e.time, b.scope_site, "economic_shock",
            "budget stream " + b.label + " cut to " + std::to_string(b.funds_per_year) +
                "/yr");
      w.schedule(w.now(), EventKind::budget_review);
      const double dt = w.budget_rng[e.a].exponential(t.economic_failure.shock_rate_per_year);
      if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::economic_shock, e.a);
      return;
    }
    case EventKind::organizational_failure: {
      Site& s = w.sites[e.a];
      if (s.removed) return;
      Rng& rng = w.site_streams[e.a].organizational;
      const bool handoff = rng.bernoulli(t.organizational_failure.handoff_success_probability);
      w.log(e.time, e.a, "organizational_failure",
            handoff ? "organization dissolved; collection hand-off arranged"
                    : "organization dissolved; no successor found");
      strategy::hand_off_site(w, e.a, handoff);
      return;
    }
    case EventKind::scripted_injection: {
      apply_injection(w, w.sc->injections[e.a]);
      return;
    }
    default:
      throw SimError(std::string("threat handler got unexpected event ") +
                     to_string(e.kind));
  }
}

}  // namespace presim::threats
