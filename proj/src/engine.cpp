#include "presim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "presim/audit.hpp"
#include "presim/economics.hpp"
#include "presim/strategy.hpp"
#include "presim/threats.hpp"

namespace presim {

namespace {

void handle_access(World& w, const Event& e) {
  const ItemId item = e.a;
  ++w.accesses;
  const ContentItem& it = w.items[item];

  ReplicaId served = kNone;
  for (ReplicaId r : it.replicas) {
    if (w.replicas[r].state == ReplicaState::intact && w.replica_servable(r)) {
      served = r;
      break;
    }
  }
  if (served != kNone) {
    w.read_replica(served, false);
    const Format& fmt = w.formats[w.replicas[served].format];
    if (fmt.obsolete(w.now()) && !fmt.emulated &&
        w.sc->strategy.migration == MigrationMode::on_access &&
        fmt.migration_target != kNone)
      w.charge(w.now(), w.replicas[served].site, CostCategory::migration,
               w.sc->costs.migration_on_access_per_item);
    w.charge(w.now(), w.replicas[served].site, CostCategory::dissemination_serving,
             w.sc->costs.serving_per_access);
  } else if (w.irrecoverably_lost(item) ||
             (w.intact_count(item) > 0 && !w.item_readable(item))) {
    ++w.failed_accesses;
  } else {
    // Impaired: some recovery action must finish before this access can be
    // satisfied. The delay estimate is the earliest such completion.
    ++w.impaired_accesses;
    double delay = std::numeric_limits<double>::infinity();
    for (const Transfer& tr : w.transfers)
      if (tr.active && tr.item == item)
        delay = std::min(delay, tr.completes_at - w.now());
    if (it.publisher_available)
      delay = std::min(delay, w.sc->audit.transfer_delay_years);
    for (ReplicaId r : it.replicas) {
      const Replica& rep = w.replicas[r];
      if (rep.present && rep.state == ReplicaState::intact) {
        const Site& s = w.sites[rep.site];
        if (!s.removed && s.down_until > w.now() && s.down_until < 1e17)
          delay = std::min(delay, (s.down_until - w.now()) +
                                      w.sc->audit.transfer_delay_years);
      }
    }
    std::size_t bucket = w.sc->delay_buckets_years.size();  // overflow by default
    for (std::size_t b = 0; b < w.sc->delay_buckets_years.size(); ++b) {
      if (delay <= w.sc->delay_buckets_years[b]) {
        bucket = b;
        break;
      }
    }
    w.delay_hist[bucket] += 1;
  }

  const double dt = w.item_streams[item].access.exponential(w.sc->access_rate_per_item_year);
  if (std::isfinite(dt)) w.schedule(w.now() + dt, EventKind::access, item);
}

void dispatch(World& w, const Event& e) {
  switch (e.kind) {
    case EventKind::ingest_item:
    case EventKind::reconcile_ingest:
    case EventKind::migration_batch:
    case EventKind::maintenance_tick:
    case EventKind::transfer_complete:
      strategy::handle(w, e);
      return;
    case EventKind::audit_third_party:
    case EventKind::audit_mutual:
    case EventKind::digest_rollover:
      audit::handle(w, e);
      return;
    case EventKind::budget_review:
      economics::handle(w, e);
      return;
    case EventKind::access:
      handle_access(w, e);
      return;
    case EventKind::snapshot:
      w.snapshots.push_back(metrics::take_snapshot(w, e.time));
      return;
    default:
      threats::handle(w, e);
      return;
  }
}

RunResult execute(const Scenario& sc, std::uint64_t seed,
                  const std::function<void(World&)>& prepare,
                  const std::function<void(World&)>& inspect) {
  World w = build_world(sc, seed);

  if (sc.access_rate_per_item_year > 0.0) {
    for (ItemId i = 0; i < w.items.size(); ++i) {
      const double dt = w.item_streams[i].access.exponential(sc.access_rate_per_item_year);
      if (std::isfinite(dt)) w.schedule(dt, EventKind::access, i);
    }
  }
  if (prepare) prepare(w);

  while (!w.queue.empty()) {
    const Event e = w.queue.pop();
    w.event_counts[static_cast<std::size_t>(e.kind)] += 1;
    dispatch(w, e);
  }
  w.snapshots.push_back(metrics::take_snapshot(w, sc.horizon_years));
  if (inspect) inspect(w);

  RunResult r;
  r.scenario_name = sc.name;
  r.scenario_hash = sc.source_hash_hex;
  r.seed = seed;
  r.horizon_years = sc.horizon_years;
  r.delay_buckets = sc.delay_buckets_years;
  r.final = w.snapshots.back();
  r.snapshots = std::move(w.snapshots);
  r.event_counts = w.event_counts;
  r.incidents = std::move(w.incidents);
  r.cost_totals = w.ledger.totals();
  r.cost_grand_total = w.ledger.grand_total();
  return r;
}

}  // namespace

RunResult run(const Scenario& sc, std::uint64_t seed) {
  return execute(sc, seed, nullptr, nullptr);
}

RunResult run_with(const Scenario& sc, std::uint64_t seed,
                   const std::function<void(World&)>& prepare,
                   const std::function<void(World&)>& inspect) {
  return execute(sc, seed, prepare, inspect);
}

void pump_events(World& w, double until) {
  while (!w.queue.empty() && w.queue.peek_time() <= until) {
    const Event e = w.queue.pop();
    w.event_counts[static_cast<std::size_t>(e.kind)] += 1;
    dispatch(w, e);
  }
}

}  // namespace presim
