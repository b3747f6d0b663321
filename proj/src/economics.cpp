#include "presim/economics.hpp"

#include <algorithm>

namespace presim::economics {

void schedule_initial(World& w) {
  for (double t = w.sc->budget_review_interval_years; t <= w.horizon();
       t += w.sc->budget_review_interval_years)
    w.schedule(t, EventKind::budget_review);
}

void accrue_continuous(World& w, double now) {
  for (SiteId s = 0; s < w.sites.size(); ++s) w.accrue_site(s, now);
  const double dt = now - w.auth_accrued_to;
  if (dt > 0.0) {
    w.auth_accrued_to = now;
    w.charge(now, kNone, CostCategory::dissemination_auth,
             w.sc->costs.auth_system_per_year * dt);
  }
}

namespace {

// Projected yearly run-rate of keeping a site's current holdings: the costs
// that continue to accrue whether or not anything else happens.
double storage_run_rate(const World& w, SiteId s) {
  const Site& site = w.sites[s];
  std::uint64_t stored = 0;
  for (UnitId u : site.units)
    if (!w.units[u].retired) stored += w.units[u].used_bytes;
  return static_cast<double>(stored) / 1e9 * w.sc->costs.hardware_per_gb_year(site.grade) +
         static_cast<double>(site.stored_replicas) * w.sc->costs.ops_per_replica_year;
}

void triage_site(World& w, SiteId s, double funds) {
  Site& site = w.sites[s];
  bool decommission_stage = false;
  for (const TriageStage stage : w.sc->triage) {
    switch (stage) {
      case TriageStage::defer_audits:
        if (!site.audits_deferred) {
          site.audits_deferred = true;
          w.log(w.now(), s, "economic_triage", "audits deferred");
        }
        break;
      case TriageStage::defer_maintenance:
        if (!site.maintenance_deferred) {
          site.maintenance_deferred = true;
          w.log(w.now(), s, "economic_triage", "maintenance deferred");
        }
        break;
      case TriageStage::decommission:
        decommission_stage = true;
        break;
    }
  }
  // Shedding holdings, newest replicas first, until the storage run-rate
  // fits the remaining funds: "preserve less content". Scenarios that
  // configure triage without this stage take greater risks instead.
  if (!decommission_stage) return;
  if (storage_run_rate(w, s) <= funds) return;
  std::vector<ReplicaId> mine;
  for (ItemId i = 0; i < w.items.size(); ++i)
    for (ReplicaId r : w.items[i].replicas) {
      const Replica& rep = w.replicas[r];
      if (rep.site == s && rep.present && rep.state != ReplicaState::lost)
        mine.push_back(r);
    }
  std::sort(mine.begin(), mine.end(), [&](ReplicaId a, ReplicaId b) {
    if (w.replicas[a].created_at != w.replicas[b].created_at)
      return w.replicas[a].created_at > w.replicas[b].created_at;
    return a > b;
  });
  std::size_t shed = 0;
  for (ReplicaId r : mine) {
    if (storage_run_rate(w, s) <= funds) break;
    w.decommission_replica(r, "economic_triage");
    ++shed;
  }
  if (shed > 0)
    w.log(w.now(), s, "economic_triage",
          std::to_string(shed) + " replicas decommissioned to meet budget");
}

void untriage_site(World& w, SiteId s) {
  Site& site = w.sites[s];
  if (site.audits_deferred || site.maintenance_deferred) {
    site.audits_deferred = false;
    site.maintenance_deferred = false;
    w.log(w.now(), s, "economic_triage", "funding restored; normal operation resumed");
  }
}

}  // namespace

void enforce_budget(World& w) {
  accrue_continuous(w, w.now());
  for (BudgetId b = 0; b < static_cast<BudgetId>(w.budgets.size()); ++b) {
    BudgetState& budget = w.budgets[b];
    const double window = w.sc->budget_review_interval_years;
    const double spend_rate = budget.window_spend / window;
    budget.window_spend = 0.0;

    std::vector<SiteId> members;
    for (SiteId s = 0; s < w.sites.size(); ++s)
      if (!w.sites[s].removed && w.sites[s].budget == b) members.push_back(s);
    if (members.empty()) continue;

    if (spend_rate <= budget.funds_per_year) {
      for (SiteId s : members) untriage_site(w, s);
      continue;
    }
    w.log(w.now(), budget.scope_site, "budget_overrun",
          "stream " + budget.label + " spending " + std::to_string(spend_rate) +
              "/yr against funds " + std::to_string(budget.funds_per_year) + "/yr");
    const double per_site_funds = budget.funds_per_year / static_cast<double>(members.size());
    for (SiteId s : members) triage_site(w, s, per_site_funds);
  }
}

void handle(World& w, const Event& e) {
  switch (e.kind) {
    case EventKind::budget_review:
      enforce_budget(w);
      return;
    default:
      throw SimError(std::string("economics handler got unexpected event ") +
                     to_string(e.kind));
  }
}

}  // namespace presim::economics
