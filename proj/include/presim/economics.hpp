#pragma once

#include "presim/world.hpp"

namespace presim::economics {

void schedule_initial(World& w);

void handle(World& w, const Event& e);

// Accrues time-proportional costs (hardware per GB-year, ops per
// replica-year, auth system) for every site up to `now`. Called from review
// ticks, replica count changes, and the final snapshot so ledger totals are
// exact at read time.
void accrue_continuous(World& w, double now);

// Budget review: compares each stream's spend over the last window against
// its funds and runs the triage ladder (defer audits, defer maintenance,
// decommission newest replicas) for sites on overspent streams.
void enforce_budget(World& w);

}  // namespace presim::economics
