#pragma once

#include "presim/world.hpp"

namespace presim::threats {

// Seeds the recurring threat processes: first arrivals for every enabled
// hazard, per-unit crash draws, obsolescence deadlines, scripted injections.
void schedule_initial(World& w);

// Draws the catastrophic-failure time for a newly deployed unit.
void arm_unit_crash(World& w, UnitId u);

// Dispatch target for all threat-class events.
void handle(World& w, const Event& e);

// Raises operator stress in a domain (an incident needing response) and
// reschedules that domain's operator-error process at the boosted rate.
void raise_stress(World& w, DomainId domain);

// Effective operator-error rate for a domain right now.
double operator_error_rate(const World& w, DomainId domain);

// Applies per-transfer communication corruption to a payload in flight.
// Returns true if the payload was silently corrupted.
bool comm_corrupts(World& w, SiteId dest_site);

}  // namespace presim::threats
