#pragma once

#include "presim/world.hpp"

namespace presim::strategy {

// Schedules ingest of the whole collection plus the recurring maintenance
// ticks and batch-migration triggers.
void schedule_initial(World& w);

void handle(World& w, const Event& e);

// Rate limiter: returns true and consumes budget if the activity fits in the
// site's current yearly window; otherwise returns false and sets *retry_at to
// the start of the next window.
bool rate_allow(World& w, SiteId site, Activity activity, double* retry_at);

// Schedules a content repair for a damaged (but present) replica from the
// preferred source: publisher first, else a vetted peer replica. Returns
// false if no source is available or the repair rate limit defers past the
// horizon.
bool schedule_repair(World& w, ReplicaId target, const char* why);

// Dispatches a repair transfer whose payload the caller already captured
// (mutual audit picks its own source from the winning side of a poll).
void start_repair_transfer(World& w, ItemId item, ReplicaId target,
                           const ContentToken& payload);

// Applies a completed transfer to the world.
void finish_transfer(World& w, std::uint32_t transfer_index);

// Capacity-based placement: picks the unit with most free space at a site.
UnitId pick_unit(World& w, SiteId site, std::uint64_t bytes);

// Replaces a media unit with a fresh one, copying contents with read and
// transfer exposure. Used by service-life replacement, refresh and rolling
// replacement.
void replace_unit(World& w, UnitId unit, const char* why);

// Organizational wind-down: moves the site's replicas to a successor site
// (when handoff succeeded and capacity allows) or loses them, then removes
// the site.
void hand_off_site(World& w, SiteId site, bool handoff_succeeded);

}  // namespace presim::strategy
