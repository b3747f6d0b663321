#pragma once

#include "presim/world.hpp"

namespace presim::audit {

// Schedules the independent third-party and mutual audit cycles (uniform
// random phase per item) and any planned algorithm rollovers.
void schedule_initial(World& w);

void handle(World& w, const Event& e);

// Computes and installs digest records for a replica under every algorithm
// the scenario audits with. `publisher_digests` selects the source of truth:
// true means the records describe the pristine submitted content (end-to-end
// SIP digests), false means they are computed from the replica's current
// payload, corruption and all.
void install_digests(World& w, ReplicaId r, bool publisher_digests);

// One third-party audit of a single replica. Exposed for tests.
AuditVerdict third_party_audit_replica(World& w, ReplicaId r);

// One mutual audit round for an item. Exposed for tests.
AuditVerdict mutual_audit_round(World& w, ItemId item);

}  // namespace presim::audit
