#include "presim/events.hpp"

namespace presim {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::ingest_item: return "ingest_item";
    case EventKind::reconcile_ingest: return "reconcile_ingest";
    case EventKind::media_crash: return "media_crash";
    case EventKind::media_bit_error: return "media_bit_error";
    case EventKind::hardware_transient: return "hardware_transient";
    case EventKind::hardware_restore: return "hardware_restore";
    case EventKind::hardware_fatal: return "hardware_fatal";
    case EventKind::software_bug: return "software_bug";
    case EventKind::network_service_failure: return "network_service_failure";
    case EventKind::media_obsolete: return "media_obsolete";
    case EventKind::format_obsolete: return "format_obsolete";
    case EventKind::operator_error: return "operator_error";
    case EventKind::stress_expiry: return "stress_expiry";
    case EventKind::natural_disaster: return "natural_disaster";
    case EventKind::external_attack: return "external_attack";
    case EventKind::attack_step: return "attack_step";
    case EventKind::internal_attack: return "internal_attack";
    case EventKind::economic_shock: return "economic_shock";
    case EventKind::organizational_failure: return "organizational_failure";
    case EventKind::audit_third_party: return "audit_third_party";
    case EventKind::audit_mutual: return "audit_mutual";
    case EventKind::digest_rollover: return "digest_rollover";
    case EventKind::migration_batch: return "migration_batch";
    case EventKind::transfer_complete: return "transfer_complete";
    case EventKind::access: return "access";
    case EventKind::maintenance_tick: return "maintenance_tick";
    case EventKind::budget_review: return "budget_review";
    case EventKind::snapshot: return "snapshot";
    case EventKind::scripted_injection: return "scripted_injection";
    case EventKind::kCount: break;
  }
  return "?";
}

}  // namespace presim
