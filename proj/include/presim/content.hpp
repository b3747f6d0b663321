#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "presim/rng.hpp"

namespace presim {

using ItemId = std::uint32_t;
using FormatId = std::uint32_t;
using SiteId = std::uint32_t;
using UnitId = std::uint32_t;
using ReplicaId = std::uint32_t;
using AlgorithmId = std::uint32_t;
using ZoneId = std::uint32_t;
using DomainId = std::uint32_t;
using ClassId = std::uint32_t;
using BudgetId = std::uint32_t;
using PublisherId = std::uint32_t;

inline constexpr std::uint32_t kNone = 0xffffffffu;

enum class ReplicaState : std::uint8_t { intact, silently_corrupt, lost, forged };
enum class Origin : std::uint8_t { push, pull };
enum class Grade : std::uint8_t { consumer, enterprise };
enum class StoreKind : std::uint8_t { same_system, external_store };

const char* to_string(ReplicaState s);
const char* to_string(Grade g);

// Content is never stored as bytes. A token is a version counter (bumped only
// by format migration) plus a corruption nonce; nonce 0 means the content
// matches the item's true state for that version. A forged token additionally
// names the algorithm whose digest it was crafted to collide with.
struct ContentToken {
  std::uint32_t version = 0;
  std::uint64_t nonce = 0;
  AlgorithmId forged_against = kNone;

  bool pristine() const { return nonce == 0 && forged_against == kNone; }
  bool operator==(const ContentToken&) const = default;
};

struct DigestRecord {
  AlgorithmId algorithm = kNone;
  std::uint64_t value = 0;
  double computed_at = 0.0;
  StoreKind stored_in = StoreKind::same_system;
  bool assured = true;  // false when appended after the algorithm's public break
};

struct Format {
  std::string label;
  double obsolete_at = -1.0;  // < 0: never
  FormatId migration_target = kNone;
  bool emulated = false;

  bool obsolete(double now) const { return obsolete_at >= 0.0 && now >= obsolete_at; }
};

struct ContentItem {
  std::uint64_t size_bytes = 0;
  FormatId format = kNone;
  Origin origin = Origin::push;
  PublisherId publisher = kNone;
  bool publisher_available = true;
  std::uint32_t version = 0;  // current true version; migration bumps it
  std::vector<ReplicaId> replicas;
  bool impaired_flagged = false;  // set by ingest reconciliation dead ends
};

struct MediaUnit {
  SiteId site = kNone;
  std::uint64_t uid = 0;  // stable stream key: survives nothing, unique per unit
  std::uint64_t capacity_bytes = 0;
  std::uint64_t used_bytes = 0;
  double uber_per_bit = 0.0;
  double annual_hazard = 0.0;
  double service_life_years = 0.0;
  double deployed_at = 0.0;
  Grade grade = Grade::consumer;
  bool retired = false;
  Rng read_rng{0};  // per-unit stream for read-coupled bit errors
};

struct Site {
  ZoneId zone = 0;
  DomainId admin_domain = 0;
  std::vector<ClassId> vulnerability_classes;
  Grade grade = Grade::consumer;
  BudgetId budget = 0;
  std::vector<UnitId> units;
  bool removed = false;
  double down_until = 0.0;  // hardware outage; 0 when up
  std::uint64_t outage_gen = 0;
  bool restore_pending = false;
  bool audits_deferred = false;       // economic triage
  bool maintenance_deferred = false;  // economic triage
  bool is_digest_store = false;
  std::uint32_t stored_replicas = 0;  // present, non-lost (drives ops cost)

  bool up(double now) const { return !removed && now >= down_until; }
  bool in_class(ClassId c) const {
    for (ClassId x : vulnerability_classes)
      if (x == c) return true;
    return false;
  }
};

struct Replica {
  ItemId item = kNone;
  SiteId site = kNone;
  UnitId unit = kNone;
  FormatId format = kNone;
  ReplicaState state = ReplicaState::intact;
  ContentToken content;
  std::vector<DigestRecord> digests;
  double created_at = 0.0;
  double last_audited = -1.0;
  bool last_audit_pass = false;
  bool flagged_bad = false;  // audit mismatch awaiting repair (observable)
  bool partial = false;      // incomplete crawl: most content present, gaps unresolved
  bool present = true;       // false once decommissioned or moved away
  bool repair_in_flight = false;

  // Ground truth, invisible to strategy logic: when the current damage began
  // and whether an audit has noticed it yet.
  double corrupted_since = -1.0;
  bool damage_detected = false;
};

// Simulated digest. Pure in (item, token, algorithm) plus the forgery rule: a
// token forged against `algorithm` yields the digest of the pristine content,
// which is how a broken algorithm lets tampering pass.
inline std::uint64_t digest_of(ItemId item, const ContentToken& token,
                               AlgorithmId algorithm) {
  const std::uint64_t nonce = (token.forged_against == algorithm) ? 0 : token.nonce;
  std::uint64_t h = 0x9ae16a3b2f90404fULL;
  h = mix_u64(h, item);
  h = mix_u64(h, token.version);
  h = mix_u64(h, nonce);
  h = mix_u64(h, algorithm + 1);
  return h;
}

}  // namespace presim
