#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace presim {

// Raised on internal contract violations (past-time scheduling, broken
// invariants). Aborts the run; distinct from scenario validation errors.
struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EventKind : std::uint8_t {
  ingest_item,
  reconcile_ingest,
  media_crash,
  media_bit_error,  // injected/spontaneous flavor; read-coupled errors occur inline
  hardware_transient,
  hardware_restore,
  hardware_fatal,
  software_bug,
  network_service_failure,
  media_obsolete,
  format_obsolete,
  operator_error,
  stress_expiry,
  natural_disaster,
  external_attack,
  attack_step,
  internal_attack,
  economic_shock,
  organizational_failure,
  audit_third_party,
  audit_mutual,
  digest_rollover,
  migration_batch,
  transfer_complete,
  access,
  maintenance_tick,
  budget_review,
  snapshot,
  scripted_injection,
  kCount
};

const char* to_string(EventKind k);
inline constexpr std::size_t kEventKindCount = static_cast<std::size_t>(EventKind::kCount);

// Flat payload; field meaning depends on kind (a/b/c are entity ids such as
// item/site/unit, x a scalar parameter, n a nonce or generation guard).
struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kCount;
  std::uint32_t a = 0xffffffffu;
  std::uint32_t b = 0xffffffffu;
  std::uint32_t c = 0xffffffffu;
  double x = 0.0;
  std::uint64_t n = 0;
};

// Min-heap on (time, sequence). The sequence counter makes simultaneous
// events dequeue in schedule order, which pins the whole run order.
class EventQueue {
 public:
  void schedule(Event e) {
    if (e.time < now_)
      throw SimError("event scheduled in the past");
    e.seq = next_seq_++;
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(), later);
  }

  bool empty() const { return heap_.empty(); }
  double peek_time() const { return heap_.empty() ? 1e300 : heap_.front().time; }
  std::size_t size() const { return heap_.size(); }
  double now() const { return now_; }

  Event pop() {
    if (heap_.empty()) throw SimError("pop from empty event queue");
    std::pop_heap(heap_.begin(), heap_.end(), later);
    Event e = heap_.back();
    heap_.pop_back();
    now_ = e.time;
    return e;
  }

 private:
  static bool later(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }

  std::vector<Event> heap_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
};

}  // namespace presim
