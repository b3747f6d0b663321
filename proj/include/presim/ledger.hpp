#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "presim/content.hpp"

namespace presim {

enum class CostCategory : std::uint8_t {
  ingest_permission,
  ingest_transfer,
  ingest_metadata,
  storage_hardware,
  ops,
  audit,
  migration,
  dissemination_auth,
  dissemination_serving,
  kCount
};
inline constexpr std::size_t kCostCategoryCount =
    static_cast<std::size_t>(CostCategory::kCount);
const char* to_string(CostCategory c);

struct LedgerEntry {
  double time = 0.0;
  SiteId site = kNone;  // kNone: system-wide cost
  CostCategory category = CostCategory::kCount;
  double amount = 0.0;
};

// Category totals are accumulated in entry order; the grand total is defined
// as the sum of category totals, so conservation holds by construction and
// the entry log (kept only when requested) can re-derive each total exactly.
class Ledger {
 public:
  void add(double time, SiteId site, CostCategory cat, double amount) {
    totals_[static_cast<std::size_t>(cat)] += amount;
    if (record_entries) entries_.push_back({time, site, cat, amount});
  }
  double total(CostCategory cat) const { return totals_[static_cast<std::size_t>(cat)]; }
  double grand_total() const {
    double sum = 0.0;
    for (double t : totals_) sum += t;
    return sum;
  }
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  const std::array<double, kCostCategoryCount>& totals() const { return totals_; }

  bool record_entries = false;

 private:
  std::array<double, kCostCategoryCount> totals_{};
  std::vector<LedgerEntry> entries_;
};

}  // namespace presim
