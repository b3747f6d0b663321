#include "presim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "presim/rng.hpp"

namespace presim {

const char* to_string(ThreatClass t) {
  switch (t) {
    case ThreatClass::media_failure: return "media_failure";
    case ThreatClass::hardware_failure: return "hardware_failure";
    case ThreatClass::software_failure: return "software_failure";
    case ThreatClass::communication_errors: return "communication_errors";
    case ThreatClass::network_service_failure: return "network_service_failure";
    case ThreatClass::media_hw_obsolescence: return "media_hw_obsolescence";
    case ThreatClass::software_obsolescence: return "software_obsolescence";
    case ThreatClass::operator_error: return "operator_error";
    case ThreatClass::natural_disaster: return "natural_disaster";
    case ThreatClass::external_attack: return "external_attack";
    case ThreatClass::internal_attack: return "internal_attack";
    case ThreatClass::economic_failure: return "economic_failure";
    case ThreatClass::organizational_failure: return "organizational_failure";
    case ThreatClass::kCount: break;
  }
  return "?";
}

AlgorithmId Scenario::algorithm_by_label(const std::string& label) const {
  for (std::size_t i = 0; i < algorithms.size(); ++i)
    if (algorithms[i].label == label) return static_cast<AlgorithmId>(i);
  return kNone;
}

FormatId Scenario::format_by_label(const std::string& label) const {
  for (std::size_t i = 0; i < formats.size(); ++i)
    if (formats[i].label == label) return static_cast<FormatId>(i);
  return kNone;
}

namespace {

// Typed accessor over a config block. Tracks which child nodes were consumed
// so that leftover keys can be reported as unknown, and funnels every range
// violation into the shared diagnostics list with its source line.
class Reader {
 public:
  Reader(const cfg::Node* node, const std::string& file, cfg::Diagnostics& diags,
         std::set<const cfg::Node*>& used)
      : node_(node), file_(file), diags_(diags), used_(used) {
    if (node_) used_.insert(node_);
  }

  bool present() const { return node_ != nullptr; }
  int line() const { return node_ ? node_->line : 0; }

  Reader block(const std::string& key) const {
    return Reader(find(key), file_, diags_, used_);
  }

  Reader require_block(const std::string& key, int fallback_line) const {
    const cfg::Node* n = find(key);
    if (!n) error(fallback_line, "missing required block '" + key + "'");
    return Reader(n, file_, diags_, used_);
  }

  std::vector<Reader> named_blocks(const std::string& key) const {
    std::vector<Reader> out;
    if (!node_) return out;
    for (const cfg::Node& c : node_->children)
      if (c.key == key && c.is_block) out.push_back(Reader(&c, file_, diags_, used_));
    return out;
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  std::optional<std::string> str(const std::string& key) const {
    const cfg::Node* n = find(key);
    if (!n) return std::nullopt;
    if (n->is_block) {
      error(n->line, "'" + key + "' must be a value, not a block");
      return std::nullopt;
    }
    return n->value;
  }

  std::string str_or(const std::string& key, const std::string& dflt) const {
    auto v = str(key);
    return v ? *v : dflt;
  }

  std::optional<double> number(const std::string& key) const {
    const cfg::Node* n = find(key);
    if (!n) return std::nullopt;
    if (n->is_block) {
      error(n->line, "'" + key + "' must be a number, not a block");
      return std::nullopt;
    }
    auto v = cfg::as_number(n->value);
    if (!v) error(n->line, "'" + key + "': expected a number, got '" + n->value + "'");
    return v;
  }

  double number_or(const std::string& key, double dflt) const {
    auto v = number(key);
    return v ? *v : dflt;
  }

  double required_number(const std::string& key, int fallback_line) const {
    if (!has(key)) {
      error(node_ ? node_->line : fallback_line,
            "missing required key '" + key + "'");
      return 0.0;
    }
    return number_or(key, 0.0);
  }

  // Number that may also be the keyword `none`.
  std::optional<double> number_or_none(const std::string& key) const {
    const cfg::Node* n = find(key);
    if (!n) return std::nullopt;
    if (!n->is_block && n->value == "none") return std::nullopt;
    return number(key);
  }

  std::optional<bool> flag(const std::string& key) const {
    const cfg::Node* n = find(key);
    if (!n) return std::nullopt;
    auto v = cfg::as_bool(n->value);
    if (!v) error(n->line, "'" + key + "': expected true/false, got '" + n->value + "'");
    return v;
  }

  bool flag_or(const std::string& key, bool dflt) const {
    auto v = flag(key);
    return v ? *v : dflt;
  }

  // Checked numeric ranges. `lo`/`hi` are inclusive.
  double ranged(const std::string& key, double dflt, double lo, double hi) const {
    const cfg::Node* n = find(key);
    if (!n) return dflt;
    auto v = number(key);
    if (!v) return dflt;
    if (*v < lo || *v > hi) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "'%s': value %g out of range [%g, %g]",
                    key.c_str(), *v, lo, hi);
      error(n->line, buf);
      return dflt;
    }
    return *v;
  }

  int integer(const std::string& key, int dflt, int lo, int hi) const {
    const double v = ranged(key, dflt, lo, hi);
    return static_cast<int>(v);
  }

  // Enumerated string value; `choices` is the allowed set.
  std::string enumerated(const std::string& key, const std::string& dflt,
                         std::initializer_list<const char*> choices) const {
    const cfg::Node* n = find(key);
    if (!n) return dflt;
    for (const char* c : choices)
      if (n->value == c) return n->value;
    std::string opts;
    for (const char* c : choices) {
      if (!opts.empty()) opts += ", ";
      opts += c;
    }
    error(n->line, "'" + key + "': unknown value '" + n->value + "' (expected one of: " + opts + ")");
    return dflt;
  }

  void error(int line, const std::string& message) const {
    diags_.push_back({file_, line, message});
  }

  int key_line(const std::string& key) const {
    const cfg::Node* n = find(key);
    return n ? n->line : (node_ ? node_->line : 0);
  }

  const cfg::Node* raw() const { return node_; }

 private:
  const cfg::Node* find(const std::string& key) const {
    if (!node_) return nullptr;
    const cfg::Node* n = node_->child(key);
    if (n) used_.insert(n);
    return n;
  }

  const cfg::Node* node_;
  const std::string& file_;
  cfg::Diagnostics& diags_;
  std::set<const cfg::Node*>& used_;
};

void collect_unused(const cfg::Node& node, const std::set<const cfg::Node*>& used,
                    const std::string& file, cfg::Diagnostics& diags) {
  for (const cfg::Node& c : node.children) {
    if (!used.count(&c)) {
      diags.push_back({file, c.line, "unknown key '" + c.key + "'"});
      continue;  // do not descend: one report per unknown subtree
    }
    if (c.is_block) collect_unused(c, used, file, diags);
  }
}

// Parses "1e9" | "uniform(a, b)" | "lognormal(mu, sigma)".
void parse_size_dist(const Reader& items, ItemLayout& layout) {
  auto raw = items.str("size_bytes");
  if (!raw) {
    items.error(items.line(), "missing required key 'size_bytes'");
    return;
  }
  const std::string& s = *raw;
  auto call = [&](const char* fn) -> std::optional<std::pair<double, double>> {
    const std::string prefix = std::string(fn) + "(";
    if (s.rfind(prefix, 0) != 0 || s.back() != ')') return std::nullopt;
    auto args = cfg::split_list(s.substr(prefix.size(), s.size() - prefix.size() - 1));
    if (args.size() != 2) return std::nullopt;
    auto a = cfg::as_number(args[0]);
    auto b = cfg::as_number(args[1]);
    if (!a || !b) return std::nullopt;
    return std::make_pair(*a, *b);
  };
  if (auto v = cfg::as_number(s)) {
    layout.size_kind = SizeDistKind::fixed;
    layout.size_a = *v;
    if (*v <= 0) items.error(items.key_line("size_bytes"), "'size_bytes': must be > 0");
    return;
  }
  if (auto uv = call("uniform")) {
    layout.size_kind = SizeDistKind::uniform;
    layout.size_a = uv->first;
    layout.size_b = uv->second;
    if (uv->first <= 0 || uv->second < uv->first)
      items.error(items.key_line("size_bytes"), "'size_bytes': uniform(lo, hi) needs 0 < lo <= hi");
    return;
  }
  if (auto lv = call("lognormal")) {
    layout.size_kind = SizeDistKind::lognormal;
    layout.size_a = lv->first;
    layout.size_b = lv->second;
    if (lv->second < 0)
      items.error(items.key_line("size_bytes"), "'size_bytes': lognormal sigma must be >= 0");
    return;
  }
  items.error(items.key_line("size_bytes"),
              "'size_bytes': expected a number, uniform(lo, hi) or lognormal(mu, sigma)");
}

void parse_unit_spec(const Reader& block, UnitSpec& unit) {
  if (!block.present()) return;
  unit.capacity_bytes = block.ranged("capacity_bytes", unit.capacity_bytes, 1.0, 1e21);
  unit.uber_per_bit = block.ranged("uber_per_bit", unit.uber_per_bit, 0.0, 1.0);
  unit.annual_hazard = block.ranged("annual_hazard", unit.annual_hazard, 0.0, 1e6);
  unit.service_life_years = block.ranged("service_life_years", unit.service_life_years, 1e-6, 1e4);
}

void parse_threats(const Reader& block, Scenario& sc) {
  if (!block.present()) return;
  ThreatSpec& t = sc.threats;

  auto dispose = [&](ThreatClass cls) -> std::optional<Reader> {
    const char* name = to_string(cls);
    Reader r = block.block(name);
    if (!r.present()) return std::nullopt;
    sc.threat_disposed[static_cast<std::size_t>(cls)] = true;
    const bool enabled = r.flag_or("enabled", false);
    const bool excluded = r.flag_or("excluded", false);
    r.str("reason");  // optional free-text note, carried into the disclosure report
    if (enabled == excluded) {
      r.error(r.line(), std::string("threat '") + name +
                            "' must set exactly one of enabled/excluded to true");
      return std::nullopt;
    }
    t.enabled[static_cast<std::size_t>(cls)] = enabled;
    if (!enabled) return std::nullopt;
    return r;
  };

  if (auto r = dispose(ThreatClass::media_failure)) {
    t.media_failure.bit_errors = r->flag_or("bit_errors", true);
    t.media_failure.scrub_read_coupling = r->flag_or("scrub_read_coupling", true);
    t.media_failure.crashes = r->flag_or("crashes", true);
    if (r->has("uber_per_bit")) t.media_failure.uber_override = r->ranged("uber_per_bit", 0.0, 0.0, 1.0);
    if (r->has("annual_hazard")) t.media_failure.hazard_override = r->ranged("annual_hazard", 0.0, 0.0, 1e6);
  }
  if (auto r = dispose(ThreatClass::hardware_failure)) {
    t.hardware_failure.transient_rate_per_site_year = r->ranged("transient_rate_per_site_year", 0.0, 0.0, 1e6);
    t.hardware_failure.mean_outage_years = r->ranged("mean_outage_years", 0.01, 0.0, 100.0);
    t.hardware_failure.fatal_rate_per_site_year = r->ranged("fatal_rate_per_site_year", 0.0, 0.0, 1e6);
    t.hardware_failure.mean_restore_years = r->ranged("mean_restore_years", 0.05, 0.0, 100.0);
  }
  if (auto r = dispose(ThreatClass::software_failure)) {
    t.software_failure.rate_per_site_year = r->ranged("rate_per_site_year", 0.0, 0.0, 1e6);
    const std::string scope = r->enumerated("scope", "replica", {"replica", "unit", "site"});
    t.software_failure.scope = scope == "unit" ? SoftwareBugScope::unit
                               : scope == "site" ? SoftwareBugScope::site
                                                 : SoftwareBugScope::replica;
  }
  if (auto r = dispose(ThreatClass::communication_errors)) {
    t.communication_errors.undetected_corruption_probability =
        r->ranged("undetected_corruption_probability", 0.0, 0.0, 1.0);
  }
  if (auto r = dispose(ThreatClass::network_service_failure)) {
    t.network_service_failure.rate_per_year = r->ranged("rate_per_year", 0.0, 0.0, 1e6);
    t.network_service_failure.affected_fraction = r->ranged("affected_fraction", 0.0, 0.0, 1.0);
  }
  if (auto r = dispose(ThreatClass::media_hw_obsolescence)) {
    if (auto v = r->number_or_none("consumer_reader_unavailable_at"))
      t.media_hw_obsolescence.consumer_reader_unavailable_at = *v;
    if (auto v = r->number_or_none("enterprise_reader_unavailable_at"))
      t.media_hw_obsolescence.enterprise_reader_unavailable_at = *v;
    t.media_hw_obsolescence.transition_years =
        r->ranged("transition_years", 5.0, 0.0, 1e4);
  }
  dispose(ThreatClass::software_obsolescence);  // gate only; timing lives on formats
  if (auto r = dispose(ThreatClass::operator_error)) {
    t.operator_error.base_rate_per_domain_year = r->ranged("base_rate_per_domain_year", 0.0, 0.0, 1e6);
    t.operator_error.recoverable_fraction = r->ranged("recoverable_fraction", 0.5, 0.0, 1.0);
    t.operator_error.stress_multiplier = r->ranged("stress_multiplier", 1.0, 0.0, 1e3);
    t.operator_error.stress_window_years = r->ranged("stress_window_years", 0.1, 0.0, 100.0);
  }
  if (auto r = dispose(ThreatClass::natural_disaster)) {
    t.natural_disaster.rate_per_zone_year = r->ranged("rate_per_zone_year", 0.0, 0.0, 1e6);
    t.natural_disaster.unit_crash_probability = r->ranged("unit_crash_probability", 1.0, 0.0, 1.0);
  }
  if (auto r = dispose(ThreatClass::external_attack)) {
    t.external_attack.rate_per_class_year = r->ranged("rate_per_class_year", 0.0, 0.0, 1e6);
    t.external_attack.compromise_probability = r->ranged("compromise_probability", 1.0, 0.0, 1.0);
    t.external_attack.sites_per_year = r->ranged("sites_per_year", 0.0, 0.0, 1e9);
    t.external_attack.forged_algorithm = r->str_or("forged_algorithm", "");
    if (t.external_attack.forged_algorithm == "none") t.external_attack.forged_algorithm.clear();
  }
  if (auto r = dispose(ThreatClass::internal_attack)) {
    t.internal_attack.rate_per_domain_year = r->ranged("rate_per_domain_year", 0.0, 0.0, 1e6);
    const std::string eff = r->enumerated("effect", "corrupt", {"corrupt", "destroy"});
    t.internal_attack.effect =
        eff == "destroy" ? InternalAttackEffect::destroy : InternalAttackEffect::corrupt;
    t.internal_attack.compromise_probability = r->ranged("compromise_probability", 1.0, 0.0, 1.0);
    t.internal_attack.forged_algorithm = r->str_or("forged_algorithm", "");
    if (t.internal_attack.forged_algorithm == "none") t.internal_attack.forged_algorithm.clear();
  }
  if (auto r = dispose(ThreatClass::economic_failure)) {
    t.economic_failure.shock_rate_per_year = r->ranged("shock_rate_per_year", 0.0, 0.0, 1e6);
    t.economic_failure.shock_multiplier = r->ranged("shock_multiplier", 0.0, 0.0, 1.0);
  }
  if (auto r = dispose(ThreatClass::organizational_failure)) {
    t.organizational_failure.rate_per_site_year = r->ranged("rate_per_site_year", 0.0, 0.0, 1e6);
    t.organizational_failure.handoff_success_probability =
        r->ranged("handoff_success_probability", 1.0, 0.0, 1.0);
  }
}

void parse_strategy(const Reader& block, Scenario& sc, cfg::Diagnostics& diags,
                    const std::string& file) {
  StrategySpec& st = sc.strategy;
  if (!block.present()) return;

  Reader rep = block.block("replication");
  if (rep.present()) {
    const std::string mode = rep.enumerated("mode", "fixed", {"fixed", "p2p"});
    if (mode == "fixed") {
      st.replication = ReplicationMode::fixed;
      st.copies = rep.integer("copies", 3, 1, 1'000'000);
    } else {
      st.replication = ReplicationMode::p2p;
      st.target_min = rep.integer("target_min", 7, 1, 1'000'000);
      st.repair_threshold = rep.integer("repair_threshold", 5, 1, 1'000'000);
      if (st.target_min < st.repair_threshold)
        diags.push_back({file, rep.line(),
                         "replication: target_min must be >= repair_threshold"});
    }
  }

  Reader ing = block.block("ingest");
  if (ing.present()) {
    const std::string mode = ing.enumerated("mode", "push", {"push", "pull_crawl"});
    st.ingest_mode = mode == "push" ? IngestMode::push : IngestMode::pull_crawl;
    st.crawl_miss_probability = ing.ranged("miss_probability", 0.0, 0.0, 1.0);
  }

  Reader mig = block.block("migration");
  if (mig.present()) {
    const std::string mode = mig.enumerated(
        "mode", "none", {"none", "normalize_on_ingest", "batch", "on_access", "emulation"});
    st.migration = mode == "normalize_on_ingest" ? MigrationMode::normalize_on_ingest
                   : mode == "batch"             ? MigrationMode::batch
                   : mode == "on_access"         ? MigrationMode::on_access
                   : mode == "emulation"         ? MigrationMode::emulation
                                                 : MigrationMode::none;
    st.batch_lead_years = mig.ranged("batch_lead_years", 1.0, 0.0, 1e4);
  }

  st.preserve_original = block.flag_or("preserve_original", false);
  if (auto v = block.number_or_none("media_refresh_interval_years")) {
    if (*v <= 0)
      diags.push_back({file, block.key_line("media_refresh_interval_years"),
                       "'media_refresh_interval_years': must be > 0"});
    else
      st.media_refresh_interval_years = *v;
  }
  st.rolling_replacement_fraction = block.ranged("rolling_replacement_fraction", 0.0, 0.0, 1.0);
  st.diversity_classes = block.integer("diversity_classes", 1, 1, 1'000'000);

  Reader rl = block.block("rate_limits");
  if (rl.present()) {
    auto limit = [&](const char* key, double dflt) {
      const double v = rl.number_or(key, dflt);
      if (v <= 0)
        diags.push_back({file, rl.key_line(key), std::string("'") + key + "': rate limit must be > 0"});
      return v;
    };
    st.audits_per_site_year = limit("audits_per_site_year", st.audits_per_site_year);
    st.repairs_per_site_year = limit("repairs_per_site_year", st.repairs_per_site_year);
    st.crawls_per_site_year = limit("crawls_per_site_year", st.crawls_per_site_year);
  }

  const std::string vet = block.enumerated("repair_vetting", "audited", {"audited", "any"});
  st.repair_vetting = vet == "any" ? RepairVetting::any : RepairVetting::audited;
  if (block.has("operator_mediated_botch_probability"))
    st.operator_mediated_botch_probability =
        block.ranged("operator_mediated_botch_probability", 0.0, 0.0, 1.0);
}

void parse_audit(const Reader& block, Scenario& sc, cfg::Diagnostics& diags,
                 const std::string& file) {
  AuditParams& au = sc.audit;
  if (!block.present()) return;

  Reader tp = block.block("third_party");
  std::string tp_algorithms;
  int tp_alg_line = 0;
  if (tp.present()) {
    au.third_party_enabled = tp.flag_or("enabled", false);
    au.third_party_interval_years = tp.ranged("interval_years", 1.0, 1e-6, 1e6);
    tp_algorithms = tp.str_or("algorithms", "");
    tp_alg_line = tp.key_line("algorithms");
    const std::string store = tp.enumerated("store", "external", {"external", "same_system"});
    au.store = store == "same_system" ? StoreKind::same_system : StoreKind::external_store;
  }

  Reader mu = block.block("mutual");
  std::string mu_algorithm;
  int mu_alg_line = 0;
  if (mu.present()) {
    au.mutual_enabled = mu.flag_or("enabled", false);
    au.mutual_interval_years = mu.ranged("interval_years", 1.0, 1e-6, 1e6);
    au.quorum = mu.integer("quorum", 10, 1, 1'000'000);
    au.landslide_fraction = mu.ranged("landslide_fraction", 0.75, 0.5, 1.0);
    mu_algorithm = mu.str_or("algorithm", "");
    mu_alg_line = mu.key_line("algorithm");
  }

  au.transfer_delay_years = block.ranged("transfer_delay_years", 0.002, 0.0, 10.0);

  auto resolve = [&](const std::string& label, int line) -> AlgorithmId {
    const AlgorithmId id = sc.algorithm_by_label(label);
    if (id == kNone)
      diags.push_back({file, line, "unknown digest algorithm '" + label + "'"});
    return id;
  };

  if (au.third_party_enabled) {
    for (const std::string& label : cfg::split_list(tp_algorithms)) {
      const AlgorithmId id = resolve(label, tp_alg_line);
      if (id != kNone) au.third_party_algorithms.push_back(id);
    }
    if (au.third_party_algorithms.empty())
      diags.push_back({file, tp.line(),
                       "third_party audit enabled but no digest algorithms listed"});
  }
  if (au.mutual_enabled) {
    if (mu_algorithm.empty())
      diags.push_back({file, mu.line(), "mutual audit enabled but no 'algorithm' set"});
    else
      au.mutual_algorithm = resolve(mu_algorithm, mu_alg_line);
  }

  for (const Reader& ro : block.named_blocks("rollover")) {
    RolloverPlan plan;
    plan.at = ro.required_number("at", ro.line());
    const std::string from = ro.str_or("from", "");
    const std::string to = ro.str_or("to", "");
    plan.from = resolve(from, ro.key_line("from"));
    plan.to = resolve(to, ro.key_line("to"));
    if (plan.at < 0)
      diags.push_back({file, ro.line(), "rollover 'at' must be >= 0"});
    au.rollovers.push_back(plan);
  }
}

void parse_economics(const Reader& block, Scenario& sc, cfg::Diagnostics& diags,
                     const std::string& file) {
  if (block.present()) {
    Reader costs = block.block("costs");
    if (costs.present()) {
      CostModel& cm = sc.costs;
      auto cost = [&](const char* key, double dflt) {
        return costs.ranged(key, dflt, 0.0, 1e18);
      };
      cm.permission_per_publisher = cost("permission_per_publisher", 0.0);
      cm.permission_per_item = cost("permission_per_item", 0.0);
      cm.ingest_per_item_automated = cost("ingest_per_item_automated", 0.0);
      cm.ingest_per_item_manual = cost("ingest_per_item_manual", 0.0);
      cm.ingest_manual = costs.flag_or("ingest_manual", false);
      cm.metadata_per_item = cost("metadata_per_item", 0.0);
      cm.hardware_per_gb_year_consumer = cost("hardware_per_gb_year_consumer", 0.0);
      cm.hardware_per_gb_year_enterprise = cost("hardware_per_gb_year_enterprise", 0.0);
      cm.ops_per_replica_year = cost("ops_per_replica_year", 0.0);
      cm.audit_per_poll = cost("audit_per_poll", 0.0);
      cm.migration_batch_per_item = cost("migration_batch_per_item", 0.0);
      cm.migration_on_access_per_item = cost("migration_on_access_per_item", 0.0);
      cm.auth_system_per_year = cost("auth_system_per_year", 0.0);
      cm.serving_per_access = cost("serving_per_access", 0.0);
    }
    if (auto t = block.str("triage")) {
      sc.triage.clear();
      for (const std::string& stage : cfg::split_list(*t)) {
        if (stage == "defer_audits") sc.triage.push_back(TriageStage::defer_audits);
        else if (stage == "defer_maintenance") sc.triage.push_back(TriageStage::defer_maintenance);
        else if (stage == "decommission") sc.triage.push_back(TriageStage::decommission);
        else
          diags.push_back({file, block.key_line("triage"),
                           "'triage': unknown stage '" + stage +
                               "' (expected defer_audits, defer_maintenance, decommission)"});
      }
      if (sc.triage.empty())
        diags.push_back({file, block.key_line("triage"), "'triage': needs at least one stage"});
    }
    for (const Reader& b : block.named_blocks("budget")) {
      BudgetSpec spec;
      spec.label = b.raw()->name;
      if (spec.label.empty())
        diags.push_back({file, b.line(), "budget block needs a name: 'budget <name> { ... }'"});
      spec.funds_per_year = b.ranged("funds_per_year", 0.0, 0.0, 1e30);
      spec.per_site = b.flag_or("per_site", false);
      for (const BudgetSpec& other : sc.budgets)
        if (other.label == spec.label)
          diags.push_back({file, b.line(), "duplicate budget stream '" + spec.label + "'"});
      sc.budgets.push_back(spec);
    }
  }
  if (sc.budgets.empty()) {
    // No economics section: a single unconstrained stream keeps accounting
    // alive without ever triggering triage.
    sc.budgets.push_back({"default", 1e30, false});
  }
  int per_site_count = 0;
  for (const BudgetSpec& b : sc.budgets) per_site_count += b.per_site ? 1 : 0;
  if (per_site_count > 1)
    diags.push_back({file, block.line(), "at most one per_site budget stream is allowed"});
  if (per_site_count == 1 && sc.budgets.size() > 1)
    diags.push_back({file, block.line(),
                     "a per_site budget stream cannot be combined with named streams"});
}

void parse_injections(const Reader& root, Scenario& sc, cfg::Diagnostics& diags,
                      const std::string& file) {
  for (const Reader& b : root.named_blocks("inject")) {
    const std::string kind = b.raw()->name;
    Injection inj;
    if (kind == "corrupt_replica") inj.kind = InjectionKind::corrupt_replica;
    else if (kind == "forge_replica") inj.kind = InjectionKind::forge_replica;
    else if (kind == "lose_replica") inj.kind = InjectionKind::lose_replica;
    else if (kind == "publisher_down") inj.kind = InjectionKind::publisher_down;
    else if (kind == "defund_budget") inj.kind = InjectionKind::defund_budget;
    else if (kind == "kill_site") inj.kind = InjectionKind::kill_site;
    else {
      diags.push_back({file, b.line(), "unknown injection kind '" + kind + "'"});
      continue;
    }
    inj.time = b.ranged("time", 0.0, 0.0, 1e9);
    auto index_or_all = [&](const char* key) -> std::uint32_t {
      auto v = b.str(key);
      if (!v || *v == "all") return kNone;
      auto n = cfg::as_number(*v);
      if (!n || *n < 0) {
        diags.push_back({file, b.key_line(key),
                         std::string("'") + key + "': expected an index or 'all'"});
        return kNone;
      }
      return static_cast<std::uint32_t>(*n);
    };
    inj.item = index_or_all("item");
    inj.site = index_or_all("site");
    inj.algorithm = b.str_or("algorithm", "");
    inj.budget = b.str_or("budget", "");
    if (inj.kind == InjectionKind::forge_replica) {
      inj.algorithm_id = sc.algorithm_by_label(inj.algorithm);
      if (inj.algorithm_id == kNone)
        diags.push_back({file, b.line(),
                         "forge_replica injection needs a declared 'algorithm'"});
    }
    sc.injections.push_back(inj);
  }
}

}  // namespace

ValidationResult build_scenario(const cfg::Node& root, const std::string& filename) {
  ValidationResult result;
  cfg::Diagnostics diags;
  std::set<const cfg::Node*> used;
  Scenario sc;

  Reader top(&root, filename, diags, used);

  sc.name = top.str_or("name", "unnamed");
  sc.horizon_years = top.required_number("horizon_years", 1);
  if (sc.horizon_years <= 0)
    diags.push_back({filename, top.key_line("horizon_years"), "'horizon_years': must be > 0"});
  sc.snapshot_every_years = top.ranged("snapshot_every_years", 1.0, 1e-6, 1e9);
  sc.maintenance_interval_years = top.ranged("maintenance_interval_years", 1.0, 1e-6, 1e9);
  sc.budget_review_interval_years = top.ranged("budget_review_interval_years", 1.0, 1e-6, 1e9);

  // Formats first: items and migration targets reference them.
  for (const Reader& f : top.named_blocks("format")) {
    FormatSpec spec;
    spec.label = f.raw()->name;
    if (spec.label.empty())
      diags.push_back({filename, f.line(), "format block needs a name: 'format <name> { ... }'"});
    if (auto v = f.number_or_none("obsolete_at")) spec.obsolete_at = *v;
    spec.migration_target = f.str_or("migration_target", "none");
    if (spec.migration_target == "none") spec.migration_target.clear();
    spec.emulated = f.flag_or("emulated", false);
    for (const FormatSpec& other : sc.formats)
      if (other.label == spec.label)
        diags.push_back({filename, f.line(), "duplicate format '" + spec.label + "'"});
    sc.formats.push_back(spec);
  }
  for (FormatSpec& spec : sc.formats) {
    if (spec.migration_target.empty()) continue;
    spec.migration_target_id = sc.format_by_label(spec.migration_target);
    if (spec.migration_target_id == kNone)
      diags.push_back({filename, 0,
                       "format '" + spec.label + "': unknown migration_target '" +
                           spec.migration_target + "'"});
  }

  // Digest algorithms next: audit and threats reference them.
  for (const Reader& a : top.named_blocks("algorithm")) {
    DigestAlgorithm alg;
    alg.label = a.raw()->name;
    if (alg.label.empty())
      diags.push_back({filename, a.line(), "algorithm block needs a name"});
    if (auto v = a.number_or_none("broken_at")) alg.broken_at = *v;
    if (auto v = a.number_or_none("break_public_at")) alg.break_public_at = *v;
    if (alg.broken_at >= 0 && alg.break_public_at < 0)
      alg.break_public_at = alg.broken_at;
    if (alg.break_public_at >= 0 && alg.break_public_at < alg.broken_at)
      diags.push_back({filename, a.line(),
                       "algorithm '" + alg.label + "': break_public_at must be >= broken_at"});
    for (const DigestAlgorithm& other : sc.algorithms)
      if (other.label == alg.label)
        diags.push_back({filename, a.line(), "duplicate algorithm '" + alg.label + "'"});
    sc.algorithms.push_back(alg);
  }

  // Items.
  Reader items = top.require_block("items", 1);
  if (items.present()) {
    sc.items.count = items.integer("count", 0, 1, 100'000'000);
    if (!items.has("count"))
      diags.push_back({filename, items.line(), "missing required key 'count'"});
    parse_size_dist(items, sc.items);
    sc.items.format = items.str_or("format", "");
    if (sc.items.format.empty()) {
      diags.push_back({filename, items.line(), "missing required key 'format'"});
    } else {
      sc.items.format_id = sc.format_by_label(sc.items.format);
      if (sc.items.format_id == kNone)
        diags.push_back({filename, items.key_line("format"),
                         "unknown format '" + sc.items.format + "'"});
    }
    sc.items.publishers = items.integer("publishers", 1, 1, 100'000'000);
    sc.items.publisher_available = items.flag_or("publisher_available", true);
  }

  // Sites.
  Reader sites = top.require_block("sites", 1);
  if (sites.present()) {
    sc.sites.count = sites.integer("count", 0, 1, 1'000'000);
    if (!sites.has("count"))
      diags.push_back({filename, sites.line(), "missing required key 'count'"});
    sc.sites.zones = sites.integer("zones", 1, 1, 1'000'000);
    const std::string domains = sites.str_or("admin_domains", "per_site");
    if (domains == "per_site") {
      sc.sites.admin_domains = 0;
    } else if (auto v = cfg::as_number(domains); v && *v >= 1) {
      sc.sites.admin_domains = static_cast<int>(*v);
    } else {
      diags.push_back({filename, sites.key_line("admin_domains"),
                       "'admin_domains': expected 'per_site' or a positive count"});
    }
    const std::string grade = sites.enumerated("grade", "consumer", {"consumer", "enterprise"});
    sc.sites.grade = grade == "enterprise" ? Grade::enterprise : Grade::consumer;
    sc.sites.units_per_site = sites.integer("units_per_site", 1, 1, 100'000);
    sc.sites.budget = sites.str_or("budget", "");
    parse_unit_spec(sites.block("unit"), sc.sites.unit);

    Reader store = sites.block("digest_store");
    if (store.present()) {
      DigestStoreLayout layout;
      layout.zone = store.integer("zone", 0, 0, 1'000'000);
      const std::string dom = store.str_or("admin_domain", "own");
      if (dom == "own") {
        layout.admin_domain = -1;
      } else if (auto v = cfg::as_number(dom); v && *v >= 0) {
        layout.admin_domain = static_cast<int>(*v);
      } else {
        diags.push_back({filename, store.key_line("admin_domain"),
                         "'admin_domain': expected 'own' or a domain index"});
      }
      layout.units = store.integer("units", 1, 1, 100'000);
      layout.unit = sc.sites.unit;
      parse_unit_spec(store.block("unit"), layout.unit);
      sc.digest_store = layout;
    }
  }

  // Threats: every taxonomy entry needs an explicit disposition.
  Reader threats = top.require_block("threats", 1);
  parse_threats(threats, sc);
  for (std::size_t i = 0; i < kThreatClassCount; ++i) {
    if (!sc.threat_disposed[i])
      diags.push_back({filename, threats.present() ? threats.line() : 1,
                       std::string("threat '") + to_string(static_cast<ThreatClass>(i)) +
                           "' has no disposition: every taxonomy threat must be "
                           "enabled or explicitly excluded"});
  }

  parse_strategy(top.block("strategy"), sc, diags, filename);
  parse_audit(top.block("audit"), sc, diags, filename);
  parse_economics(top.block("economics"), sc, diags, filename);

  Reader access = top.block("access");
  if (access.present()) {
    sc.access_rate_per_item_year = access.ranged("rate_per_item_year", 0.1, 0.0, 1e6);
    if (auto s = access.str("delay_buckets_years")) {
      for (const std::string& p : cfg::split_list(*s)) {
        auto v = cfg::as_number(p);
        if (!v || *v <= 0) {
          diags.push_back({filename, access.key_line("delay_buckets_years"),
                           "'delay_buckets_years': expected positive numbers"});
          break;
        }
        sc.delay_buckets_years.push_back(*v);
      }
      if (!std::is_sorted(sc.delay_buckets_years.begin(), sc.delay_buckets_years.end()))
        diags.push_back({filename, access.key_line("delay_buckets_years"),
                         "'delay_buckets_years': must be ascending"});
    }
  } else {
    sc.access_rate_per_item_year = 0.1;
  }
  if (sc.delay_buckets_years.empty())
    sc.delay_buckets_years = {0.002, 0.01, 0.05, 0.25};

  parse_injections(top, sc, diags, filename);

  // Cross-cutting reference checks.
  if (sc.threats.on(ThreatClass::external_attack) &&
      !sc.threats.external_attack.forged_algorithm.empty()) {
    sc.threats.external_attack.forged_algorithm_id =
        sc.algorithm_by_label(sc.threats.external_attack.forged_algorithm);
    if (sc.threats.external_attack.forged_algorithm_id == kNone)
      diags.push_back({filename, 0,
                       "external_attack: unknown forged_algorithm '" +
                           sc.threats.external_attack.forged_algorithm + "'"});
  }
  if (sc.threats.on(ThreatClass::internal_attack) &&
      !sc.threats.internal_attack.forged_algorithm.empty()) {
    sc.threats.internal_attack.forged_algorithm_id =
        sc.algorithm_by_label(sc.threats.internal_attack.forged_algorithm);
    if (sc.threats.internal_attack.forged_algorithm_id == kNone)
      diags.push_back({filename, 0,
                       "internal_attack: unknown forged_algorithm '" +
                           sc.threats.internal_attack.forged_algorithm + "'"});
  }
  if (sc.audit.third_party_enabled && sc.audit.store == StoreKind::external_store &&
      !sc.digest_store)
    diags.push_back({filename, 1,
                     "third_party audit with an external store requires a "
                     "'digest_store' block under 'sites'"});

  bool per_site_budget = false;
  for (const BudgetSpec& b : sc.budgets) per_site_budget |= b.per_site;
  if (!sc.sites.budget.empty()) {
    bool found = false;
    for (const BudgetSpec& b : sc.budgets) found |= b.label == sc.sites.budget;
    if (!found)
      diags.push_back({filename, 0, "sites.budget: unknown budget stream '" +
                                        sc.sites.budget + "'"});
  } else if (!per_site_budget && sc.budgets.size() > 1) {
    diags.push_back({filename, 0,
                     "multiple budget streams declared; sites.budget must name one"});
  }
  for (Injection& inj : sc.injections) {
    if (inj.kind != InjectionKind::defund_budget) continue;
    if (inj.budget.empty()) {
      diags.push_back({filename, 0, "defund_budget injection needs 'budget'"});
      continue;
    }
    // With a per_site stream, labels are expanded as site_<index> at build time.
    if (per_site_budget) {
      if (inj.budget.rfind("site_", 0) != 0)
        diags.push_back({filename, 0,
                         "defund_budget: with per_site budgets, use 'site_<index>'"});
      continue;
    }
    bool found = false;
    for (std::size_t i = 0; i < sc.budgets.size(); ++i) {
      if (sc.budgets[i].label == inj.budget) {
        inj.budget_id = static_cast<BudgetId>(i);
        found = true;
      }
    }
    if (!found)
      diags.push_back({filename, 0,
                       "defund_budget: unknown budget stream '" + inj.budget + "'"});
  }
  for (const Injection& inj : sc.injections) {
    if (inj.item != kNone && sc.items.count > 0 &&
        inj.item >= static_cast<std::uint32_t>(sc.items.count))
      diags.push_back({filename, 0, "injection item index out of range"});
    if (inj.site != kNone && sc.sites.count > 0 &&
        inj.site >= static_cast<std::uint32_t>(sc.sites.count))
      diags.push_back({filename, 0, "injection site index out of range"});
  }

  // Feasibility warnings (not errors).
  if (sc.audit.third_party_enabled && sc.sites.count > 0 && sc.items.count > 0) {
    const double replicas_per_site =
        static_cast<double>(sc.items.count) *
        (sc.strategy.replication == ReplicationMode::fixed ? sc.strategy.copies
                                                           : sc.strategy.target_min) /
        sc.sites.count;
    const double needed = replicas_per_site / sc.audit.third_party_interval_years;
    if (needed > sc.strategy.audits_per_site_year) {
      const double achievable = replicas_per_site / sc.strategy.audits_per_site_year;
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "audit rate limit makes the %.3g yr third-party interval "
                    "infeasible; achievable effective interval is %.3g yr",
                    sc.audit.third_party_interval_years, achievable);
      result.warnings.push_back(buf);
    }
  }

  collect_unused(root, used, filename, diags);

  std::sort(diags.begin(), diags.end(), [](const cfg::Diagnostic& a, const cfg::Diagnostic& b) {
    return a.line < b.line;
  });

  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg::serialize(root))));
  sc.source_hash_hex = hex;

  result.errors = std::move(diags);
  if (result.errors.empty()) result.scenario = std::move(sc);
  return result;
}

ValidationResult load_scenario_file(const std::string& path) {
  cfg::ParseResult parsed = cfg::parse_file(path);
  if (!parsed.ok()) {
    ValidationResult r;
    r.errors = std::move(parsed.diagnostics);
    return r;
  }
  return build_scenario(parsed.root, path);
}

ValidationResult load_scenario_string(const std::string& text, const std::string& name) {
  cfg::ParseResult parsed = cfg::parse_string(text, name);
  if (!parsed.ok()) {
    ValidationResult r;
    r.errors = std::move(parsed.diagnostics);
    return r;
  }
  return build_scenario(parsed.root, name);
}

}  // namespace presim
