#include "hetsim/exposure.hpp"

namespace hetsim::exposure {

void ExposureLedger::accumulate(std::int64_t flow_id, CellGroup group, double dt_s,
                                double tx_power_w, double incident_dl_power_w) {
  require(dt_s > 0.0, ErrorCategory::domain, "ExposureLedger: dt must be positive");
  require(tx_power_w >= 0.0 && incident_dl_power_w >= 0.0, ErrorCategory::domain,
          "ExposureLedger: negative power");
  FlowEntry& e = flows_[flow_id];
  e.group = group;
  e.ul_power_time_ws += tx_power_w * dt_s;
  e.dl_incident_power_time_ws += incident_dl_power_w * dt_s;
}

int ExposureLedger::users(CellGroup group) const {
  int n = 0;
  for (const auto& [id, e] : flows_) {
    if (e.group == group) ++n;
  }
  return n;
}

double ExposureLedger::ul_power_time_ws(std::optional<CellGroup> group) const {
  double acc = 0.0;
  for (const auto& [id, e] : flows_) {
    if (!group || e.group == *group) acc += e.ul_power_time_ws;
  }
  return acc;
}

double ExposureLedger::dl_incident_power_time_ws(std::optional<CellGroup> group) const {
  double acc = 0.0;
  for (const auto& [id, e] : flows_) {
    if (!group || e.group == *group) acc += e.dl_incident_power_time_ws;
  }
  return acc;
}

std::optional<double> f_ul(const ExposureLedger& ledger, std::optional<CellGroup> group) {
  require(ledger.horizon_s() > 0.0, ErrorCategory::domain, "f_ul: horizon must be positive");
  const int users = group ? ledger.users(*group) : ledger.total_users();
  if (users == 0) return std::nullopt;
  return ledger.params().sar_ul_w_per_kg_per_w * ledger.ul_power_time_ws(group) /
         (ledger.horizon_s() * users);
}

std::optional<double> f_dl(const ExposureLedger& ledger, std::optional<CellGroup> group) {
  require(ledger.horizon_s() > 0.0, ErrorCategory::domain, "f_dl: horizon must be positive");
  const int users = group ? ledger.users(*group) : ledger.total_users();
  if (users == 0) return std::nullopt;
  return ledger.params().activity_coefficient * ledger.params().sar_dl_w_per_kg_per_w *
         ledger.dl_incident_power_time_ws(group) / (ledger.horizon_s() * users);
}

namespace {

ExposureValues values_for(const ExposureLedger& ledger, std::optional<CellGroup> group) {
  ExposureValues v;
  v.users = group ? ledger.users(*group) : ledger.total_users();
  v.f_ul = f_ul(ledger, group);
  v.f_dl = f_dl(ledger, group);
  if (v.f_ul && v.f_dl) v.f_total = *v.f_ul + *v.f_dl;
  return v;
}

GainValues gains_for(const ExposureValues& base, const ExposureValues& scen) {
  return {gain_percent(base.f_ul, scen.f_ul), gain_percent(base.f_dl, scen.f_dl),
          gain_percent(base.f_total, scen.f_total)};
}

}  // namespace

ExposureReport ExposureReport::from_ledger(const ExposureLedger& ledger) {
  ExposureReport r;
  r.all = values_for(ledger, std::nullopt);
  r.macro = values_for(ledger, CellGroup::macro);
  r.sc = values_for(ledger, CellGroup::sc);
  return r;
}

const ExposureValues& ExposureReport::group(const std::string& name) const {
  if (name == "macro") return macro;
  if (name == "sc") return sc;
  return all;
}

std::optional<double> gain_percent(std::optional<double> baseline, std::optional<double> scenario) {
  if (!baseline || !scenario || *baseline <= 0.0) return std::nullopt;
  return 100.0 * (*baseline - *scenario) / *baseline;
}

GainReport exposure_gain(const ExposureReport& baseline, const ExposureReport& scenario) {
  return {gains_for(baseline.all, scenario.all), gains_for(baseline.macro, scenario.macro),
          gains_for(baseline.sc, scenario.sc)};
}

}  // namespace hetsim::exposure
