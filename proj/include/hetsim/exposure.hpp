#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "hetsim/common.hpp"

namespace hetsim::exposure {

struct ExposureParams {
  double sar_ul_w_per_kg_per_w = 8e-5;
  double sar_dl_w_per_kg_per_w = 4.7e-3;
  double activity_coefficient = 20.0;  // C1 >= 1
};

enum class CellGroup { macro, sc };

inline const char* cell_group_name(CellGroup g) { return g == CellGroup::macro ? "macro" : "sc"; }

// Accumulated per-flow power-time integrals: UL transmit power and total
// incident DL power at the user's location, both in W*s.
class ExposureLedger {
 public:
  explicit ExposureLedger(ExposureParams params = {}) : params_(params) {
    require(params_.activity_coefficient >= 1.0, ErrorCategory::config,
            "ExposureLedger: C1 must be >= 1");
  }

  void accumulate(std::int64_t flow_id, CellGroup group, double dt_s, double tx_power_w,
                  double incident_dl_power_w);

  void set_horizon(double horizon_s) { horizon_s_ = horizon_s; }
  double horizon_s() const { return horizon_s_; }
  const ExposureParams& params() const { return params_; }

  int total_users() const { return static_cast<int>(flows_.size()); }
  int users(CellGroup group) const;
  double ul_power_time_ws(std::optional<CellGroup> group = {}) const;
  double dl_incident_power_time_ws(std::optional<CellGroup> group = {}) const;

 private:
  struct FlowEntry {
    CellGroup group = CellGroup::macro;
    double ul_power_time_ws = 0.0;
    double dl_incident_power_time_ws = 0.0;
  };
  ExposureParams params_;
  double horizon_s_ = 0.0;
  std::map<std::int64_t, FlowEntry> flows_;
};

// Mean UL exposure (W/kg): (1/T) * psi_ul * sum(P_tx*dt) / users.
// No-measurement (nullopt) when the population is empty.
std::optional<double> f_ul(const ExposureLedger& ledger, std::optional<CellGroup> group = {});

// Mean DL exposure (W/kg): (1/T) * C1 * psi_dl * sum(incident*dt) / users.
std::optional<double> f_dl(const ExposureLedger& ledger, std::optional<CellGroup> group = {});

struct ExposureValues {
  std::optional<double> f_ul;
  std::optional<double> f_dl;
  std::optional<double> f_total;  // f_ul + f_dl
  int users = 0;
};

struct ExposureReport {
  ExposureValues all;
  ExposureValues macro;
  ExposureValues sc;

  static ExposureReport from_ledger(const ExposureLedger& ledger);
  const ExposureValues& group(const std::string& name) const;
};

// 100*(baseline - scenario)/baseline; nullopt when the baseline component is
// missing or zero (undefined-gain signal).
std::optional<double> gain_percent(std::optional<double> baseline, std::optional<double> scenario);

struct GainValues {
  std::optional<double> f_ul;
  std::optional<double> f_dl;
  std::optional<double> f_total;
};

struct GainReport {
  GainValues all;
  GainValues macro;
  GainValues sc;
};

GainReport exposure_gain(const ExposureReport& baseline, const ExposureReport& scenario);

}  // namespace hetsim::exposure
