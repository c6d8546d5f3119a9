#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hetsim/flowsim.hpp"
#include "hetsim/netmodel.hpp"
#include "hetsim/radio.hpp"
#include "hetsim/son.hpp"

namespace hetsim::flowsim {

struct AnalyticConfig {
  double lambda_override = 0.0;    // 0 -> use the traffic config's lambda
  double ul_noise_rise_db = 6.0;   // fixed UL interference proxy
  bool use_shadowing = false;
  std::uint64_t shadowing_seed = 777;
  // Logistic half-width (decades of rate) of the outage transition band;
  // 0 = hard threshold. Keeps theta continuous in the offsets so the
  // convergence diagnostics see the mean field, not pixel quanta.
  double outage_smoothing = 0.1;
};

// Deterministic grid evaluation of the loads/capacity integrals and the
// load-coupled outage, used to cross-validate the empirical KPIs and to give
// the SON convergence diagnostics a reproducible mean field.
class AnalyticModel {
 public:
  AnalyticModel(const netmodel::NetworkLayout& layout, const radio::RadioConfig& radio,
                const TrafficConfig& traffic, const AnalyticConfig& cfg = {});

  struct Eval {
    Eigen::VectorXd sector_ul_load;  // indexed like layout.zone_a_sector_ids
    Eigen::VectorXd sector_dl_load;
    Eigen::VectorXd sc_ul_load;      // indexed by SC
    Eigen::VectorXd sc_dl_load;
    Eigen::VectorXd sc_outage;
  };

  Eval evaluate(const netmodel::PowerOffsetVector& offsets) const;

  // Per-SC drift inputs (parent macro load mapped onto each SC).
  son::KpiPoint kpis(const netmodel::PowerOffsetVector& offsets) const;
  son::KpiFn kpi_fn() const;

  // Harmonic-mean rate over the cell's coverage region within the evaluated
  // pixel set; empty region -> no-measurement.
  std::optional<double> capacity_bps(CellId cell, const netmodel::PowerOffsetVector& offsets,
                                     Direction direction) const;
  // Offered-over-rate grid integral (unclamped load).
  double load(CellId cell, const netmodel::PowerOffsetVector& offsets,
              Direction direction) const;

  const netmodel::NetworkLayout& layout() const { return layout_; }
  double lambda_per_s() const { return lambda_; }

 private:
  CellId best_cell(int local_pixel, const netmodel::PowerOffsetVector& offsets) const;

  const netmodel::NetworkLayout& layout_;
  radio::RadioConfig radio_;
  TrafficConfig traffic_;
  AnalyticConfig cfg_;
  double lambda_ = 0.0;
  std::vector<int> pixels_;          // zone-A pixels plus an SC fringe
  std::vector<double> arrival_w_;    // per local pixel, sums to 1 over zone A
  Eigen::MatrixXd gain_;             // cells x local pixels, linear
  Eigen::MatrixXd rate_ul_;          // peak UL rate, cells x local pixels
  Eigen::MatrixXd rate_dl_;          // peak DL rate, cells x local pixels
};

}  // namespace hetsim::flowsim
