#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hetsim/common.hpp"

namespace hetsim::radio {

struct PowerControlParams {
  double p_max_dbm = 23.0;
  double p0_dbm = -58.0;
  double alpha = 0.8;  // pathloss compensation, in [0,1]
};

// min(Pmax, P0 + 10*log10(M) + alpha*PL). Per-PRB power is the result minus
// 10*log10(M) (equal split over allocated PRBs).
double ul_tx_power_dbm(const PowerControlParams& params, int n_prb_allocated,
                       double dl_pathloss_db);

inline double ul_prb_power_dbm(const PowerControlParams& params, int n_prb_allocated,
                               double dl_pathloss_db) {
  return ul_tx_power_dbm(params, n_prb_allocated, dl_pathloss_db) -
         10.0 * std::log10(static_cast<double>(n_prb_allocated));
}

struct SinrSample {
  double value_linear = 0.0;
  Direction direction = Direction::ul;
  int prb_index = 0;
};

struct UlInterferer {
  double prb_power_w = 0.0;          // transmit power on the shared PRB
  double gain_to_server_linear = 0.0;  // channel gain towards the target's server
};

SinrSample ul_sinr(double signal_prb_power_w, double signal_gain_linear,
                   std::span<const UlInterferer> interferers, double noise_w_per_hz,
                   double prb_bandwidth_hz, int prb_index);

// cell_prb_power_w(c) = 0 marks a cell idle on this PRB; muted[c] != 0 removes
// it from the interference sum. Scheduling the serving cell on a muted PRB is
// a scheduler bug and rejected.
SinrSample dl_sinr(CellId serving, const Eigen::VectorXd& cell_prb_power_w,
                   const Eigen::VectorXd& gain_linear, const std::vector<std::uint8_t>& muted,
                   double noise_w_per_hz, double prb_bandwidth_hz, int prb_index);

// Truncated attenuated Shannon: min(eta_max, beta*log2(1+sinr)).
double spectral_efficiency(double sinr_linear, double beta = 0.75, double eta_max = 6.0);

// Gauss-Laguerre nodes/weights for integrals against exp(-x) on [0, inf),
// via the Golub-Welsch eigenproblem.
struct GaussLaguerre {
  explicit GaussLaguerre(int n);
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

// Ergodic fading average of the spectral efficiency. "rayleigh" integrates
// against a unit-mean exponential power distribution; "none" evaluates phi at
// the nominal SINR.
class FadingModel {
 public:
  static FadingModel none();
  static FadingModel rayleigh(int quadrature_nodes = 32);

  double mean_efficiency(double sinr_linear, double beta, double eta_max) const;
  bool is_none() const { return none_; }

 private:
  FadingModel() = default;
  bool none_ = true;
  Eigen::ArrayXd nodes_;
  Eigen::ArrayXd weights_;
};

// Sum over allocated PRBs of W * E[phi(sinr * xi)].
double expected_rate(std::span<const double> sinr_per_prb, double prb_bandwidth_hz,
                     const FadingModel& fading, double beta, double eta_max);

// Round Robin share: flow i of n gets floor(n_prb/n) or ceil(n_prb/n) PRBs
// (the PRBs k with k % n == i); all PRBs assigned.
int rr_prb_count(int n_prb, int n_flows, int slot);
std::vector<int> rr_prbs_of_slot(int n_prb, int n_flows, int slot);

// Synchronized periodic ABS pattern: the first `muted` subframes of every
// `period` are macro-muted.
struct ResourceGrid {
  int n_prb = 50;
  double prb_bandwidth_hz = 180e3;
  int abs_period = 8;
  int abs_muted = 1;

  double mute_ratio() const {
    return abs_period > 0 ? static_cast<double>(abs_muted) / abs_period : 0.0;
  }
  bool macro_muted_subframe(int subframe) const {
    return abs_period > 0 && (subframe % abs_period) < abs_muted;
  }
};

struct RadioConfig {
  ResourceGrid grid;
  double noise_dbm_per_hz = -174.0;
  PowerControlParams power_control;
  double beta_efficiency = 0.75;
  double eta_max_bps_hz = 6.0;
  std::string fading = "rayleigh";  // "rayleigh" or "none"
  int quadrature_nodes = 32;

  double noise_w_per_hz() const { return dbm_to_watt(noise_dbm_per_hz); }
  FadingModel make_fading() const {
    return fading == "none" ? FadingModel::none() : FadingModel::rayleigh(quadrature_nodes);
  }
};

}  // namespace hetsim::radio
