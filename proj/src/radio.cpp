#include "hetsim/radio.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace hetsim::radio {

double ul_tx_power_dbm(const PowerControlParams& params, int n_prb_allocated,
                       double dl_pathloss_db) {
  require(n_prb_allocated >= 1, ErrorCategory::contract,
          "ul_tx_power_dbm: allocation must hold at least one PRB");
  require(dl_pathloss_db >= 0.0, ErrorCategory::domain, "ul_tx_power_dbm: negative pathloss");
  const double open_loop = params.p0_dbm + 10.0 * std::log10(static_cast<double>(n_prb_allocated)) +
                           params.alpha * dl_pathloss_db;
  return std::min(params.p_max_dbm, open_loop);
}

SinrSample ul_sinr(double signal_prb_power_w, double signal_gain_linear,
                   std::span<const UlInterferer> interferers, double noise_w_per_hz,
                   double prb_bandwidth_hz, int prb_index) {
  double denom = prb_bandwidth_hz * noise_w_per_hz;
  for (const auto& it : interferers) denom += it.prb_power_w * it.gain_to_server_linear;
  return {signal_prb_power_w * signal_gain_linear / denom, Direction::ul, prb_index};
}

SinrSample dl_sinr(CellId serving, const Eigen::VectorXd& cell_prb_power_w,
                   const Eigen::VectorXd& gain_linear, const std::vector<std::uint8_t>& muted,
                   double noise_w_per_hz, double prb_bandwidth_hz, int prb_index) {
  const bool serving_muted = serving < static_cast<CellId>(muted.size()) && muted[serving];
  require(!(serving_muted && cell_prb_power_w(serving) > 0.0), ErrorCategory::contract,
          "dl_sinr: serving cell scheduled on a muted PRB");
  double denom = prb_bandwidth_hz * noise_w_per_hz;
  for (CellId c = 0; c < cell_prb_power_w.size(); ++c) {
    if (c == serving) continue;
    if (c < static_cast<CellId>(muted.size()) && muted[c]) continue;
    denom += cell_prb_power_w(c) * gain_linear(c);
  }
  return {cell_prb_power_w(serving) * gain_linear(serving) / denom, Direction::dl, prb_index};
}

double spectral_efficiency(double sinr_linear, double beta, double eta_max) {
  require(sinr_linear >= 0.0, ErrorCategory::domain, "spectral_efficiency: negative SINR");
  return std::min(eta_max, beta * std::log2(1.0 + sinr_linear));
}

GaussLaguerre::GaussLaguerre(int n) {
  require(n >= 1, ErrorCategory::config, "GaussLaguerre: need at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    jacobi(k, k) = 2.0 * k + 1.0;
    if (k > 0) {
      jacobi(k, k - 1) = jacobi(k - 1, k) = static_cast<double>(k);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes = solver.eigenvalues().array();
  // mu0 = integral of exp(-x) over [0, inf) = 1
  weights = solver.eigenvectors().row(0).transpose().array().square();
}

FadingModel FadingModel::none() {
  FadingModel m;
  m.none_ = true;
  return m;
}

FadingModel FadingModel::rayleigh(int quadrature_nodes) {
  FadingModel m;
  m.none_ = false;
  GaussLaguerre gl(quadrature_nodes);
  m.nodes_ = gl.nodes;
  m.weights_ = gl.weights;
  return m;
}

double FadingModel::mean_efficiency(double sinr_linear, double beta, double eta_max) const {
  if (none_) return spectral_efficiency(sinr_linear, beta, eta_max);
  double acc = 0.0;
  for (int i = 0; i < nodes_.size(); ++i) {
    acc += weights_(i) * spectral_efficiency(sinr_linear * nodes_(i), beta, eta_max);
  }
  return acc;
}

double expected_rate(std::span<const double> sinr_per_prb, double prb_bandwidth_hz,
                     const FadingModel& fading, double beta, double eta_max) {
  require(!sinr_per_prb.empty(), ErrorCategory::contract, "expected_rate: empty PRB set");
  double rate = 0.0;
  for (double s : sinr_per_prb) {
    rate += prb_bandwidth_hz * fading.mean_efficiency(s, beta, eta_max);
  }
  return rate;
}

int rr_prb_count(int n_prb, int n_flows, int slot) {
  require(n_flows >= 1 && slot >= 0 && slot < n_flows, ErrorCategory::contract,
          "rr_prb_count: bad slot");
  return n_prb / n_flows + (slot < n_prb % n_flows ? 1 : 0);
}

std::vector<int> rr_prbs_of_slot(int n_prb, int n_flows, int slot) {
  require(n_flows >= 1 && slot >= 0 && slot < n_flows, ErrorCategory::contract,
          "rr_prbs_of_slot: bad slot");
  std::vector<int> prbs;
  for (int k = slot; k < n_prb; k += n_flows) prbs.push_back(k);
  return prbs;
}

}  // namespace hetsim::radio
