#include "hetsim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hetsim/rng.hpp"

namespace hetsim::flowsim {

AnalyticModel::AnalyticModel(const netmodel::NetworkLayout& layout,
                             const radio::RadioConfig& radio, const TrafficConfig& traffic,
                             const AnalyticConfig& cfg)
    : layout_(layout), radio_(radio), traffic_(traffic), cfg_(cfg) {
  lambda_ = cfg.lambda_override > 0.0 ? cfg.lambda_override : traffic.lambda_per_s;

  // Pixel set: the zone-A macro region plus a fringe around each SC (regions
  // can spill past the zone boundary at high CIO).
  std::set<int> pixel_set;
  std::vector<std::uint8_t> in_zone_a(layout.n_pixels(), 0);
  for (int pix = 0; pix < layout.n_pixels(); ++pix) {
    const Point p = layout.pixel_center(pix);
    if (layout.is_zone_a_sector(netmodel::best_macro_sector(p, layout))) {
      pixel_set.insert(pix);
      in_zone_a[pix] = 1;
    }
  }
  const double fringe = 150.0;
  for (const auto& sc : layout.small_cells) {
    const double res = layout.config.grid_resolution_m;
    const int r = static_cast<int>(std::ceil(fringe / res));
    const int cpix = layout.pixel_of(sc.position);
    const int cx = cpix % layout.grid_nx();
    const int cy = cpix / layout.grid_nx();
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const int x = cx + dx;
        const int y = cy + dy;
        if (x < 0 || y < 0 || x >= layout.grid_nx() || y >= layout.grid_ny()) continue;
        pixel_set.insert(y * layout.grid_nx() + x);
      }
    }
  }
  pixels_.assign(pixel_set.begin(), pixel_set.end());

  int n_zone_a = 0;
  for (int pix : pixels_) n_zone_a += in_zone_a[pix];
  arrival_w_.resize(pixels_.size());
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    arrival_w_[i] = in_zone_a[pixels_[i]] ? 1.0 / n_zone_a : 0.0;
  }

  netmodel::ShadowingField shadow(cfg.shadowing_seed,
                                  cfg.use_shadowing ? layout.config.shadowing_sigma_db : 0.0);
  const int n_cells = layout.n_cells();
  const int n_local = static_cast<int>(pixels_.size());
  gain_.resize(n_cells, n_local);
  for (int i = 0; i < n_local; ++i) {
    const Point p = layout.pixel_center(pixels_[i]);
    for (CellId c = 0; c < n_cells; ++c) {
      gain_(c, i) =
          db_to_linear(netmodel::link_gain(layout, c, p, &shadow, pixels_[i]).total_gain_db);
    }
  }

  // Peak rates. UL interference is a fixed noise rise; DL interference is the
  // full-activity state mixed with the ABS-protected state for SCs.
  const radio::FadingModel fading = radio.make_fading();
  const int n_prb = radio.grid.n_prb;
  const double w_prb = radio.grid.prb_bandwidth_hz;
  const double noise = radio.noise_w_per_hz();
  const double nr = db_to_linear(cfg.ul_noise_rise_db);
  const double r_abs = radio.grid.mute_ratio();
  const double beta = radio.beta_efficiency;
  const double eta = radio.eta_max_bps_hz;

  rate_ul_.resize(n_cells, n_local);
  rate_dl_.resize(n_cells, n_local);
  Eigen::VectorXd prb_power_w(n_cells);
  for (CellId c = 0; c < n_cells; ++c) {
    prb_power_w(c) = dbm_to_watt(layout.pilot_dbm(c)) / n_prb;
  }
  for (int i = 0; i < n_local; ++i) {
    double macro_rx = 0.0;
    double sc_rx = 0.0;
    for (CellId c = 0; c < n_cells; ++c) {
      const double rx = prb_power_w(c) * gain_(c, i);
      if (layout.is_small_cell(c)) {
        sc_rx += rx;
      } else {
        macro_rx += rx;
      }
    }
    for (CellId c = 0; c < n_cells; ++c) {
      const double loss_db = -linear_to_db(gain_(c, i));
      const double ul_total_dbm =
          radio::ul_tx_power_dbm(radio.power_control, n_prb, std::max(0.0, loss_db));
      const double ul_prb_w = dbm_to_watt(ul_total_dbm) / n_prb;
      const double su = ul_prb_w * gain_(c, i) / (w_prb * noise * nr);
      rate_ul_(c, i) = n_prb * w_prb * fading.mean_efficiency(su, beta, eta);

      const double sig = prb_power_w(c) * gain_(c, i);
      const double own = sig;
      const double i_norm = macro_rx + sc_rx - own;
      if (layout.is_small_cell(c)) {
        const double i_prot = sc_rx - own;
        const double sd_norm = sig / (w_prb * noise + i_norm);
        const double sd_prot = sig / (w_prb * noise + i_prot);
        rate_dl_(c, i) = n_prb * w_prb *
                         (r_abs * fading.mean_efficiency(sd_prot, beta, eta) +
                          (1.0 - r_abs) * fading.mean_efficiency(sd_norm, beta, eta));
      } else {
        const double sd_norm = sig / (w_prb * noise + i_norm);
        rate_dl_(c, i) = n_prb * w_prb * (1.0 - r_abs) * fading.mean_efficiency(sd_norm, beta, eta);
      }
    }
  }
}

CellId AnalyticModel::best_cell(int local_pixel,
                                const netmodel::PowerOffsetVector& offsets) const {
  CellId best = 0;
  double best_score = -1e300;
  for (CellId c = 0; c < layout_.n_cells(); ++c) {
    const double score =
        gain_(c, local_pixel) * db_to_linear(offsets.selection_dbm(layout_, c));
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

AnalyticModel::Eval AnalyticModel::evaluate(const netmodel::PowerOffsetVector& offsets) const {
  const int n_sc = layout_.n_small_cells();
  const int n_zone_sectors = static_cast<int>(layout_.zone_a_sector_ids.size());
  Eval ev;
  ev.sector_ul_load = Eigen::VectorXd::Zero(n_zone_sectors);
  ev.sector_dl_load = Eigen::VectorXd::Zero(n_zone_sectors);
  ev.sc_ul_load = Eigen::VectorXd::Zero(n_sc);
  ev.sc_dl_load = Eigen::VectorXd::Zero(n_sc);
  ev.sc_outage = Eigen::VectorXd::Zero(n_sc);

  const double e_sigma_bits = traffic_.mean_file_mbits * 1e6;
  const double ul_offered = lambda_ * traffic_.ul_fraction * e_sigma_bits;
  const double dl_offered = lambda_ * (1.0 - traffic_.ul_fraction) * e_sigma_bits;

  const int n_local = static_cast<int>(pixels_.size());
  std::vector<CellId> best(n_local);
  std::map<CellId, int> sector_slot;
  for (int i = 0; i < n_zone_sectors; ++i) sector_slot[layout_.zone_a_sector_ids[i]] = i;

  for (int i = 0; i < n_local; ++i) {
    best[i] = best_cell(i, offsets);
    if (arrival_w_[i] == 0.0) continue;
    const CellId c = best[i];
    const double ul = arrival_w_[i] * ul_offered / rate_ul_(c, i);
    const double dl = arrival_w_[i] * dl_offered / rate_dl_(c, i);
    if (layout_.is_small_cell(c)) {
      ev.sc_ul_load(layout_.sc_index(c)) += ul;
      ev.sc_dl_load(layout_.sc_index(c)) += dl;
    } else if (auto it = sector_slot.find(c); it != sector_slot.end()) {
      ev.sector_ul_load(it->second) += ul;
      ev.sector_dl_load(it->second) += dl;
    }
  }
  ev.sector_ul_load = ev.sector_ul_load.cwiseMin(1.0);
  ev.sector_dl_load = ev.sector_dl_load.cwiseMin(1.0);
  ev.sc_ul_load = ev.sc_ul_load.cwiseMin(1.0);
  ev.sc_dl_load = ev.sc_dl_load.cwiseMin(1.0);

  // Coverage outage: the peak DL rate against the target, optionally with a
  // logistic transition band.
  Eigen::VectorXd below = Eigen::VectorXd::Zero(n_sc);
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(n_sc);
  for (int i = 0; i < n_local; ++i) {
    if (arrival_w_[i] == 0.0 || !layout_.is_small_cell(best[i])) continue;
    const int s = layout_.sc_index(best[i]);
    weight(s) += arrival_w_[i];
    if (cfg_.outage_smoothing > 0.0) {
      const double x = std::log10(rate_dl_(best[i], i) / traffic_.target_rate_bps);
      below(s) += arrival_w_[i] / (1.0 + std::exp(x / cfg_.outage_smoothing));
    } else if (rate_dl_(best[i], i) < traffic_.target_rate_bps) {
      below(s) += arrival_w_[i];
    }
  }
  for (int s = 0; s < n_sc; ++s) {
    ev.sc_outage(s) = weight(s) > 0.0 ? below(s) / weight(s) : 0.0;
  }
  return ev;
}

son::KpiPoint AnalyticModel::kpis(const netmodel::PowerOffsetVector& offsets) const {
  const Eval ev = evaluate(offsets);
  const int n_sc = layout_.n_small_cells();
  son::KpiPoint k;
  k.macro_ul_load.resize(n_sc);
  k.sc_ul_load = ev.sc_ul_load;
  k.sc_outage = ev.sc_outage;
  std::map<CellId, int> sector_slot;
  for (std::size_t i = 0; i < layout_.zone_a_sector_ids.size(); ++i) {
    sector_slot[layout_.zone_a_sector_ids[i]] = static_cast<int>(i);
  }
  for (int s = 0; s < n_sc; ++s) {
    k.macro_ul_load(s) = ev.sector_ul_load(sector_slot.at(layout_.small_cells[s].parent_sector));
  }
  return k;
}

son::KpiFn AnalyticModel::kpi_fn() const {
  return [this](const netmodel::PowerOffsetVector& offsets) { return kpis(offsets); };
}

std::optional<double> AnalyticModel::capacity_bps(CellId cell,
                                                  const netmodel::PowerOffsetVector& offsets,
                                                  Direction direction) const {
  std::vector<double> rates;
  for (int i = 0; i < static_cast<int>(pixels_.size()); ++i) {
    if (best_cell(i, offsets) != cell) continue;
    rates.push_back(direction == Direction::ul ? rate_ul_(cell, i) : rate_dl_(cell, i));
  }
  return analytic_capacity(rates);
}

double AnalyticModel::load(CellId cell, const netmodel::PowerOffsetVector& offsets,
                           Direction direction) const {
  const double e_sigma_bits = traffic_.mean_file_mbits * 1e6;
  const double frac = direction == Direction::ul ? traffic_.ul_fraction : 1.0 - traffic_.ul_fraction;
  const double offered = lambda_ * frac * e_sigma_bits;
  double rho = 0.0;
  for (int i = 0; i < static_cast<int>(pixels_.size()); ++i) {
    if (arrival_w_[i] == 0.0 || best_cell(i, offsets) != cell) continue;
    const double rate = direction == Direction::ul ? rate_ul_(cell, i) : rate_dl_(cell, i);
    rho += arrival_w_[i] * offered / rate;
  }
  return rho;
}

}  // namespace hetsim::flowsim
