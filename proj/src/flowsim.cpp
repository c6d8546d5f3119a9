#include "hetsim/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "hetsim/rng.hpp"

namespace hetsim::flowsim {

std::optional<double> measure_load(const WindowAccumulator& acc, Direction direction) {
  if (!acc.complete || acc.window_length_s <= 0.0) return std::nullopt;
  const double busy = direction == Direction::ul ? acc.ul_busy_time_s : acc.dl_busy_time_s;
  return std::clamp(busy / acc.window_length_s, 0.0, 1.0);
}

std::optional<double> measure_outage(const WindowAccumulator& acc) {
  if (!acc.complete || acc.outage_observations == 0) return std::nullopt;
  return static_cast<double>(acc.outage_below) / acc.outage_observations;
}

std::optional<double> mean_ftt(const WindowAccumulator& acc, Direction direction) {
  if (!acc.complete) return std::nullopt;
  const double sum = direction == Direction::ul ? acc.ftt_sum_ul_s : acc.ftt_sum_dl_s;
  const int count = direction == Direction::ul ? acc.ftt_count_ul : acc.ftt_count_dl;
  if (count == 0) return std::nullopt;
  return sum / count;
}

const CellWindowKpis* KpiWindow::find(CellId cell) const {
  for (const auto& c : cells) {
    if (c.cell == cell) return &c;
  }
  return nullptr;
}

std::optional<double> analytic_capacity(std::span<const double> rates_in_region_bps) {
  if (rates_in_region_bps.empty()) return std::nullopt;
  double inv_sum = 0.0;
  for (double r : rates_in_region_bps) inv_sum += 1.0 / r;
  return static_cast<double>(rates_in_region_bps.size()) / inv_sum;
}

std::uint64_t SimulationTrace::digest() const {
  // FNV-1a over a text rendering of windows and flows.
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  char buf[64];
  auto mixd = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g;", v);
    mix(buf);
  };
  for (const auto& w : windows) {
    mixd(w.t_start);
    for (const auto& c : w.cells) {
      mixd(c.ul_load.value_or(-1.0));
      mixd(c.dl_load.value_or(-1.0));
      mixd(c.outage.value_or(-1.0));
      mixd(c.mean_ftt_ul_s.value_or(-1.0));
      mixd(c.mean_ftt_dl_s.value_or(-1.0));
      mixd(c.active_users);
    }
  }
  for (const auto& f : flows) {
    mixd(static_cast<double>(f.id));
    mixd(f.arrival_s);
    mixd(std::isnan(f.departure_s) ? -1.0 : f.departure_s);
    mixd(f.volume_bits);
    mixd(f.tx_power_time_ws);
    mixd(f.rx_power_time_ws);
  }
  return h;
}

namespace {

constexpr double kDepletedBits = 1e-2;
constexpr double kMinRate = 1e-9;

enum class EventType { arrival, departure, tick, window };

struct Event {
  double t = 0.0;
  std::uint64_t seq = 0;
  EventType type = EventType::tick;
  std::uint64_t version = 0;  // departure candidates only

  bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct ActiveFlow {
  FlowRecord rec;
  int slot = -1;
  int prb_count = 0;
  double rate_bps = 0.0;
  double tx_power_w = 0.0;       // UL direction only
  double prb_power_w = 0.0;      // UL per-PRB transmit power
  double incident_w = 0.0;       // duty-weighted incident DL power
  double loss_db = 0.0;          // coupling loss to the serving cell
  double dl_sinr_eff = 0.0;      // duty-mixed DL SINR (sinr outage mode)
};

struct BgUser {
  int pixel = 0;
  double prb_power_w = 0.0;
};

}  // namespace

struct Simulator::Impl {
  const netmodel::NetworkLayout& layout;
  radio::RadioConfig radio_cfg;
  TrafficConfig traffic;
  SimConfig sim;
  exposure::ExposureParams exposure_params;
  std::uint64_t seed;

  netmodel::ShadowingField shadow;
  netmodel::GainTable gains;
  radio::FadingModel fading;

  std::vector<int> zone_a_pixels;                 // arrival support
  std::vector<std::vector<int>> sector_pixels;    // macro-only region per sector
  std::vector<CellId> zone_a_cells;               // sorted
  Eigen::VectorXd incident_w_pixel;               // always-on DL incident power

  // --- run state ---
  double now = 0.0;
  std::uint64_t event_seq = 0;
  std::uint64_t alloc_version = 0;
  std::int64_t next_flow_id = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue;
  std::map<std::int64_t, ActiveFlow> flows;
  std::vector<std::vector<std::int64_t>> cell_ul_flows;  // sorted by id
  std::vector<std::vector<std::int64_t>> cell_dl_flows;
  std::vector<std::vector<BgUser>> bg_users;  // per cell (zone-B sectors only)
  std::vector<WindowAccumulator> window_acc;  // per zone-A cell slot
  std::map<CellId, int> zone_a_slot;
  int window_index = 0;
  double warmup_s = 0.0;
  netmodel::PowerOffsetVector offsets;
  SeededRng arrival_rng{0};
  SimulationTrace trace;

  // per-recompute caches
  struct TxEntry {
    int pixel = 0;
    double prb_power_w = 0.0;
  };
  std::vector<std::vector<TxEntry>> ul_tx;     // per cell, slot order
  std::vector<double> dl_prb_power_w;          // per cell, 0 if DL-idle
  std::vector<std::uint8_t> dl_active;

  Impl(const netmodel::NetworkLayout& l, const radio::RadioConfig& r, const TrafficConfig& t,
       const SimConfig& s, const exposure::ExposureParams& e, std::uint64_t sd)
      : layout(l),
        radio_cfg(r),
        traffic(t),
        sim(s),
        exposure_params(e),
        seed(sd),
        shadow(hash_mix(sd, 0x5ad0ULL), l.config.shadowing_sigma_db),
        gains(l, &shadow),
        fading(r.make_fading()),
        offsets(netmodel::PowerOffsetVector::uniform(l, 0.0)),
        trace{} {
    sector_pixels.resize(layout.n_sectors());
    for (int pix = 0; pix < layout.n_pixels(); ++pix) {
      const CellId sector = netmodel::best_macro_sector(layout.pixel_center(pix), layout);
      sector_pixels[sector].push_back(pix);
      if (layout.is_zone_a_sector(sector)) zone_a_pixels.push_back(pix);
    }
    for (CellId c = 0; c < layout.n_cells(); ++c) {
      if (layout.is_zone_a_cell(c)) zone_a_cells.push_back(c);
    }
    for (int i = 0; i < static_cast<int>(zone_a_cells.size()); ++i) {
      zone_a_slot[zone_a_cells[i]] = i;
    }
    incident_w_pixel = Eigen::VectorXd::Zero(layout.n_pixels());
    const double r_abs = mute_ratio();
    for (int pix = 0; pix < layout.n_pixels(); ++pix) {
      double acc = 0.0;
      for (CellId c = 0; c < layout.n_cells(); ++c) {
        const double duty = is_macro(c) ? 1.0 - r_abs : 1.0;
        acc += duty * dbm_to_watt(layout.pilot_dbm(c)) * gains.linear(c, pix);
      }
      incident_w_pixel(pix) = acc;
    }
  }

  double mute_ratio() const { return radio_cfg.grid.mute_ratio(); }
  bool is_macro(CellId c) const { return !layout.is_small_cell(c); }

  void push_event(double t, EventType type, std::uint64_t version = 0) {
    queue.push({t, ++event_seq, type, version});
  }

  void schedule_next_arrival() {
    if (traffic.lambda_per_s <= 0.0 || zone_a_pixels.empty()) return;
    push_event(now + arrival_rng.exponential(1.0 / traffic.lambda_per_s), EventType::arrival);
  }

  // ---- allocation + rates -------------------------------------------------

  void recompute() {
    ++alloc_version;
    const int n_cells = layout.n_cells();
    const int n_prb = radio_cfg.grid.n_prb;
    const double w_prb = radio_cfg.grid.prb_bandwidth_hz;
    const double noise = radio_cfg.noise_w_per_hz();
    const double r_abs = mute_ratio();

    ul_tx.assign(n_cells, {});
    dl_prb_power_w.assign(n_cells, 0.0);
    dl_active.assign(n_cells, 0);

    // UL allocation and power control per cell; zone-B background users take
    // the slots after any real flows in their cell. With more users than
    // PRBs the floor share is 0; the slot rotation time-shares who holds a
    // PRB across allocation epochs.
    for (CellId c = 0; c < n_cells; ++c) {
      const auto& ulf = cell_ul_flows[c];
      const int n_bg = static_cast<int>(bg_users[c].size());
      const int n_tx = static_cast<int>(ulf.size()) + n_bg;
      if (n_tx == 0) continue;
      const int rotation =
          n_tx > n_prb ? static_cast<int>(alloc_version % static_cast<std::uint64_t>(n_tx)) : 0;
      auto& txs = ul_tx[c];
      txs.assign(n_tx, {0, 0.0});
      for (int i = 0; i < static_cast<int>(ulf.size()); ++i) {
        ActiveFlow& f = flows.at(ulf[i]);
        const int slot = (i + rotation) % n_tx;
        f.slot = slot;
        f.prb_count = radio::rr_prb_count(n_prb, n_tx, slot);
        if (f.prb_count == 0) {
          f.tx_power_w = 0.0;
          f.prb_power_w = 0.0;
          continue;
        }
        const double total_dbm =
            radio::ul_tx_power_dbm(radio_cfg.power_control, f.prb_count, f.loss_db);
        f.tx_power_w = dbm_to_watt(total_dbm);
        f.prb_power_w = f.tx_power_w / f.prb_count;
        txs[slot] = {f.rec.pixel, f.prb_power_w};
      }
      for (int b = 0; b < n_bg; ++b) {
        const int slot = (static_cast<int>(ulf.size()) + b + rotation) % n_tx;
        const int prbs = radio::rr_prb_count(n_prb, n_tx, slot);
        if (prbs == 0) {
          bg_users[c][b].prb_power_w = 0.0;
          continue;
        }
        const double loss = gains.loss_db(c, bg_users[c][b].pixel);
        const double total_dbm = radio::ul_tx_power_dbm(radio_cfg.power_control, prbs, loss);
        bg_users[c][b].prb_power_w = dbm_to_watt(total_dbm) / prbs;
        txs[slot] = {bg_users[c][b].pixel, bg_users[c][b].prb_power_w};
      }
    }

    // DL activity: a cell transmits on all PRBs while it has DL traffic.
    for (CellId c = 0; c < n_cells; ++c) {
      if (!cell_dl_flows[c].empty() || !bg_users[c].empty()) {
        dl_active[c] = 1;
        dl_prb_power_w[c] = dbm_to_watt(layout.pilot_dbm(c)) / n_prb;
      }
    }

    // DL slot assignment (same rotation rule under overload).
    for (CellId c = 0; c < n_cells; ++c) {
      const auto& dlf = cell_dl_flows[c];
      const int n = static_cast<int>(dlf.size());
      const int rotation =
          n > n_prb ? static_cast<int>(alloc_version % static_cast<std::uint64_t>(n)) : 0;
      for (int i = 0; i < n; ++i) {
        ActiveFlow& f = flows.at(dlf[i]);
        f.slot = (i + rotation) % n;
        f.prb_count = radio::rr_prb_count(n_prb, n, f.slot);
      }
    }

    // Rates; incident DL power is static per pixel (exposure counts every
    // cell's DL radiation with the ABS duty factor, not the queue state).
    const double beta = radio_cfg.beta_efficiency;
    const double eta = radio_cfg.eta_max_bps_hz;
    for (auto& [id, f] : flows) {
      const CellId c = f.rec.serving_cell;
      if (sim.fixed_rate_bps > 0.0) {
        f.rate_bps = sim.fixed_rate_bps * f.prb_count / n_prb;
        f.incident_w = 0.0;  // queueing-oracle mode: no radio, no exposure
        f.dl_sinr_eff = 0.0;
        continue;
      }
      if (f.rec.direction == Direction::ul) {
        const double g_sig = gains.linear(c, f.rec.pixel);
        double rate = 0.0;
        const int n_tx = static_cast<int>(ul_tx[c].size());
        for (int k = f.slot; k < n_prb; k += n_tx) {
          double denom = w_prb * noise;
          if (sim.interference) {
            for (CellId o = 0; o < n_cells; ++o) {
              if (o == c || ul_tx[o].empty()) continue;
              const TxEntry& tx = ul_tx[o][k % ul_tx[o].size()];
              denom += tx.prb_power_w * gains.linear(c, tx.pixel);
            }
          }
          const double sinr = f.prb_power_w * g_sig / denom;
          rate += w_prb * fading.mean_efficiency(sinr, beta, eta);
        }
        f.rate_bps = rate;
      } else {
        const double sig = dl_prb_power_w[c] * gains.linear(c, f.rec.pixel);
        double i_norm = 0.0;
        double i_prot = 0.0;
        if (sim.interference) {
          for (CellId o = 0; o < n_cells; ++o) {
            if (o == c || !dl_active[o]) continue;
            const double p = dl_prb_power_w[o] * gains.linear(o, f.rec.pixel);
            i_norm += p;
            if (layout.is_small_cell(o)) i_prot += p;
          }
        }
        const double sd_norm = sig / (w_prb * noise + i_norm);
        if (is_macro(c)) {
          f.rate_bps = f.prb_count * w_prb * (1.0 - r_abs) *
                       fading.mean_efficiency(sd_norm, beta, eta);
          f.dl_sinr_eff = sd_norm;
        } else {
          const double sd_prot = sig / (w_prb * noise + i_prot);
          f.rate_bps = f.prb_count * w_prb *
                       (r_abs * fading.mean_efficiency(sd_prot, beta, eta) +
                        (1.0 - r_abs) * fading.mean_efficiency(sd_norm, beta, eta));
          f.dl_sinr_eff = r_abs * sd_prot + (1.0 - r_abs) * sd_norm;
        }
      }
      f.incident_w = incident_w_pixel(f.rec.pixel);
    }

    schedule_departure_candidate();
  }

  void schedule_departure_candidate() {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [id, f] : flows) {
      if (f.rate_bps > kMinRate) {
        best = std::min(best, f.rec.volume_remaining_bits / f.rate_bps);
      }
    }
    if (std::isfinite(best)) {
      push_event(now + best, EventType::departure, alloc_version);
    }
  }

  // ---- time integration ---------------------------------------------------

  void drain(double dt) {
    if (dt <= 0.0) return;
    const bool measured = now >= warmup_s;
    for (auto& [id, f] : flows) {
      f.rec.volume_remaining_bits = std::max(0.0, f.rec.volume_remaining_bits - f.rate_bps * dt);
      f.rec.tx_power_time_ws += f.tx_power_w * dt;
      f.rec.rx_power_time_ws += f.incident_w * dt;
      if (measured && layout.is_zone_a_cell(f.rec.serving_cell)) {
        trace.ledger.accumulate(id,
                                layout.is_small_cell(f.rec.serving_cell)
                                    ? exposure::CellGroup::sc
                                    : exposure::CellGroup::macro,
                                dt, f.tx_power_w, f.incident_w);
      }
    }
    for (std::size_t i = 0; i < zone_a_cells.size(); ++i) {
      const CellId c = zone_a_cells[i];
      WindowAccumulator& acc = window_acc[i];
      if (!cell_ul_flows[c].empty()) acc.ul_busy_time_s += dt;
      if (!cell_dl_flows[c].empty()) acc.dl_busy_time_s += dt;
      acc.active_user_time += dt * (cell_ul_flows[c].size() + cell_dl_flows[c].size());
    }
  }

  // ---- event handlers -----------------------------------------------------

  void handle_arrival() {
    const int pix = zone_a_pixels[arrival_rng.integer(zone_a_pixels.size())];
    const Point base = layout.pixel_center(pix);
    const double res = layout.config.grid_resolution_m;
    const Point loc{base.x + arrival_rng.uniform(-0.5, 0.5) * res,
                    base.y + arrival_rng.uniform(-0.5, 0.5) * res};
    const Direction dir =
        arrival_rng.bernoulli(traffic.ul_fraction) ? Direction::ul : Direction::dl;
    const double bits = arrival_rng.exponential(traffic.mean_file_mbits * 1e6);

    ActiveFlow f;
    f.rec.id = next_flow_id++;
    f.rec.location = loc;
    f.rec.pixel = pix;
    f.rec.direction = dir;
    f.rec.volume_bits = bits;
    f.rec.volume_remaining_bits = bits;
    f.rec.arrival_s = now;
    f.rec.serving_cell = netmodel::best_server_pixel(pix, offsets, layout, gains);
    f.loss_db = gains.loss_db(f.rec.serving_cell, pix);
    auto& list = dir == Direction::ul ? cell_ul_flows[f.rec.serving_cell]
                                      : cell_dl_flows[f.rec.serving_cell];
    list.push_back(f.rec.id);  // ids are increasing, so the list stays sorted
    flows.emplace(f.rec.id, std::move(f));
    schedule_next_arrival();
    recompute();
  }

  void complete_depleted_flows() {
    bool removed = false;
    for (auto it = flows.begin(); it != flows.end();) {
      ActiveFlow& f = it->second;
      if (f.rec.volume_remaining_bits <= kDepletedBits && f.rate_bps > kMinRate) {
        f.rec.volume_remaining_bits = 0.0;
        f.rec.done = true;
        f.rec.departure_s = now;
        const CellId c = f.rec.serving_cell;
        auto& list = f.rec.direction == Direction::ul ? cell_ul_flows[c] : cell_dl_flows[c];
        list.erase(std::find(list.begin(), list.end(), f.rec.id));
        auto slot_it = zone_a_slot.find(c);
        if (slot_it != zone_a_slot.end()) {
          WindowAccumulator& acc = window_acc[slot_it->second];
          const double ftt = now - f.rec.arrival_s;
          if (f.rec.direction == Direction::ul) {
            acc.ftt_sum_ul_s += ftt;
            acc.ftt_count_ul += 1;
          } else {
            acc.ftt_sum_dl_s += ftt;
            acc.ftt_count_dl += 1;
          }
        }
        trace.flows.push_back(f.rec);
        it = flows.erase(it);
        removed = true;
      } else {
        ++it;
      }
    }
    if (removed) {
      recompute();
    } else {
      schedule_departure_candidate();  // candidate fired early by rounding
    }
  }

  void handle_tick() {
    // Outage observations: one per active DL flow in a zone-A cell. The rate
    // reading uses the peak (full-allocation) rate, the monotone image of the
    // SINR-threshold definition.
    const int n_prb = radio_cfg.grid.n_prb;
    for (const auto& [id, f] : flows) {
      if (f.rec.direction != Direction::dl) continue;
      auto slot_it = zone_a_slot.find(f.rec.serving_cell);
      if (slot_it == zone_a_slot.end()) continue;
      WindowAccumulator& acc = window_acc[slot_it->second];
      acc.outage_observations += 1;
      bool below;
      if (sim.outage_mode == "sinr" && sim.fixed_rate_bps <= 0.0) {
        below = f.dl_sinr_eff < db_to_linear(sim.sinr_threshold_db);
      } else if (sim.fixed_rate_bps > 0.0) {
        below = sim.fixed_rate_bps < traffic.target_rate_bps;
      } else {
        const double peak_rate =
            f.prb_count > 0 ? f.rate_bps * n_prb / f.prb_count : 0.0;
        below = peak_rate < traffic.target_rate_bps;
      }
      if (below) acc.outage_below += 1;
    }
    push_event(now + sim.tick_s, EventType::tick);
  }

  void resample_zone_b() {
    if (!sim.zone_b_background) return;
    // Intensity matched to the zone-A per-cell mean active count of the
    // window that just closed.
    double mean_active = 0.0;
    for (const auto& acc : window_acc) {
      mean_active += acc.active_user_time / sim.window_s;
    }
    mean_active /= static_cast<double>(window_acc.size());
    for (CellId c = 0; c < layout.n_sectors(); ++c) {
      if (layout.is_zone_a_sector(c)) continue;
      SeededRng rng(hash_mix(seed, 0x20feULL, static_cast<std::uint64_t>(window_index)),
                    static_cast<std::uint64_t>(c));
      const int count = std::min(rng.poisson(mean_active), traffic.zone_b_user_cap);
      auto& users = bg_users[c];
      users.clear();
      const auto& pix = sector_pixels[c];
      if (pix.empty()) continue;
      for (int u = 0; u < count; ++u) {
        users.push_back({pix[rng.integer(pix.size())], 0.0});
      }
    }
  }

  KpiWindow finalize_window() {
    KpiWindow w;
    w.index = window_index;
    w.t_start = window_index * sim.window_s;
    w.t_end = w.t_start + sim.window_s;
    w.complete = true;
    for (std::size_t i = 0; i < zone_a_cells.size(); ++i) {
      WindowAccumulator& acc = window_acc[i];
      acc.window_length_s = sim.window_s;
      acc.complete = true;
      CellWindowKpis k;
      k.cell = zone_a_cells[i];
      k.ul_load = measure_load(acc, Direction::ul);
      k.dl_load = measure_load(acc, Direction::dl);
      k.outage = measure_outage(acc);
      k.mean_ftt_ul_s = mean_ftt(acc, Direction::ul);
      k.mean_ftt_dl_s = mean_ftt(acc, Direction::dl);
      k.active_users = acc.active_user_time / sim.window_s;
      k.outage_obs = acc.outage_observations;
      k.outage_below = acc.outage_below;
      w.cells.push_back(k);
    }
    return w;
  }

  SimulationTrace run(const netmodel::PowerOffsetVector& initial_offsets, double horizon_s,
                      const WindowHook& hook) {
    const int n_windows = static_cast<int>(std::round(horizon_s / sim.window_s));
    require(n_windows >= 1 && std::abs(n_windows * sim.window_s - horizon_s) < 1e-9,
            ErrorCategory::config, "run: horizon must be a positive multiple of the window");
    const int warmup_windows = static_cast<int>(std::lround(sim.warmup_fraction * n_windows));
    warmup_s = warmup_windows * sim.window_s;
    require(horizon_s > warmup_s, ErrorCategory::config, "run: horizon must exceed warmup");

    offsets = initial_offsets;
    trace = SimulationTrace{};
    trace.horizon_s = horizon_s;
    trace.warmup_s = warmup_s;
    trace.seed = seed;
    trace.ledger = exposure::ExposureLedger(exposure_params);
    trace.ledger.set_horizon(horizon_s - warmup_s);

    now = 0.0;
    event_seq = 0;
    alloc_version = 0;
    next_flow_id = 0;
    window_index = 0;
    queue = {};
    flows.clear();
    cell_ul_flows.assign(layout.n_cells(), {});
    cell_dl_flows.assign(layout.n_cells(), {});
    bg_users.assign(layout.n_cells(), {});
    window_acc.assign(zone_a_cells.size(), {});
    arrival_rng = SeededRng(seed, 0xa881ULL);

    push_event(sim.window_s, EventType::window);
    push_event(sim.tick_s, EventType::tick);
    schedule_next_arrival();
    recompute();

    while (!queue.empty()) {
      const Event ev = queue.top();
      if (ev.t > horizon_s + 1e-12) break;
      queue.pop();
      require(ev.t >= now - 1e-9, ErrorCategory::internal, "run: event-queue time regression");
      drain(ev.t - now);
      now = std::max(now, ev.t);
      switch (ev.type) {
        case EventType::arrival:
          handle_arrival();
          break;
        case EventType::departure:
          if (ev.version == alloc_version) complete_depleted_flows();
          break;
        case EventType::tick:
          handle_tick();
          break;
        case EventType::window: {
          KpiWindow w = finalize_window();
          if (hook) hook(w, offsets);
          trace.windows.push_back(std::move(w));
          resample_zone_b();
          window_acc.assign(zone_a_cells.size(), {});
          window_index += 1;
          if (window_index < n_windows) push_event((window_index + 1) * sim.window_s,
                                                   EventType::window);
          recompute();
          break;
        }
      }
    }
    drain(horizon_s - now);
    now = horizon_s;

    for (const auto& [id, f] : flows) trace.flows.push_back(f.rec);  // residual flows
    std::sort(trace.flows.begin(), trace.flows.end(),
              [](const FlowRecord& a, const FlowRecord& b) { return a.id < b.id; });
    trace.final_offsets = offsets;
    return trace;
  }
};

Simulator::Simulator(const netmodel::NetworkLayout& layout, const radio::RadioConfig& radio,
                     const TrafficConfig& traffic, const SimConfig& sim,
                     const exposure::ExposureParams& exposure_params, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(layout, radio, traffic, sim, exposure_params, seed)) {}

Simulator::~Simulator() = default;

SimulationTrace Simulator::run(const netmodel::PowerOffsetVector& offsets, double horizon_s,
                               const WindowHook& hook) {
  return impl_->run(offsets, horizon_s, hook);
}

const netmodel::GainTable& Simulator::gains() const { return impl_->gains; }
const netmodel::ShadowingField& Simulator::shadowing() const { return impl_->shadow; }

}  // namespace hetsim::flowsim
