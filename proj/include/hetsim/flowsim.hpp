#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetsim/common.hpp"
#include "hetsim/exposure.hpp"
#include "hetsim/netmodel.hpp"
#include "hetsim/radio.hpp"

namespace hetsim::flowsim {

struct TrafficConfig {
  double lambda_per_s = 5.0;       // Poisson arrivals aggregated over zone A
  double mean_file_mbits = 15.0;   // exponential, both directions
  double ul_fraction = 0.3;        // probability an arrival is an upload
  int zone_b_user_cap = 8;
  double target_rate_bps = 1.5e6;  // coverage target for the outage reading
};

struct SimConfig {
  double tick_s = 0.1;             // observation cadence
  double window_s = 6.0;           // KPI / SON iteration period
  double warmup_fraction = 0.2;    // leading fraction excluded from aggregates
  double fixed_rate_bps = 0.0;     // >0 bypasses the radio (queueing oracle mode)
  bool interference = true;
  bool zone_b_background = true;
  std::string outage_mode = "rate";  // "rate" or "sinr"
  double sinr_threshold_db = -3.0;   // used by outage_mode == "sinr"
};

struct FlowRecord {
  std::int64_t id = 0;
  Point location;
  int pixel = 0;
  CellId serving_cell = 0;
  Direction direction = Direction::dl;
  double volume_bits = 0.0;
  double volume_remaining_bits = 0.0;
  double arrival_s = 0.0;
  double departure_s = std::numeric_limits<double>::quiet_NaN();
  double tx_power_time_ws = 0.0;  // UL transmit power-time integral
  double rx_power_time_ws = 0.0;  // incident DL power-time integral
  bool done = false;

  double duration_s(double fallback_end_s) const {
    return (done ? departure_s : fallback_end_s) - arrival_s;
  }
  double mean_tx_power_w(double fallback_end_s) const {
    const double d = duration_s(fallback_end_s);
    return d > 0.0 ? tx_power_time_ws / d : 0.0;
  }
};

// Raw per-(cell, window) inputs behind the KPI readings.
struct WindowAccumulator {
  double window_length_s = 0.0;
  bool complete = false;
  double ul_busy_time_s = 0.0;
  double dl_busy_time_s = 0.0;
  int outage_below = 0;
  int outage_observations = 0;
  double ftt_sum_ul_s = 0.0;
  int ftt_count_ul = 0;
  double ftt_sum_dl_s = 0.0;
  int ftt_count_dl = 0;
  double active_user_time = 0.0;  // integral of the active-user count
};

// Busy-time fraction of the cell's resources, clipped to [0,1]. Incomplete
// window -> no-measurement.
std::optional<double> measure_load(const WindowAccumulator& acc, Direction direction);

// Fraction of active-user observations below the coverage target. Zero
// observations -> no-measurement (distinct from 0).
std::optional<double> measure_outage(const WindowAccumulator& acc);

std::optional<double> mean_ftt(const WindowAccumulator& acc, Direction direction);

struct CellWindowKpis {
  CellId cell = 0;
  std::optional<double> ul_load;
  std::optional<double> dl_load;
  std::optional<double> outage;
  std::optional<double> mean_ftt_ul_s;
  std::optional<double> mean_ftt_dl_s;
  double active_users = 0.0;  // time-averaged
  int outage_obs = 0;
  int outage_below = 0;
};

struct KpiWindow {
  int index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  bool complete = false;
  std::vector<CellWindowKpis> cells;  // zone-A cells, ascending cell id

  const CellWindowKpis* find(CellId cell) const;
};

struct SimulationTrace {
  double horizon_s = 0.0;
  double warmup_s = 0.0;
  std::uint64_t seed = 0;
  std::vector<KpiWindow> windows;
  std::vector<FlowRecord> flows;  // completed first-come order, then residual
  exposure::ExposureLedger ledger{exposure::ExposureParams{}};
  netmodel::PowerOffsetVector final_offsets;

  // byte-stable digest for the determinism contract
  std::uint64_t digest() const;
};

// Event-driven flow-level engine. Deterministic per seed: arrivals, file
// sizes, directions and zone-B background draws come from named substreams.
class Simulator {
 public:
  Simulator(const netmodel::NetworkLayout& layout, const radio::RadioConfig& radio,
            const TrafficConfig& traffic, const SimConfig& sim,
            const exposure::ExposureParams& exposure_params, std::uint64_t seed);
  ~Simulator();

  // Called at each completed measurement window; may update the offsets
  // (SON). New attachments use the updated vector.
  using WindowHook = std::function<void(const KpiWindow&, netmodel::PowerOffsetVector&)>;

  SimulationTrace run(const netmodel::PowerOffsetVector& offsets, double horizon_s,
                      const WindowHook& hook = {});

  const netmodel::GainTable& gains() const;
  const netmodel::ShadowingField& shadowing() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Harmonic-mean rate over a coverage region ("load equals one" capacity).
// Empty region -> no-measurement.
std::optional<double> analytic_capacity(std::span<const double> rates_in_region_bps);

}  // namespace hetsim::flowsim
