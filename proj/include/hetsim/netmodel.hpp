#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetsim/common.hpp"
#include "hetsim/rng.hpp"

namespace hetsim::netmodel {

// Parabolic azimuth pattern for tri-sector macros. backoff_db = 0 makes the
// pattern flat (used by single-cell test layouts).
struct AntennaPattern {
  double front_gain_dbi = 14.0;
  double beamwidth_deg = 70.0;
  double backoff_db = 20.0;
};

struct Sector {
  int site = 0;
  double azimuth_deg = 0.0;
};

struct SmallCell {
  Point position;
  int parent_sector = 0;
};

struct DeploymentConfig {
  double inter_site_distance_m = 500.0;
  int rings = 2;
  int sectors_per_site = 3;
  int sc_per_zone_a_sector = 4;
  std::uint64_t placement_seed = 1;
  double grid_resolution_m = 10.0;
  double area_margin_m = 350.0;
  double sc_annulus_lo = 0.7;   // fraction of the sector cell-edge radius
  double sc_annulus_hi = 0.9;
  double sc_min_separation_m = 30.0;
  AntennaPattern macro_antenna;
  double sc_antenna_gain_dbi = 5.0;
  double ue_antenna_gain_dbi = 0.0;
  double min_link_distance_m = 10.0;        // SC links
  double macro_min_link_distance_m = 10.0;  // proxy for mast elevation
  double shadowing_sigma_db = 6.0;
  double macro_pilot_dbm = 46.0;  // also the macro DL Tx power
  double sc_pilot_dbm = 30.0;     // also the SC DL Tx power
};

// Immutable deployment. Cell ids: sectors first (site-major), then small
// cells; all zone-A sectors belong to the central site.
class NetworkLayout {
 public:
  DeploymentConfig config;
  std::vector<Point> sites;
  std::vector<Sector> sectors;
  std::vector<SmallCell> small_cells;
  Rect area_bounds;
  std::vector<int> zone_a_sector_ids;  // sorted

  int n_sectors() const { return static_cast<int>(sectors.size()); }
  int n_small_cells() const { return static_cast<int>(small_cells.size()); }
  int n_cells() const { return n_sectors() + n_small_cells(); }
  bool is_small_cell(CellId cell) const { return cell >= n_sectors(); }
  int sc_index(CellId cell) const { return cell - n_sectors(); }
  CellId sc_cell_id(int sc_index) const { return n_sectors() + sc_index; }
  Point cell_position(CellId cell) const {
    return is_small_cell(cell) ? small_cells[sc_index(cell)].position
                               : sites[sectors[cell].site];
  }
  bool is_zone_a_sector(CellId cell) const;
  // Zone-A cells = the zone-A sectors plus every small cell (SCs exist only
  // in zone A).
  bool is_zone_a_cell(CellId cell) const {
    return is_small_cell(cell) || is_zone_a_sector(cell);
  }
  double pilot_dbm(CellId cell) const {
    return is_small_cell(cell) ? config.sc_pilot_dbm : config.macro_pilot_dbm;
  }

  // Pixel grid over area_bounds, row-major with x fastest.
  int grid_nx() const;
  int grid_ny() const;
  int n_pixels() const { return grid_nx() * grid_ny(); }
  int pixel_of(const Point& p) const;
  Point pixel_center(int pixel) const;

  // Text serialization used by the determinism contract.
  void serialize(std::ostream& os) const;
};

NetworkLayout build_layout(const DeploymentConfig& config);

enum class LinkClass { macro_to_ue, sc_to_ue };

// 128.1 + 37.6*log10(R_km) for macros, 140.7 + 36.7*log10(R_km) for SCs;
// distance floored at min_distance_m.
double pathloss_db(LinkClass link_class, double distance_m, double min_distance_m = 10.0);

double sector_antenna_gain_db(const AntennaPattern& pattern, double bearing_deg);

struct LinkGain {
  double pathloss_db = 0.0;
  double shadowing_db = 0.0;
  double antenna_gain_db = 0.0;
  double total_gain_db = 0.0;  // antenna - pathloss - shadowing
};

// Static shadowing field frozen per (pixel, cell) for a run.
class ShadowingField {
 public:
  ShadowingField() = default;
  ShadowingField(std::uint64_t seed, double sigma_db) : seed_(seed), sigma_db_(sigma_db) {}
  double at(int pixel, CellId cell) const {
    if (sigma_db_ == 0.0) return 0.0;
    return sigma_db_ * frozen_standard_normal(seed_, static_cast<std::uint64_t>(pixel),
                                              static_cast<std::uint64_t>(cell) + 0x51ceULL);
  }
  double sigma_db() const { return sigma_db_; }

 private:
  std::uint64_t seed_ = 0;
  double sigma_db_ = 0.0;
};

LinkGain link_gain(const NetworkLayout& layout, CellId cell, const Point& location,
                   const ShadowingField* shadowing = nullptr, int pixel = -1);

// Precomputed linear total gains, cells x pixels. Column-major: one pixel's
// gains to every cell are contiguous.
class GainTable {
 public:
  GainTable() = default;
  GainTable(const NetworkLayout& layout, const ShadowingField* shadowing);
  double linear(CellId cell, int pixel) const { return gains_(cell, pixel); }
  double loss_db(CellId cell, int pixel) const { return -linear_to_db(gains_(cell, pixel)); }
  const Eigen::MatrixXd& matrix() const { return gains_; }

 private:
  Eigen::MatrixXd gains_;
};

// SON decision variable: one offset (CIO, dB) per small cell, projected into
// [lower, upper]; pilots are fixed and never optimized.
class PowerOffsetVector {
 public:
  PowerOffsetVector() = default;
  PowerOffsetVector(int n_entries, double cio_db, double lower_db, double upper_db,
                    double macro_pilot_dbm, double sc_pilot_dbm);
  static PowerOffsetVector uniform(const NetworkLayout& layout, double cio_db,
                                   double lower_db = -2.0, double upper_db = 12.0);

  int n_entries() const { return static_cast<int>(cio_db_.size()); }
  double entry(int sc_index) const { return cio_db_(sc_index); }
  void set_entry(int sc_index, double value);  // projects into bounds
  double project(double value) const;
  double lower_db() const { return lower_db_; }
  double upper_db() const { return upper_db_; }
  double macro_pilot_dbm() const { return macro_pilot_dbm_; }
  double sc_pilot_dbm() const { return sc_pilot_dbm_; }
  const Eigen::VectorXd& entries() const { return cio_db_; }
  double norm() const { return cio_db_.norm(); }

  double cio_db(const NetworkLayout& layout, CellId cell) const {
    return layout.is_small_cell(cell) ? cio_db_(layout.sc_index(cell)) : 0.0;
  }
  // Pilot + CIO, the quantity ranked by best-server attachment.
  double selection_dbm(const NetworkLayout& layout, CellId cell) const {
    return layout.pilot_dbm(cell) + cio_db(layout, cell);
  }

 private:
  Eigen::VectorXd cio_db_;
  double lower_db_ = -2.0;
  double upper_db_ = 12.0;
  double macro_pilot_dbm_ = 46.0;
  double sc_pilot_dbm_ = 30.0;
};

// argmax over cells of total gain + pilot + CIO, ties to the lowest cell id.
CellId best_server(const Point& location, const PowerOffsetVector& offsets,
                   const NetworkLayout& layout, const ShadowingField* shadowing = nullptr);
CellId best_server_pixel(int pixel, const PowerOffsetVector& offsets, const NetworkLayout& layout,
                         const GainTable& gains);

// Best macro sector ignoring SCs and shadowing (zone definitions, SC
// placement validation, zone-B user placement).
CellId best_macro_sector(const Point& location, const NetworkLayout& layout);

// Q_meas,s + Q_Hyst < Q_meas,n - (CIO_s - CIO_n)
bool handover_trigger(CellId serving, CellId candidate, double rsrp_serving_dbm,
                      double rsrp_candidate_dbm, double hysteresis_db,
                      const PowerOffsetVector& offsets, const NetworkLayout& layout);

// Row-major grid (ny rows, nx cols) of best-server cell ids.
Eigen::ArrayXXi coverage_map(const PowerOffsetVector& offsets, const NetworkLayout& layout,
                             const GainTable& gains);

void write_coverage_csv(const Eigen::ArrayXXi& map, const NetworkLayout& layout, std::ostream& os);
void write_coverage_pgm(const Eigen::ArrayXXi& map, std::ostream& os);

}  // namespace hetsim::netmodel
