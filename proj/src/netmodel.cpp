#include "hetsim/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hetsim/rng.hpp"

namespace hetsim::netmodel {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normalize_deg(double deg) {
  while (deg > 180.0) deg -= 360.0;
  while (deg < -180.0) deg += 360.0;
  return deg;
}

// Hexagonal lattice positions for `rings` rings around the origin, center
// first, then ring by ring walked counter-clockwise. 2 rings -> 19 sites.
std::vector<Point> hex_sites(double isd, int rings) {
  std::vector<Point> sites;
  sites.push_back({0.0, 0.0});
  // Axial basis: moving one site in direction d.
  const double dirs[6][2] = {
      {1.0, 0.0},  {0.5, std::sqrt(3.0) / 2.0},  {-0.5, std::sqrt(3.0) / 2.0},
      {-1.0, 0.0}, {-0.5, -std::sqrt(3.0) / 2.0}, {0.5, -std::sqrt(3.0) / 2.0}};
  for (int ring = 1; ring <= rings; ++ring) {
    // Start at (ring, 0) and walk the six edges.
    double x = ring * isd;
    double y = 0.0;
    for (int edge = 0; edge < 6; ++edge) {
      const int d = (edge + 2) % 6;  // turn so the walk stays on the ring
      for (int step = 0; step < ring; ++step) {
        sites.push_back({x, y});
        x += dirs[d][0] * isd;
        y += dirs[d][1] * isd;
      }
    }
  }
  return sites;
}

}  // namespace

bool NetworkLayout::is_zone_a_sector(CellId cell) const {
  return !is_small_cell(cell) &&
         std::binary_search(zone_a_sector_ids.begin(), zone_a_sector_ids.end(), cell);
}

int NetworkLayout::grid_nx() const {
  return static_cast<int>(std::ceil(area_bounds.width() / config.grid_resolution_m));
}

int NetworkLayout::grid_ny() const {
  return static_cast<int>(std::ceil(area_bounds.height() / config.grid_resolution_m));
}

int NetworkLayout::pixel_of(const Point& p) const {
  const double res = config.grid_resolution_m;
  int ix = static_cast<int>((p.x - area_bounds.min_x) / res);
  int iy = static_cast<int>((p.y - area_bounds.min_y) / res);
  ix = std::clamp(ix, 0, grid_nx() - 1);
  iy = std::clamp(iy, 0, grid_ny() - 1);
  return iy * grid_nx() + ix;
}

Point NetworkLayout::pixel_center(int pixel) const {
  const double res = config.grid_resolution_m;
  const int ix = pixel % grid_nx();
  const int iy = pixel / grid_nx();
  return {area_bounds.min_x + (ix + 0.5) * res, area_bounds.min_y + (iy + 0.5) * res};
}

void NetworkLayout::serialize(std::ostream& os) const {
  auto num = [&os](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  os << "layout v1\n";
  os << "isd ";
  num(config.inter_site_distance_m);
  os << "\nrings " << config.rings << "\nsectors_per_site " << config.sectors_per_site
     << "\nplacement_seed " << config.placement_seed << "\nsites " << sites.size() << "\n";
  for (const auto& s : sites) {
    num(s.x);
    os << ' ';
    num(s.y);
    os << '\n';
  }
  os << "sectors " << sectors.size() << "\n";
  for (const auto& s : sectors) {
    os << s.site << ' ';
    num(s.azimuth_deg);
    os << '\n';
  }
  os << "small_cells " << small_cells.size() << "\n";
  for (const auto& sc : small_cells) {
    num(sc.position.x);
    os << ' ';
    num(sc.position.y);
    os << ' ' << sc.parent_sector << '\n';
  }
  os << "zone_a";
  for (int id : zone_a_sector_ids) os << ' ' << id;
  os << '\n';
}

double pathloss_db(LinkClass link_class, double distance_m, double min_distance_m) {
  require(distance_m > 0.0, ErrorCategory::domain, "pathloss: non-positive distance");
  const double d_km = std::max(distance_m, min_distance_m) / 1000.0;
  switch (link_class) {
    case LinkClass::macro_to_ue: return 128.1 + 37.6 * std::log10(d_km);
    case LinkClass::sc_to_ue: return 140.7 + 36.7 * std::log10(d_km);
  }
  fail(ErrorCategory::internal, "pathloss: bad link class");
}

double sector_antenna_gain_db(const AntennaPattern& p, double bearing_deg) {
  const double b = normalize_deg(bearing_deg);
  const double rolloff = 12.0 * (b / p.beamwidth_deg) * (b / p.beamwidth_deg);
  return p.front_gain_dbi - std::min(rolloff, p.backoff_db);
}

LinkGain link_gain(const NetworkLayout& layout, CellId cell, const Point& location,
                   const ShadowingField* shadowing, int pixel) {
  LinkGain g;
  const Point pos = layout.cell_position(cell);
  const double d = distance_m(pos, location);
  if (layout.is_small_cell(cell)) {
    g.pathloss_db = pathloss_db(LinkClass::sc_to_ue, std::max(d, 1e-9),
                                layout.config.min_link_distance_m);
    g.antenna_gain_db = layout.config.sc_antenna_gain_dbi;
  } else {
    g.pathloss_db = pathloss_db(LinkClass::macro_to_ue, std::max(d, 1e-9),
                                layout.config.macro_min_link_distance_m);
    const double bearing =
        std::atan2(location.y - pos.y, location.x - pos.x) * 180.0 / kPi -
        layout.sectors[cell].azimuth_deg;
    g.antenna_gain_db = sector_antenna_gain_db(layout.config.macro_antenna, bearing);
  }
  g.antenna_gain_db += layout.config.ue_antenna_gain_dbi;
  if (shadowing != nullptr) {
    g.shadowing_db = shadowing->at(pixel >= 0 ? pixel : layout.pixel_of(location), cell);
  }
  g.total_gain_db = g.antenna_gain_db - g.pathloss_db - g.shadowing_db;
  return g;
}

GainTable::GainTable(const NetworkLayout& layout, const ShadowingField* shadowing) {
  const int n_cells = layout.n_cells();
  const int n_pixels = layout.n_pixels();
  gains_.resize(n_cells, n_pixels);
  for (int pix = 0; pix < n_pixels; ++pix) {
    const Point p = layout.pixel_center(pix);
    for (CellId c = 0; c < n_cells; ++c) {
      gains_(c, pix) = db_to_linear(link_gain(layout, c, p, shadowing, pix).total_gain_db);
    }
  }
}

NetworkLayout build_layout(const DeploymentConfig& config) {
  require(config.rings >= 0, ErrorCategory::config, "build_layout: ring count < 0");
  require(config.sectors_per_site >= 1, ErrorCategory::config,
          "build_layout: sectors_per_site < 1");
  require(config.sc_per_zone_a_sector >= 0, ErrorCategory::config,
          "build_layout: negative SC count");
  require(config.grid_resolution_m > 0.0, ErrorCategory::config,
          "build_layout: grid resolution must be positive");
  require(config.sc_annulus_lo > 0.0 && config.sc_annulus_hi >= config.sc_annulus_lo,
          ErrorCategory::config, "build_layout: bad SC annulus");

  NetworkLayout layout;
  layout.config = config;
  layout.sites = hex_sites(config.inter_site_distance_m, config.rings);

  for (int site = 0; site < static_cast<int>(layout.sites.size()); ++site) {
    for (int k = 0; k < config.sectors_per_site; ++k) {
      layout.sectors.push_back({site, 360.0 * k / config.sectors_per_site});
    }
  }
  for (int k = 0; k < config.sectors_per_site; ++k) layout.zone_a_sector_ids.push_back(k);

  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& s : layout.sites) {
    min_x = std::min(min_x, s.x);
    max_x = std::max(max_x, s.x);
    min_y = std::min(min_y, s.y);
    max_y = std::max(max_y, s.y);
  }
  const double m = config.area_margin_m;
  layout.area_bounds = {min_x - m, min_y - m, max_x + m, max_y + m};

  // SCs are dropped uniformly in an annulus near the sector cell edge and
  // must fall in the parent's macro-only best-server region.
  const double edge_radius = config.inter_site_distance_m / std::sqrt(3.0);
  const double half_width = 180.0 / config.sectors_per_site;
  for (int sector_id : layout.zone_a_sector_ids) {
    const Sector& sector = layout.sectors[sector_id];
    const Point site = layout.sites[sector.site];
    SeededRng rng(config.placement_seed, static_cast<std::uint64_t>(sector_id) + 0x5c00ULL);
    for (int k = 0; k < config.sc_per_zone_a_sector; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        const double r = edge_radius * rng.uniform(config.sc_annulus_lo, config.sc_annulus_hi);
        const double ang = (sector.azimuth_deg + rng.uniform(-half_width, half_width)) * kPi / 180.0;
        const Point pos{site.x + r * std::cos(ang), site.y + r * std::sin(ang)};
        if (!layout.area_bounds.contains(pos)) continue;
        if (best_macro_sector(pos, layout) != sector_id) continue;
        bool too_close = false;
        for (const auto& other : layout.small_cells) {
          if (distance_m(other.position, pos) < config.sc_min_separation_m) {
            too_close = true;
            break;
          }
        }
        if (too_close) continue;
        layout.small_cells.push_back({pos, sector_id});
        placed = true;
      }
      if (!placed) {
        fail(ErrorCategory::config,
             "build_layout: SC placement failed after 1000 draws (sector=" +
                 std::to_string(sector_id) +
                 ", seed=" + std::to_string(config.placement_seed) + ")");
      }
    }
  }
  return layout;
}

PowerOffsetVector::PowerOffsetVector(int n_entries, double cio_db, double lower_db,
                                     double upper_db, double macro_pilot_dbm, double sc_pilot_dbm)
    : cio_db_(Eigen::VectorXd::Constant(n_entries, cio_db)),
      lower_db_(lower_db),
      upper_db_(upper_db),
      macro_pilot_dbm_(macro_pilot_dbm),
      sc_pilot_dbm_(sc_pilot_dbm) {
  require(upper_db_ >= lower_db_, ErrorCategory::config, "PowerOffsetVector: bounds inverted");
  for (int i = 0; i < n_entries; ++i) cio_db_(i) = project(cio_db_(i));
}

PowerOffsetVector PowerOffsetVector::uniform(const NetworkLayout& layout, double cio_db,
                                             double lower_db, double upper_db) {
  return PowerOffsetVector(layout.n_small_cells(), cio_db, lower_db, upper_db,
                           layout.config.macro_pilot_dbm, layout.config.sc_pilot_dbm);
}

double PowerOffsetVector::project(double value) const {
  return std::clamp(value, lower_db_, upper_db_);
}

void PowerOffsetVector::set_entry(int sc_index, double value) {
  cio_db_(sc_index) = project(value);
}

CellId best_server(const Point& location, const PowerOffsetVector& offsets,
                   const NetworkLayout& layout, const ShadowingField* shadowing) {
  const int pixel = layout.pixel_of(location);
  CellId best = 0;
  double best_score = -1e300;
  for (CellId c = 0; c < layout.n_cells(); ++c) {
    const double score = link_gain(layout, c, location, shadowing, pixel).total_gain_db +
                         offsets.selection_dbm(layout, c);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

CellId best_server_pixel(int pixel, const PowerOffsetVector& offsets, const NetworkLayout& layout,
                         const GainTable& gains) {
  CellId best = 0;
  double best_score = -1e300;
  for (CellId c = 0; c < layout.n_cells(); ++c) {
    const double score = gains.linear(c, pixel) * db_to_linear(offsets.selection_dbm(layout, c));
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

CellId best_macro_sector(const Point& location, const NetworkLayout& layout) {
  CellId best = 0;
  double best_score = -1e300;
  for (CellId c = 0; c < layout.n_sectors(); ++c) {
    const double score = link_gain(layout, c, location).total_gain_db;
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

bool handover_trigger(CellId serving, CellId candidate, double rsrp_serving_dbm,
                      double rsrp_candidate_dbm, double hysteresis_db,
                      const PowerOffsetVector& offsets, const NetworkLayout& layout) {
  require(serving != candidate, ErrorCategory::contract,
          "handover_trigger: serving == candidate");
  const double offset_sn = offsets.cio_db(layout, serving) - offsets.cio_db(layout, candidate);
  return rsrp_serving_dbm + hysteresis_db < rsrp_candidate_dbm - offset_sn;
}

Eigen::ArrayXXi coverage_map(const PowerOffsetVector& offsets, const NetworkLayout& layout,
                             const GainTable& gains) {
  require(layout.config.grid_resolution_m > 0.0, ErrorCategory::config,
          "coverage_map: grid resolution must be positive");
  const int nx = layout.grid_nx();
  const int ny = layout.grid_ny();
  // Selection factors are per-cell constants; fold them once.
  Eigen::VectorXd factor(layout.n_cells());
  for (CellId c = 0; c < layout.n_cells(); ++c) {
    factor(c) = db_to_linear(offsets.selection_dbm(layout, c));
  }
  Eigen::ArrayXXi map(ny, nx);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int pix = iy * nx + ix;
      CellId best = 0;
      double best_score = -1e300;
      for (CellId c = 0; c < layout.n_cells(); ++c) {
        const double score = gains.linear(c, pix) * factor(c);
        if (score > best_score) {
          best_score = score;
          best = c;
        }
      }
      map(iy, ix) = best;
    }
  }
  return map;
}

void write_coverage_csv(const Eigen::ArrayXXi& map, const NetworkLayout& layout,
                        std::ostream& os) {
  os << "x,y,cell_id\n";
  for (int iy = 0; iy < map.rows(); ++iy) {
    for (int ix = 0; ix < map.cols(); ++ix) {
      const Point p = layout.pixel_center(iy * layout.grid_nx() + ix);
      os << p.x << ',' << p.y << ',' << map(iy, ix) << '\n';
    }
  }
}

void write_coverage_pgm(const Eigen::ArrayXXi& map, std::ostream& os) {
  const int maxv = std::max(1, static_cast<int>(map.maxCoeff()));
  os << "P2\n" << map.cols() << ' ' << map.rows() << "\n" << maxv << "\n";
  for (int iy = static_cast<int>(map.rows()) - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < map.cols(); ++ix) {
      os << map(iy, ix) << (ix + 1 == map.cols() ? '\n' : ' ');
    }
  }
}

}  // namespace hetsim::netmodel
