#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "hetsim/netmodel.hpp"
#include "hetsim/rng.hpp"

using namespace hetsim;
using namespace hetsim::netmodel;

namespace {

DeploymentConfig small_config() {
  DeploymentConfig d;
  d.rings = 0;
  d.grid_resolution_m = 25.0;
  d.area_margin_m = 320.0;
  d.sc_per_zone_a_sector = 2;
  d.placement_seed = 7;
  return d;
}

}  // namespace

TEST_SUITE_BEGIN("netmodel");

TEST_CASE("build_layout: 2 rings of tri-sector sites gives 57 sectors") {
  DeploymentConfig d;
  d.rings = 2;
  d.grid_resolution_m = 50.0;
  d.sc_per_zone_a_sector = 4;
  const NetworkLayout layout = build_layout(d);
  CHECK(layout.sites.size() == 19);
  CHECK(layout.n_sectors() == 57);
  CHECK(layout.n_small_cells() == 12);
  CHECK(layout.zone_a_sector_ids.size() == 3);
}

TEST_CASE("build_layout: rings=0 gives 3 sectors, all zone A") {
  DeploymentConfig d = small_config();
  const NetworkLayout layout = build_layout(d);
  CHECK(layout.n_sectors() == 3);
  for (CellId c = 0; c < 3; ++c) CHECK(layout.is_zone_a_sector(c));
}

TEST_CASE("build_layout: adjacent site distance equals the configured ISD") {
  DeploymentConfig d;
  d.rings = 2;
  d.grid_resolution_m = 50.0;
  const NetworkLayout layout = build_layout(d);
  for (std::size_t i = 0; i < layout.sites.size(); ++i) {
    double nearest = 1e18;
    for (std::size_t j = 0; j < layout.sites.size(); ++j) {
      if (i != j) nearest = std::min(nearest, distance_m(layout.sites[i], layout.sites[j]));
    }
    CHECK(nearest == doctest::Approx(500.0).epsilon(1e-12));
  }
}

TEST_CASE("build_layout: determinism and serialization") {
  DeploymentConfig d = small_config();
  const NetworkLayout a = build_layout(d);
  const NetworkLayout b = build_layout(d);
  std::ostringstream sa, sb;
  a.serialize(sa);
  b.serialize(sb);
  CHECK(sa.str() == sb.str());

  d.placement_seed = 8;
  const NetworkLayout c = build_layout(d);
  std::ostringstream sc;
  c.serialize(sc);
  CHECK(sa.str() != sc.str());
}

TEST_CASE("build_layout: SCs sit in their parent's macro-only region") {
  DeploymentConfig d;
  d.rings = 1;
  d.grid_resolution_m = 25.0;
  const NetworkLayout layout = build_layout(d);
  REQUIRE(layout.n_small_cells() == 12);
  const double edge_radius = d.inter_site_distance_m / std::sqrt(3.0);
  for (const auto& sc : layout.small_cells) {
    CHECK(best_macro_sector(sc.position, layout) == sc.parent_sector);
    const double r = distance_m(sc.position, layout.sites[layout.sectors[sc.parent_sector].site]);
    CHECK(r >= d.sc_annulus_lo * edge_radius - 1e-9);
    CHECK(r <= d.sc_annulus_hi * edge_radius + 1e-9);
  }
}

TEST_CASE("build_layout: negative ring count rejected") {
  DeploymentConfig d = small_config();
  d.rings = -1;
  CHECK_THROWS_AS(build_layout(d), SimError);
}

TEST_CASE("pathloss: reference values") {
  CHECK(pathloss_db(LinkClass::macro_to_ue, 1000.0) == doctest::Approx(128.1));
  CHECK(pathloss_db(LinkClass::sc_to_ue, 1000.0) == doctest::Approx(140.7));
  // 128.1 + 37.6*log10(0.1) = 90.5
  CHECK(pathloss_db(LinkClass::macro_to_ue, 100.0) == doctest::Approx(90.5));
}

TEST_CASE("pathloss: floor and domain errors") {
  CHECK(pathloss_db(LinkClass::macro_to_ue, 1.0, 10.0) ==
        pathloss_db(LinkClass::macro_to_ue, 10.0, 10.0));
  CHECK_THROWS_AS(pathloss_db(LinkClass::macro_to_ue, 0.0), SimError);
  CHECK_THROWS_AS(pathloss_db(LinkClass::macro_to_ue, -5.0), SimError);
}

TEST_CASE("pathloss: strictly increasing with distance per link class") {
  for (LinkClass lc : {LinkClass::macro_to_ue, LinkClass::sc_to_ue}) {
    double prev = pathloss_db(lc, 10.0);
    for (double d = 20.0; d < 3000.0; d *= 1.5) {
      const double pl = pathloss_db(lc, d);
      CHECK(pl > prev);
      prev = pl;
    }
  }
}

TEST_CASE("shadowing: zero sigma, freeze contract, mean") {
  const ShadowingField zero(42, 0.0);
  CHECK(zero.at(10, 3) == 0.0);

  const ShadowingField field(42, 6.0);
  CHECK(field.at(123, 4) == field.at(123, 4));
  CHECK(field.at(123, 4) != field.at(124, 4));

  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += field.at(i, 1);
  CHECK(std::abs(sum / n) < 0.1);
}

TEST_CASE("shadowing: Kolmogorov-Smirnov vs Normal(0, 6^2)") {
  const ShadowingField field(7, 6.0);
  const int n = 10000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = field.at(i, 2);
  std::sort(xs.begin(), xs.end());
  auto normal_cdf = [](double x) { return 0.5 * std::erfc(-x / (6.0 * std::sqrt(2.0))); };
  double d_stat = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = normal_cdf(xs[i]);
    d_stat = std::max(d_stat, std::abs(f - static_cast<double>(i) / n));
    d_stat = std::max(d_stat, std::abs(static_cast<double>(i + 1) / n - f));
  }
  CHECK(d_stat < 1.628 / std::sqrt(static_cast<double>(n)));  // alpha = 0.01
}

TEST_CASE("link gain: total is antenna minus pathloss minus shadowing, exactly") {
  const NetworkLayout layout = build_layout(small_config());
  const ShadowingField field(3, 6.0);
  for (CellId c = 0; c < layout.n_cells(); ++c) {
    const LinkGain g = link_gain(layout, c, {120.0, 85.0}, &field);
    CHECK(g.total_gain_db == g.antenna_gain_db - g.pathloss_db - g.shadowing_db);
  }
}

TEST_CASE("dB/linear round trip is exact to 1e-9 relative") {
  for (double db = -180.0; db <= 60.0; db += 7.3) {
    CHECK(linear_to_db(db_to_linear(db)) == doctest::Approx(db).epsilon(1e-9));
  }
  for (double lin : {1e-15, 3.7e-9, 0.25, 1.0, 42.0, 9.9e7}) {
    CHECK(db_to_linear(linear_to_db(lin)) == doctest::Approx(lin).epsilon(1e-9));
  }
}

TEST_CASE("antenna pattern: front gain, 3dB beamwidth, backoff") {
  AntennaPattern p;  // 14 dBi, 70 deg, 20 dB
  CHECK(sector_antenna_gain_db(p, 0.0) == doctest::Approx(14.0));
  CHECK(sector_antenna_gain_db(p, 35.0) == doctest::Approx(11.0));
  CHECK(sector_antenna_gain_db(p, 180.0) == doctest::Approx(-6.0));
  CHECK(sector_antenna_gain_db(p, -35.0) == sector_antenna_gain_db(p, 35.0));
}

TEST_CASE("best_server: offset dominance and suppression") {
  DeploymentConfig d = small_config();
  const NetworkLayout layout = build_layout(d);
  REQUIRE(layout.n_small_cells() == 6);

  const Point at_sc = layout.small_cells[0].position;
  PowerOffsetVector up = PowerOffsetVector::uniform(layout, 3.0);
  CHECK(best_server(at_sc, up, layout) == layout.sc_cell_id(0));

  PowerOffsetVector down(layout.n_small_cells(), -200.0, -200.0, 12.0, d.macro_pilot_dbm,
                         d.sc_pilot_dbm);
  for (int pix = 0; pix < layout.n_pixels(); pix += 7) {
    CHECK(!layout.is_small_cell(best_server(layout.pixel_center(pix), down, layout)));
  }
}

TEST_CASE("best_server: ties break to the lowest cell id") {
  DeploymentConfig d = small_config();
  d.sc_per_zone_a_sector = 0;
  d.macro_antenna = {0.0, 70.0, 0.0};  // flat pattern: all sectors equal
  const NetworkLayout layout = build_layout(d);
  PowerOffsetVector offsets = PowerOffsetVector::uniform(layout, 0.0);
  CHECK(best_server({100.0, 50.0}, offsets, layout) == 0);
}

TEST_CASE("coverage_map: uniform for a single cell and dimension contract") {
  DeploymentConfig d = small_config();
  d.sectors_per_site = 1;
  d.sc_per_zone_a_sector = 0;
  d.macro_antenna = {0.0, 70.0, 0.0};
  const NetworkLayout layout = build_layout(d);
  const GainTable gains(layout, nullptr);
  const Eigen::ArrayXXi map =
      coverage_map(PowerOffsetVector::uniform(layout, 0.0), layout, gains);
  CHECK(map.rows() == layout.grid_ny());
  CHECK(map.cols() == layout.grid_nx());
  CHECK(map.rows() ==
        static_cast<int>(std::ceil(layout.area_bounds.height() / d.grid_resolution_m)));
  CHECK((map == 0).all());
}

TEST_CASE("coverage_map: raising one SC's CIO never shrinks its pixel set") {
  const NetworkLayout layout = build_layout(small_config());
  const ShadowingField field(11, 6.0);
  const GainTable gains(layout, &field);
  PowerOffsetVector lo = PowerOffsetVector::uniform(layout, 0.0);
  PowerOffsetVector hi = lo;
  hi.set_entry(2, 10.0);
  const Eigen::ArrayXXi map_lo = coverage_map(lo, layout, gains);
  const Eigen::ArrayXXi map_hi = coverage_map(hi, layout, gains);
  const CellId sc = layout.sc_cell_id(2);
  int grew = 0;
  for (int iy = 0; iy < map_lo.rows(); ++iy) {
    for (int ix = 0; ix < map_lo.cols(); ++ix) {
      if (map_lo(iy, ix) == sc) CHECK(map_hi(iy, ix) == sc);
      if (map_hi(iy, ix) == sc && map_lo(iy, ix) != sc) ++grew;
    }
  }
  CHECK(grew > 0);
}

TEST_CASE("coverage_map: uniform CIO=10 regions contain the CIO=0 regions") {
  const NetworkLayout layout = build_layout(small_config());
  const ShadowingField field(11, 6.0);
  const GainTable gains(layout, &field);
  const Eigen::ArrayXXi map0 =
      coverage_map(PowerOffsetVector::uniform(layout, 0.0), layout, gains);
  const Eigen::ArrayXXi map10 =
      coverage_map(PowerOffsetVector::uniform(layout, 10.0), layout, gains);
  for (int iy = 0; iy < map0.rows(); ++iy) {
    for (int ix = 0; ix < map0.cols(); ++ix) {
      if (layout.is_small_cell(map0(iy, ix))) CHECK(map10(iy, ix) == map0(iy, ix));
    }
  }
}

TEST_CASE("attachment monotonicity: favored cell keeps its pixels") {
  const NetworkLayout layout = build_layout(small_config());
  const ShadowingField field(5, 6.0);
  const GainTable gains(layout, &field);
  SeededRng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    PowerOffsetVector p = PowerOffsetVector::uniform(layout, 0.0);
    for (int i = 0; i < p.n_entries(); ++i) p.set_entry(i, rng.uniform(-2.0, 12.0));
    const int s = static_cast<int>(rng.integer(p.n_entries()));
    PowerOffsetVector q = p;
    for (int i = 0; i < q.n_entries(); ++i) {
      q.set_entry(i, i == s ? p.entry(i) + rng.uniform(0.0, 3.0)
                            : p.entry(i) - rng.uniform(0.0, 3.0));
    }
    const CellId sc = layout.sc_cell_id(s);
    for (int pix = 0; pix < layout.n_pixels(); pix += 11) {
      if (best_server_pixel(pix, p, layout, gains) == sc) {
        CHECK(best_server_pixel(pix, q, layout, gains) == sc);
      }
    }
  }
}

TEST_CASE("handover_trigger: margin, equality, hysteresis") {
  const NetworkLayout layout = build_layout(small_config());
  const PowerOffsetVector off = PowerOffsetVector::uniform(layout, 0.0);
  CHECK(handover_trigger(0, 1, -90.0, -88.0, 0.0, off, layout));
  CHECK(!handover_trigger(0, 1, -90.0, -90.0, 0.0, off, layout));
  CHECK(!handover_trigger(0, 1, -90.0, -88.0, 3.0, off, layout));
  CHECK_THROWS_AS(handover_trigger(0, 0, -90.0, -88.0, 0.0, off, layout), SimError);
}

TEST_CASE("handover_trigger: CIO asymmetry enters as Q_offset") {
  const NetworkLayout layout = build_layout(small_config());
  PowerOffsetVector off = PowerOffsetVector::uniform(layout, 0.0);
  const CellId sc = layout.sc_cell_id(0);
  off.set_entry(0, 4.0);
  CHECK(handover_trigger(0, sc, -90.0, -92.0, 0.0, off, layout));
  CHECK(!handover_trigger(sc, 0, -92.0, -90.0, 0.0, off, layout));
}

TEST_CASE("PowerOffsetVector: projection and bounds") {
  const NetworkLayout layout = build_layout(small_config());
  PowerOffsetVector p = PowerOffsetVector::uniform(layout, 0.0);
  p.set_entry(0, 100.0);
  CHECK(p.entry(0) == 12.0);
  p.set_entry(0, -100.0);
  CHECK(p.entry(0) == -2.0);
  CHECK(p.project(p.project(5.3)) == p.project(5.3));
  CHECK(p.selection_dbm(layout, layout.sc_cell_id(0)) == 30.0 + p.entry(0));
  CHECK(p.selection_dbm(layout, 0) == 46.0);
}

TEST_SUITE_END();
