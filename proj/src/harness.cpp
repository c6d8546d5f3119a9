#include "hetsim/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "hetsim/csv.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace hetsim::harness {

// ---------------------------------------------------------------------------
// config serialization

namespace {

json deployment_to_json(const netmodel::DeploymentConfig& d) {
  return {{"inter_site_distance_m", d.inter_site_distance_m},
          {"rings", d.rings},
          {"sectors_per_site", d.sectors_per_site},
          {"sc_per_zone_a_sector", d.sc_per_zone_a_sector},
          {"placement_seed", d.placement_seed},
          {"grid_resolution_m", d.grid_resolution_m},
          {"area_margin_m", d.area_margin_m},
          {"sc_annulus_lo", d.sc_annulus_lo},
          {"sc_annulus_hi", d.sc_annulus_hi},
          {"sc_min_separation_m", d.sc_min_separation_m},
          {"macro_antenna_gain_dbi", d.macro_antenna.front_gain_dbi},
          {"macro_antenna_beamwidth_deg", d.macro_antenna.beamwidth_deg},
          {"macro_antenna_backoff_db", d.macro_antenna.backoff_db},
          {"sc_antenna_gain_dbi", d.sc_antenna_gain_dbi},
          {"ue_antenna_gain_dbi", d.ue_antenna_gain_dbi},
          {"min_link_distance_m", d.min_link_distance_m},
          {"macro_min_link_distance_m", d.macro_min_link_distance_m},
          {"shadowing_sigma_db", d.shadowing_sigma_db}};
}

void deployment_from_json(const json& j, netmodel::DeploymentConfig& d) {
  j.at("inter_site_distance_m").get_to(d.inter_site_distance_m);
  j.at("rings").get_to(d.rings);
  j.at("sectors_per_site").get_to(d.sectors_per_site);
  j.at("sc_per_zone_a_sector").get_to(d.sc_per_zone_a_sector);
  j.at("placement_seed").get_to(d.placement_seed);
  j.at("grid_resolution_m").get_to(d.grid_resolution_m);
  j.at("area_margin_m").get_to(d.area_margin_m);
  j.at("sc_annulus_lo").get_to(d.sc_annulus_lo);
  j.at("sc_annulus_hi").get_to(d.sc_annulus_hi);
  j.at("sc_min_separation_m").get_to(d.sc_min_separation_m);
  j.at("macro_antenna_gain_dbi").get_to(d.macro_antenna.front_gain_dbi);
  j.at("macro_antenna_beamwidth_deg").get_to(d.macro_antenna.beamwidth_deg);
  j.at("macro_antenna_backoff_db").get_to(d.macro_antenna.backoff_db);
  j.at("sc_antenna_gain_dbi").get_to(d.sc_antenna_gain_dbi);
  j.at("ue_antenna_gain_dbi").get_to(d.ue_antenna_gain_dbi);
  j.at("min_link_distance_m").get_to(d.min_link_distance_m);
  j.at("macro_min_link_distance_m").get_to(d.macro_min_link_distance_m);
  j.at("shadowing_sigma_db").get_to(d.shadowing_sigma_db);
}

json radio_to_json(const ScenarioConfig& c) {
  return {{"n_prb", c.radio.grid.n_prb},
          {"prb_bandwidth_hz", c.radio.grid.prb_bandwidth_hz},
          {"abs_period", c.radio.grid.abs_period},
          {"abs_muted", c.radio.grid.abs_muted},
          {"noise_dbm_per_hz", c.radio.noise_dbm_per_hz},
          {"macro_tx_dbm", c.deployment.macro_pilot_dbm},
          {"sc_tx_dbm", c.deployment.sc_pilot_dbm},
          {"ue_p_max_dbm", c.radio.power_control.p_max_dbm},
          {"p0_dbm", c.radio.power_control.p0_dbm},
          {"alpha", c.radio.power_control.alpha},
          {"beta_efficiency", c.radio.beta_efficiency},
          {"eta_max_bps_hz", c.radio.eta_max_bps_hz},
          {"fading", c.radio.fading},
          {"quadrature_nodes", c.radio.quadrature_nodes}};
}

void radio_from_json(const json& j, ScenarioConfig& c) {
  j.at("n_prb").get_to(c.radio.grid.n_prb);
  j.at("prb_bandwidth_hz").get_to(c.radio.grid.prb_bandwidth_hz);
  j.at("abs_period").get_to(c.radio.grid.abs_period);
  j.at("abs_muted").get_to(c.radio.grid.abs_muted);
  j.at("noise_dbm_per_hz").get_to(c.radio.noise_dbm_per_hz);
  j.at("macro_tx_dbm").get_to(c.deployment.macro_pilot_dbm);
  j.at("sc_tx_dbm").get_to(c.deployment.sc_pilot_dbm);
  j.at("ue_p_max_dbm").get_to(c.radio.power_control.p_max_dbm);
  j.at("p0_dbm").get_to(c.radio.power_control.p0_dbm);
  j.at("alpha").get_to(c.radio.power_control.alpha);
  j.at("beta_efficiency").get_to(c.radio.beta_efficiency);
  j.at("eta_max_bps_hz").get_to(c.radio.eta_max_bps_hz);
  j.at("fading").get_to(c.radio.fading);
  j.at("quadrature_nodes").get_to(c.radio.quadrature_nodes);
}

}  // namespace

std::string ScenarioConfig::to_json_text() const {
  json j;
  j["deployment"] = deployment_to_json(deployment);
  j["radio"] = radio_to_json(*this);
  j["traffic"] = {{"lambda_per_s", traffic.lambda_per_s},
                  {"mean_file_mbits", traffic.mean_file_mbits},
                  {"ul_fraction", traffic.ul_fraction},
                  {"zone_b_user_cap", traffic.zone_b_user_cap},
                  {"target_rate_bps", traffic.target_rate_bps}};
  j["sim"] = {{"tick_s", sim.tick_s},
              {"window_s", sim.window_s},
              {"warmup_fraction", sim.warmup_fraction},
              {"fixed_rate_bps", sim.fixed_rate_bps},
              {"interference", sim.interference},
              {"zone_b_background", sim.zone_b_background},
              {"outage_mode", sim.outage_mode},
              {"sinr_threshold_db", sim.sinr_threshold_db}};
  j["exposure"] = {{"sar_ul_w_per_kg_per_w", exposure.sar_ul_w_per_kg_per_w},
                   {"sar_dl_w_per_kg_per_w", exposure.sar_dl_w_per_kg_per_w},
                   {"activity_coefficient", exposure.activity_coefficient}};
  j["son"] = {{"epsilon", son.epsilon},
              {"theta_bar", son.theta_bar},
              {"cio_min_db", son.cio_min_db},
              {"cio_max_db", son.cio_max_db},
              {"convergence_window", son.convergence_window},
              {"tol_offset_db", son.tol_offset_db},
              {"tol_outage", son.tol_outage}};
  j["analytic"] = {{"lambda_override", analytic.lambda_override},
                   {"ul_noise_rise_db", analytic.ul_noise_rise_db},
                   {"use_shadowing", analytic.use_shadowing},
                   {"shadowing_seed", analytic.shadowing_seed},
                   {"outage_smoothing", analytic.outage_smoothing}};
  j["experiment"] = {{"mode", experiment.mode},
                     {"cio_list_db", experiment.cio_list_db},
                     {"horizon_s", experiment.horizon_s},
                     {"initial_cio_db", experiment.initial_cio_db},
                     {"baseline_cio_db", experiment.baseline_cio_db},
                     {"seeds", experiment.seeds},
                     {"out_dir", experiment.out_dir}};
  return j.dump(2) + "\n";
}

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCategory::config, std::string("config parse error: ") + e.what());
  }
  ScenarioConfig c;
  try {
    deployment_from_json(j.at("deployment"), c.deployment);
    radio_from_json(j.at("radio"), c);
    const json& t = j.at("traffic");
    t.at("lambda_per_s").get_to(c.traffic.lambda_per_s);
    t.at("mean_file_mbits").get_to(c.traffic.mean_file_mbits);
    t.at("ul_fraction").get_to(c.traffic.ul_fraction);
    t.at("zone_b_user_cap").get_to(c.traffic.zone_b_user_cap);
    t.at("target_rate_bps").get_to(c.traffic.target_rate_bps);
    const json& s = j.at("sim");
    s.at("tick_s").get_to(c.sim.tick_s);
    s.at("window_s").get_to(c.sim.window_s);
    s.at("warmup_fraction").get_to(c.sim.warmup_fraction);
    s.at("fixed_rate_bps").get_to(c.sim.fixed_rate_bps);
    s.at("interference").get_to(c.sim.interference);
    s.at("zone_b_background").get_to(c.sim.zone_b_background);
    s.at("outage_mode").get_to(c.sim.outage_mode);
    s.at("sinr_threshold_db").get_to(c.sim.sinr_threshold_db);
    const json& e = j.at("exposure");
    e.at("sar_ul_w_per_kg_per_w").get_to(c.exposure.sar_ul_w_per_kg_per_w);
    e.at("sar_dl_w_per_kg_per_w").get_to(c.exposure.sar_dl_w_per_kg_per_w);
    e.at("activity_coefficient").get_to(c.exposure.activity_coefficient);
    const json& so = j.at("son");
    so.at("epsilon").get_to(c.son.epsilon);
    so.at("theta_bar").get_to(c.son.theta_bar);
    so.at("cio_min_db").get_to(c.son.cio_min_db);
    so.at("cio_max_db").get_to(c.son.cio_max_db);
    so.at("convergence_window").get_to(c.son.convergence_window);
    so.at("tol_offset_db").get_to(c.son.tol_offset_db);
    so.at("tol_outage").get_to(c.son.tol_outage);
    const json& a = j.at("analytic");
    a.at("lambda_override").get_to(c.analytic.lambda_override);
    a.at("ul_noise_rise_db").get_to(c.analytic.ul_noise_rise_db);
    a.at("use_shadowing").get_to(c.analytic.use_shadowing);
    a.at("shadowing_seed").get_to(c.analytic.shadowing_seed);
    a.at("outage_smoothing").get_to(c.analytic.outage_smoothing);
    const json& x = j.at("experiment");
    x.at("mode").get_to(c.experiment.mode);
    x.at("cio_list_db").get_to(c.experiment.cio_list_db);
    x.at("horizon_s").get_to(c.experiment.horizon_s);
    x.at("initial_cio_db").get_to(c.experiment.initial_cio_db);
    x.at("baseline_cio_db").get_to(c.experiment.baseline_cio_db);
    x.at("seeds").get_to(c.experiment.seeds);
    x.at("out_dir").get_to(c.experiment.out_dir);
  } catch (const SimError&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCategory::config, std::string("config field error: ") + e.what());
  }
  c.validate();
  return c;
}

void ScenarioConfig::validate() const {
  require(deployment.rings >= 0, ErrorCategory::config, "rings must be >= 0");
  require(deployment.grid_resolution_m > 0, ErrorCategory::config,
          "grid resolution must be positive");
  require(radio.grid.n_prb >= 1, ErrorCategory::config, "n_prb must be >= 1");
  require(radio.grid.prb_bandwidth_hz > 0, ErrorCategory::config, "PRB bandwidth must be > 0");
  require(radio.grid.abs_period >= 1 && radio.grid.abs_muted >= 0 &&
              radio.grid.abs_muted <= radio.grid.abs_period,
          ErrorCategory::config, "bad ABS pattern");
  require(radio.power_control.alpha >= 0.0 && radio.power_control.alpha <= 1.0,
          ErrorCategory::config, "alpha must lie in [0,1]");
  require(radio.power_control.p_max_dbm >= radio.power_control.p0_dbm, ErrorCategory::config,
          "p_max must be >= p0");
  require(radio.fading == "rayleigh" || radio.fading == "none", ErrorCategory::config,
          "fading must be rayleigh|none");
  require(traffic.lambda_per_s >= 0.0, ErrorCategory::config, "lambda must be >= 0");
  require(traffic.ul_fraction >= 0.0 && traffic.ul_fraction <= 1.0, ErrorCategory::config,
          "ul_fraction must lie in [0,1]");
  require(traffic.mean_file_mbits > 0.0, ErrorCategory::config, "file size must be positive");
  require(sim.tick_s > 0.0 && sim.window_s > 0.0, ErrorCategory::config,
          "tick and window must be positive");
  require(sim.warmup_fraction >= 0.0 && sim.warmup_fraction < 1.0, ErrorCategory::config,
          "warmup fraction must lie in [0,1)");
  require(sim.outage_mode == "rate" || sim.outage_mode == "sinr", ErrorCategory::config,
          "outage_mode must be rate|sinr");
  require(exposure.activity_coefficient >= 1.0, ErrorCategory::config, "C1 must be >= 1");
  require(son.epsilon > 0.0, ErrorCategory::config, "epsilon must be > 0");
  require(son.theta_bar > 0.0 && son.theta_bar < 1.0, ErrorCategory::config,
          "theta_bar must lie in (0,1)");
  require(son.cio_max_db >= son.cio_min_db, ErrorCategory::config, "CIO bounds inverted");
  require(experiment.mode == "single" || experiment.mode == "sweep" ||
              experiment.mode == "son",
          ErrorCategory::config, "mode must be single|sweep|son");
  require(experiment.horizon_s > 0.0, ErrorCategory::config, "horizon must be positive");
  const double ratio = experiment.horizon_s / sim.window_s;
  require(std::abs(ratio - std::round(ratio)) < 1e-9, ErrorCategory::config,
          "horizon must be a multiple of the measurement window");
  for (double cio : experiment.cio_list_db) {
    require(cio >= son.cio_min_db && cio <= son.cio_max_db, ErrorCategory::config,
            "sweep CIO outside the configured bounds");
  }
}

ScenarioConfig ScenarioConfig::preset(const std::string& name) {
  ScenarioConfig c;  // defaults are the Table 1 values
  if (name == "table1") {
    c.experiment.mode = "sweep";
    return c;
  }
  if (name == "desk") {
    c.deployment.rings = 1;
    c.deployment.grid_resolution_m = 10.0;
    c.deployment.macro_min_link_distance_m = 35.0;  // mast-elevation proxy
    c.traffic.lambda_per_s = 2.5;
    c.radio.power_control.p0_dbm = -78.0;  // keeps fractional power control
    c.radio.power_control.alpha = 0.9;     // off the 23 dBm ceiling at M=50
    c.radio.grid.abs_muted = 0;            // fixed ABS ratio at desk scale
    c.experiment.mode = "son";
    c.experiment.horizon_s = 1800.0;  // 300 SON iterations of 6 s
    return c;
  }
  if (name == "mini") {
    // Tiny layout for unit tests: one site, no rings.
    c.deployment.rings = 0;
    c.deployment.grid_resolution_m = 25.0;
    c.deployment.area_margin_m = 320.0;
    c.deployment.sc_per_zone_a_sector = 2;
    c.traffic.lambda_per_s = 1.5;
    c.experiment.horizon_s = 120.0;
    c.experiment.seeds = {1};
    return c;
  }
  fail(ErrorCategory::config, "unknown preset: " + name);
}

// ---------------------------------------------------------------------------
// aggregation

std::vector<CellAggregate> cell_aggregates(const flowsim::SimulationTrace& trace) {
  std::map<CellId, CellAggregate> by_cell;
  for (const auto& w : trace.windows) {
    if (!w.complete || w.t_start < trace.warmup_s) continue;
    for (const auto& k : w.cells) {
      CellAggregate& a = by_cell[k.cell];
      a.cell = k.cell;
      a.mean_ul_load += k.ul_load.value_or(0.0);
      a.mean_dl_load += k.dl_load.value_or(0.0);
      a.outage_obs += k.outage_obs;
      a.outage_below += k.outage_below;
      a.mean_active_users += k.active_users;
      a.windows += 1;
    }
  }
  std::vector<CellAggregate> out;
  for (auto& [cell, a] : by_cell) {
    if (a.windows > 0) {
      a.mean_ul_load /= a.windows;
      a.mean_dl_load /= a.windows;
      a.mean_active_users /= a.windows;
    }
    out.push_back(a);
  }
  return out;
}

GroupAggregate group_aggregate(const flowsim::SimulationTrace& trace,
                               const netmodel::NetworkLayout& layout,
                               std::optional<exposure::CellGroup> group) {
  auto in_group = [&](CellId cell) {
    if (!layout.is_zone_a_cell(cell)) return false;
    if (!group) return true;
    return (*group == exposure::CellGroup::sc) == layout.is_small_cell(cell);
  };

  GroupAggregate g;
  int cells = 0;
  int obs = 0, below = 0;
  for (const auto& a : cell_aggregates(trace)) {
    if (!in_group(a.cell)) continue;
    g.mean_ul_load += a.mean_ul_load;
    g.mean_dl_load += a.mean_dl_load;
    obs += a.outage_obs;
    below += a.outage_below;
    cells += 1;
  }
  if (cells > 0) {
    g.mean_ul_load /= cells;
    g.mean_dl_load /= cells;
  }
  if (obs > 0) g.outage = static_cast<double>(below) / obs;

  double ftt_sum_ul = 0.0, ftt_sum_dl = 0.0;
  int n_ul = 0, n_dl = 0;
  for (const auto& f : trace.flows) {
    if (!f.done || f.departure_s < trace.warmup_s || !in_group(f.serving_cell)) continue;
    const double ftt = f.departure_s - f.arrival_s;
    if (f.direction == Direction::ul) {
      ftt_sum_ul += ftt;
      n_ul += 1;
    } else {
      ftt_sum_dl += ftt;
      n_dl += 1;
    }
  }
  if (n_ul > 0) g.mean_ftt_ul_s = ftt_sum_ul / n_ul;
  if (n_dl > 0) g.mean_ftt_dl_s = ftt_sum_dl / n_dl;

  const exposure::ExposureReport report = exposure::ExposureReport::from_ledger(trace.ledger);
  const exposure::ExposureValues& v =
      !group ? report.all : (*group == exposure::CellGroup::sc ? report.sc : report.macro);
  g.f_ul = v.f_ul;
  g.f_dl = v.f_dl;
  g.f_total = v.f_total;
  return g;
}

std::vector<double> ul_power_samples_dbm(const flowsim::SimulationTrace& trace,
                                         const netmodel::NetworkLayout& layout) {
  std::vector<double> out;
  for (const auto& f : trace.flows) {
    if (f.direction != Direction::ul || f.arrival_s < trace.warmup_s ||
        !layout.is_zone_a_cell(f.serving_cell)) {
      continue;
    }
    const double w = f.mean_tx_power_w(trace.horizon_s);
    if (w > 0.0) out.push_back(watt_to_dbm(w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// campaigns

void parallel_jobs(int n_jobs, const std::function<void(int)>& job) {
  if (n_jobs <= 0) return;
  int width = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HETSIM_THREADS")) {
    width = std::max(1, std::atoi(env));
  }
  width = std::max(1, std::min(width, n_jobs));
  if (width == 1) {
    for (int i = 0; i < n_jobs; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(width);
  for (int t = 0; t < width; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < n_jobs; i = next.fetch_add(1)) job(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

std::string point_label(double cio_db) {
  std::ostringstream os;
  os << "cio_" << cio_db;
  return os.str();
}

}  // namespace

RunResult run_single(const ScenarioConfig& config, const netmodel::NetworkLayout& layout,
                     double cio_db, std::uint64_t seed, bool son_enabled) {
  RunResult r;
  r.seed = seed;
  r.cio_db = cio_db;
  r.point = son_enabled ? "son" : point_label(cio_db);
  try {
    flowsim::Simulator sim(layout, config.radio, config.traffic, config.sim, config.exposure,
                           seed);
    netmodel::PowerOffsetVector offsets(layout.n_small_cells(), cio_db, config.son.cio_min_db,
                                        config.son.cio_max_db, layout.config.macro_pilot_dbm,
                                        layout.config.sc_pilot_dbm);
    if (!son_enabled) {
      r.trace = sim.run(offsets, config.experiment.horizon_s);
    } else {
      son::SonState state(offsets, config.son);
      const int n_sc = layout.n_small_cells();
      auto hook = [&](const flowsim::KpiWindow& w, netmodel::PowerOffsetVector& off) {
        std::vector<son::ScMeasurement> ms(n_sc);
        for (int s = 0; s < n_sc; ++s) {
          if (const auto* k = w.find(layout.sc_cell_id(s))) {
            ms[s].ul_load = k->ul_load;
            ms[s].outage = k->outage;
          }
          if (const auto* m = w.find(layout.small_cells[s].parent_sector)) {
            ms[s].macro_ul_load = m->ul_load;
          }
        }
        son::son_step(state, ms);
        off = state.offsets();
      };
      r.trace = sim.run(state.offsets(), config.experiment.horizon_s, hook);
      r.son_history = state.history();
      r.verdict = son::convergence_check(state.history(), config.son.convergence_window,
                                         config.son.tol_offset_db, config.son.tol_outage,
                                         config.son.theta_bar);
    }
    r.report = exposure::ExposureReport::from_ledger(r.trace.ledger);
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

CampaignResult run_baseline_sweep(const ScenarioConfig& config,
                                  const std::vector<double>& cio_values,
                                  const std::vector<std::uint64_t>& seeds) {
  config.validate();
  require(!cio_values.empty(), ErrorCategory::config, "sweep: empty CIO list");
  require(!seeds.empty(), ErrorCategory::config, "sweep: empty seed list");
  for (double cio : cio_values) {
    require(cio >= config.son.cio_min_db && cio <= config.son.cio_max_db, ErrorCategory::config,
            "sweep: CIO outside bounds");
  }
  const netmodel::NetworkLayout layout = netmodel::build_layout(config.deployment);
  CampaignResult result;
  result.config = config;
  result.mode = "sweep";
  const int n_seeds = static_cast<int>(seeds.size());
  result.runs.resize(cio_values.size() * seeds.size());
  parallel_jobs(static_cast<int>(result.runs.size()), [&](int j) {
    const int pi = j / n_seeds;
    const int si = j % n_seeds;
    result.runs[j] = run_single(config, layout, cio_values[pi], seeds[si], false);
  });
  return result;
}

CampaignResult run_son_campaign(const ScenarioConfig& config,
                                const std::vector<std::uint64_t>& seeds) {
  config.validate();
  require(!seeds.empty(), ErrorCategory::config, "son: empty seed list");
  const netmodel::NetworkLayout layout = netmodel::build_layout(config.deployment);
  CampaignResult result;
  result.config = config;
  result.mode = "son";
  const int n_seeds = static_cast<int>(seeds.size());
  result.runs.resize(n_seeds);
  result.baselines.resize(n_seeds);
  parallel_jobs(2 * n_seeds, [&](int j) {
    if (j < n_seeds) {
      result.runs[j] = run_single(config, layout, config.experiment.initial_cio_db, seeds[j], true);
    } else {
      RunResult b = run_single(config, layout, config.experiment.baseline_cio_db, seeds[j - n_seeds],
                               false);
      b.point = "baseline";
      result.baselines[j - n_seeds] = std::move(b);
    }
  });
  result.gains.resize(n_seeds);
  for (int i = 0; i < n_seeds; ++i) {
    if (!result.runs[i].failed && !result.baselines[i].failed) {
      result.gains[i] = exposure::exposure_gain(result.baselines[i].report, result.runs[i].report);
    }
  }
  return result;
}

}  // namespace hetsim::harness
