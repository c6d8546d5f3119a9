#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hetsim/harness.hpp"

using namespace hetsim;
using namespace hetsim::harness;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hetsim_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("table1 preset carries every Table 1 value verbatim") {
  const ScenarioConfig c = ScenarioConfig::preset("table1");
  CHECK(c.deployment.macro_pilot_dbm == 46.0);
  CHECK(c.deployment.sc_pilot_dbm == 30.0);
  CHECK(c.deployment.inter_site_distance_m == 500.0);
  CHECK(c.deployment.rings == 2);  // 57 sectors
  CHECK(c.deployment.sc_per_zone_a_sector == 4);
  CHECK(c.traffic.lambda_per_s == 5.0);
  CHECK(c.traffic.zone_b_user_cap == 8);
  CHECK(c.traffic.mean_file_mbits == 15.0);
  CHECK(c.traffic.ul_fraction == 0.3);
  CHECK(c.traffic.target_rate_bps == 1.5e6);
  CHECK(c.deployment.shadowing_sigma_db == 6.0);
  CHECK(c.exposure.sar_dl_w_per_kg_per_w == 4.7e-3);
  CHECK(c.exposure.sar_ul_w_per_kg_per_w == 8e-5);
  CHECK(c.exposure.activity_coefficient == 20.0);
  CHECK(c.radio.grid.n_prb == 50);
  // and the layout it builds matches the deployment row
  const netmodel::NetworkLayout layout = netmodel::build_layout(c.deployment);
  CHECK(layout.n_sectors() == 57);
}

TEST_CASE("config round-trips through JSON losslessly") {
  ScenarioConfig c = ScenarioConfig::preset("desk");
  c.traffic.lambda_per_s = 3.25;
  c.son.epsilon = 1.0;
  c.experiment.seeds = {9, 8, 7};
  const std::string text = c.to_json_text();
  const ScenarioConfig back = ScenarioConfig::from_json_text(text);
  CHECK(back.to_json_text() == text);
  CHECK(back.traffic.lambda_per_s == 3.25);
  CHECK(back.son.epsilon == 1.0);
  CHECK(back.experiment.seeds == std::vector<std::uint64_t>{9, 8, 7});
}

TEST_CASE("config validation rejects malformed values") {
  ScenarioConfig c = ScenarioConfig::preset("desk");
  c.traffic.ul_fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), SimError);
  c = ScenarioConfig::preset("desk");
  c.experiment.horizon_s = 7.0;  // not a window multiple
  CHECK_THROWS_AS(c.validate(), SimError);
  c = ScenarioConfig::preset("desk");
  c.son.theta_bar = 0.0;
  CHECK_THROWS_AS(c.validate(), SimError);
  CHECK_THROWS_AS(ScenarioConfig::preset("nope"), SimError);
  CHECK_THROWS_AS(ScenarioConfig::from_json_text("{not json"), SimError);
}

TEST_CASE("sweep: empty seed or CIO list is a config error") {
  const ScenarioConfig c = ScenarioConfig::preset("mini");
  CHECK_THROWS_AS(run_baseline_sweep(c, {}, {1}), SimError);
  CHECK_THROWS_AS(run_baseline_sweep(c, {-2.0}, {}), SimError);
  CHECK_THROWS_AS(run_baseline_sweep(c, {99.0}, {1}), SimError);
}

TEST_CASE("sweep: identical sweep points give identical per-seed results") {
  ScenarioConfig c = ScenarioConfig::preset("mini");
  c.experiment.horizon_s = 60.0;
  const CampaignResult r = run_baseline_sweep(c, {2.0, 2.0}, {5});
  REQUIRE(r.runs.size() == 2);
  CHECK(!r.runs[0].failed);
  CHECK(r.runs[0].trace.digest() == r.runs[1].trace.digest());
}

TEST_CASE("son campaign: epsilon=0 is rejected, tiny epsilon behaves as a null controller") {
  ScenarioConfig c = ScenarioConfig::preset("mini");
  c.experiment.horizon_s = 60.0;
  c.son.epsilon = 0.0;
  CHECK_THROWS_AS(run_son_campaign(c, {1}), SimError);

  // A vanishing step keeps offsets at the initial value; the SON run then
  // matches the plain baseline run at the same point bit for bit.
  c.son.epsilon = 1e-12;
  c.experiment.initial_cio_db = c.experiment.baseline_cio_db;
  const CampaignResult r = run_son_campaign(c, {3});
  REQUIRE(r.runs.size() == 1);
  REQUIRE(r.baselines.size() == 1);
  CHECK(!r.runs[0].failed);
  for (int s = 0; s < r.runs[0].trace.final_offsets.n_entries(); ++s) {
    CHECK(r.runs[0].trace.final_offsets.entry(s) ==
          doctest::Approx(c.experiment.initial_cio_db).epsilon(1e-9));
  }
  CHECK(r.runs[0].trace.digest() == r.baselines[0].trace.digest());
}

TEST_CASE("son campaign: relaxed constraint lets offsets rise to balance or bound") {
  ScenarioConfig c = ScenarioConfig::preset("mini");
  c.experiment.horizon_s = 360.0;
  c.son.theta_bar = 0.999;  // constraint never binds
  const CampaignResult r = run_son_campaign(c, {1});
  REQUIRE(!r.runs[0].failed);
  double mean_final = 0.0;
  for (int s = 0; s < r.runs[0].trace.final_offsets.n_entries(); ++s) {
    mean_final += r.runs[0].trace.final_offsets.entry(s);
  }
  mean_final /= r.runs[0].trace.final_offsets.n_entries();
  CHECK(mean_final > c.experiment.initial_cio_db + 1.0);
}

TEST_CASE("gain bookkeeping equals exposure_gain applied to the stored reports") {
  ScenarioConfig c = ScenarioConfig::preset("mini");
  c.experiment.horizon_s = 120.0;
  const CampaignResult r = run_son_campaign(c, {2});
  REQUIRE(r.gains.size() == 1);
  const exposure::GainReport direct =
      exposure::exposure_gain(r.baselines[0].report, r.runs[0].report);
  CHECK(r.gains[0].all.f_ul == direct.all.f_ul);
  CHECK(r.gains[0].all.f_dl == direct.all.f_dl);
  CHECK(r.gains[0].macro.f_total == direct.macro.f_total);
}

TEST_CASE("emit_reports: empty campaign yields a valid manifest with zero files") {
  const fs::path dir = temp_dir("empty");
  CampaignResult empty;
  const Manifest m = emit_reports(empty, dir);
  CHECK(m.files.empty());
  CHECK(fs::exists(dir / "manifest.json"));
  const Manifest back = read_manifest(dir);
  CHECK(back.files.empty());
  CHECK(back.campaign_hash == m.campaign_hash);
  fs::remove_all(dir);
}

TEST_CASE("emit_reports: run directories, rerun hash identity, verification") {
  ScenarioConfig c = ScenarioConfig::preset("mini");
  c.experiment.horizon_s = 60.0;
  const CampaignResult r = run_baseline_sweep(c, {-2.0, 2.0, 6.0}, {1, 2});
  REQUIRE(r.runs.size() == 6);

  const fs::path dir_a = temp_dir("emit_a");
  const fs::path dir_b = temp_dir("emit_b");
  const Manifest ma = emit_reports(r, dir_a);
  const Manifest mb = emit_reports(r, dir_b);
  CHECK(ma.campaign_hash == mb.campaign_hash);
  CHECK(ma.files.size() == mb.files.size());

  int run_dirs = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_a)) {
    if (e.is_directory() && e.path().filename().string().rfind("seed_", 0) == 0) run_dirs += 1;
  }
  CHECK(run_dirs == 6);

  CHECK(verify_manifest(dir_a));
  {
    std::ofstream tamper(dir_a / "fig6_loads_vs_cio.csv", std::ios::app);
    tamper << "tampered\n";
  }
  std::string err;
  CHECK(!verify_manifest(dir_a, &err));
  CHECK(err.find("fig6") != std::string::npos);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("fnv1a64: reference vectors") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);
}

TEST_CASE("group aggregates: zone-A groups only, FTT from flows") {
  ScenarioConfig c = ScenarioConfig::preset("mini");
  c.experiment.horizon_s = 120.0;
  const netmodel::NetworkLayout layout = netmodel::build_layout(c.deployment);
  const RunResult r = run_single(c, layout, 0.0, 4, false);
  REQUIRE(!r.failed);
  const GroupAggregate all = group_aggregate(r.trace, layout, std::nullopt);
  const GroupAggregate macro = group_aggregate(r.trace, layout, exposure::CellGroup::macro);
  const GroupAggregate sc = group_aggregate(r.trace, layout, exposure::CellGroup::sc);
  CHECK(all.mean_ul_load >= 0.0);
  CHECK(macro.mean_dl_load >= sc.mean_dl_load);  // SCs nearly empty at CIO 0
  if (macro.mean_ftt_dl_s) CHECK(*macro.mean_ftt_dl_s > 0.0);
}

TEST_SUITE_END();
